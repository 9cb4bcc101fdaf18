// SPDX-License-Identifier: Apache-2.0
//
// thzhall: THz channel measurement processing and hybrid modelling for L-shaped hallways
// Copyright (C) 2026 The thzhall authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef THZHALL_ORACLE_PROMINENCE_HPP
#define THZHALL_ORACLE_PROMINENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

// Exhaustive prominence search on a cyclic profile, O(n^2) per candidate.
// Interval on one side = every sample within 180 deg of the peak that is reached before the first
// strictly higher one, each membership decided from scratch.
namespace oracle
{
    struct OracleBeam
    {
        std::size_t peak = 0;
        double prominence = 0.0;
        double center = 0.0;
        double width = 0.0;
    };

    inline double wrap360(double a)
    {
        a = std::fmod(a, 360.0);
        return a < 0.0 ? a + 360.0 : a;
    }

    inline std::vector<OracleBeam> prominence_beams(const std::vector<double> &az, const std::vector<double> &p,
                                                    double min_prominence)
    {
        const std::size_t n = p.size();
        std::vector<OracleBeam> out;
        if (n < 2)
            return out;
        auto at = [&](std::ptrdiff_t j) { return std::size_t(((j % std::ptrdiff_t(n)) + std::ptrdiff_t(n)) % std::ptrdiff_t(n)); };

        for (std::size_t i = 0; i < n; ++i)
        {
            // rising edge, then the plateau must end by falling
            if (!(p[at(std::ptrdiff_t(i) - 1)] < p[i]))
                continue;
            std::size_t m = 1;
            while (m < n && p[at(std::ptrdiff_t(i + m))] == p[i])
                ++m;
            if (m == n || p[at(std::ptrdiff_t(i + m))] > p[i])
                continue;

            double mins[2], edges[2] = {0.0, 0.0};
            std::vector<std::size_t> members[2];
            for (int s = 0; s < 2; ++s)
            {
                const int dir = s == 0 ? -1 : 1;
                auto offset = [&](std::size_t m) {
                    const std::size_t j = at(std::ptrdiff_t(i) + dir * std::ptrdiff_t(m));
                    return dir > 0 ? wrap360(az[j] - az[i]) : wrap360(az[i] - az[j]);
                };
                mins[s] = INFINITY;
                for (std::size_t m = 1; m < n; ++m)
                {
                    if (offset(m) > 180.0 + 1e-9)
                        continue;
                    // reached iff every earlier sample on this side is not higher and within range
                    bool reached = true;
                    for (std::size_t q = 1; q < m; ++q)
                        if (p[at(std::ptrdiff_t(i) + dir * std::ptrdiff_t(q))] > p[i] || offset(q) > 180.0 + 1e-9 ||
                            offset(q) >= offset(m))
                            reached = false;
                    if (!reached)
                        continue;
                    members[s].push_back(m);
                    mins[s] = std::min(mins[s], p[at(std::ptrdiff_t(i) + dir * std::ptrdiff_t(m))]);
                }
            }
            const double prom = p[i] - std::max(mins[0], mins[1]);
            if (!(prom > 0.0) || prom < min_prominence)
                continue;

            const double half = p[i] - prom / 2.0;
            for (int s = 0; s < 2; ++s)
            {
                const int dir = s == 0 ? -1 : 1;
                double prev_off = 0.0, prev = p[i];
                for (std::size_t m : members[s])
                {
                    const std::size_t j = at(std::ptrdiff_t(i) + dir * std::ptrdiff_t(m));
                    const double off = dir > 0 ? wrap360(az[j] - az[i]) : wrap360(az[i] - az[j]);
                    if (p[j] < half)
                    {
                        const double frac = (prev - half) / (prev - p[j]);
                        edges[s] = prev_off + frac * (off - prev_off);
                        break;
                    }
                    prev_off = off;
                    prev = p[j];
                }
            }
            out.push_back({i, prom, wrap360(az[i] + (edges[1] - edges[0]) / 2.0), edges[0] + edges[1]});
        }
        return out;
    }
}

#endif
