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

#ifndef THZHALL_ORACLE_GRID_FIT_HPP
#define THZHALL_ORACLE_GRID_FIT_HPP

#include <cmath>
#include <limits>
#include <vector>

// Least-squares optima by brute-force search
namespace oracle
{
    inline double sse_line(const std::vector<double> &x, const std::vector<double> &y, double slope, double icpt)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double r = y[i] - (slope * x[i] + icpt);
            s += r * r;
        }
        return s;
    }

    // y = slope * x + fixed_icpt; slope on a uniform grid
    inline double grid_slope(const std::vector<double> &x, const std::vector<double> &y, double fixed_icpt, double lo,
                             double hi, double step)
    {
        double best = lo, best_sse = std::numeric_limits<double>::infinity();
        const long n = std::lround((hi - lo) / step);
        for (long i = 0; i <= n; ++i)
        {
            const double s = lo + double(i) * step;
            const double e = sse_line(x, y, s, fixed_icpt);
            if (e < best_sse)
            {
                best_sse = e;
                best = s;
            }
        }
        return best;
    }

    struct LineFit
    {
        double slope, icpt;
    };

    // 2-D grid over (slope, intercept), zoomed around the best cell
    inline LineFit grid_line(const std::vector<double> &x, const std::vector<double> &y, double slope_lo, double slope_hi,
                             double icpt_lo, double icpt_hi)
    {
        LineFit best{0.5 * (slope_lo + slope_hi), 0.5 * (icpt_lo + icpt_hi)};
        double ws = slope_hi - slope_lo, wi = icpt_hi - icpt_lo;
        const int cells = 100;
        for (int round = 0; round < 12; ++round)
        {
            double best_sse = std::numeric_limits<double>::infinity();
            const LineFit c = best;
            for (int i = -cells; i <= cells; ++i)
                for (int j = -cells; j <= cells; ++j)
                {
                    const double s = c.slope + ws * i / (2.0 * cells), b = c.icpt + wi * j / (2.0 * cells);
                    const double e = sse_line(x, y, s, b);
                    if (e < best_sse)
                    {
                        best_sse = e;
                        best = {s, b};
                    }
                }
            ws *= 0.1;
            wi *= 0.1;
        }
        return best;
    }
}

#endif
