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

#include "thzhall/analysis.hpp"
#include "thzhall/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace thzhall
{
    AzimuthPowerProfile azimuth_power_profile(std::span<const Mpc> mpcs, const ScanGrid &grid, double floor_dbm)
    {
        grid.validate();
        std::vector<double> lin(grid.azimuths_deg.size(), 0.0);
        for (const auto &m : mpcs)
        {
            std::size_t best = 0;
            for (std::size_t i = 1; i < grid.azimuths_deg.size(); ++i)
                if (cyclic_distance_deg(m.aoa_az_deg, grid.azimuths_deg[i]) <
                    cyclic_distance_deg(m.aoa_az_deg, grid.azimuths_deg[best]))
                    best = i;
            lin[best] += m.linear_power();
        }

        AzimuthPowerProfile p;
        p.azimuths_deg = grid.azimuths_deg;
        p.power_dbm.reserve(lin.size());
        for (double v : lin)
            p.power_dbm.push_back(v > 0.0 ? linear_to_db(v) : floor_dbm);
        return p;
    }

    namespace
    {
        // Walks a cyclic profile from `origin` one sample at a time in either direction
        struct CyclicWalker
        {
            const AzimuthPowerProfile &p;
            std::size_t origin;
            int step; // -1 left, +1 right

            std::size_t index(std::size_t k) const
            {
                const std::ptrdiff_t n = std::ptrdiff_t(p.size());
                std::ptrdiff_t j = (std::ptrdiff_t(origin) + step * std::ptrdiff_t(k)) % n;
                return std::size_t(j < 0 ? j + n : j);
            }

            double value(std::size_t k) const { return p.power_dbm[index(k)]; }

            // Angular step from sample k-1 to sample k along the walking direction
            double step_deg(std::size_t k) const
            {
                const double a = p.azimuths_deg[index(k - 1)];
                const double b = p.azimuths_deg[index(k)];
                return wrap_deg(step > 0 ? b - a : a - b);
            }
        };

        bool is_candidate(const AzimuthPowerProfile &p, std::size_t i)
        {
            const std::size_t n = p.size();
            const double v = p.power_dbm[i];
            if (!(v > p.power_dbm[(i + n - 1) % n]))
                return false;
            for (std::size_t k = 1; k < n; ++k)
            {
                const double w = p.power_dbm[(i + k) % n];
                if (w != v)
                    return w < v;
            }
            return false;
        }
    }

    std::vector<Beam> detect_beams(const AzimuthPowerProfile &profile, double min_prominence_db)
    {
        if (profile.size() == 0 || profile.azimuths_deg.size() != profile.power_dbm.size())
            throw ModelError("detect_beams: empty or inconsistent profile");

        const std::size_t n = profile.size();
        std::vector<Beam> beams;
        if (n < 2)
            return beams;

        for (std::size_t i = 0; i < n; ++i)
        {
            if (!is_candidate(profile, i))
                continue;

            const double level = profile.power_dbm[i];
            double side_min[2];
            std::size_t side_len[2];
            for (int s = 0; s < 2; ++s)
            {
                const CyclicWalker w{profile, i, s == 0 ? -1 : +1};
                double mn = std::numeric_limits<double>::infinity();
                std::size_t k = 1;
                double travelled = 0.0;
                for (; k < n; ++k)
                {
                    travelled += w.step_deg(k);
                    if (travelled > 180.0 + 1e-9)
                        break;
                    const double v = w.value(k);
                    mn = std::min(mn, v);
                    if (v > level)
                        break;
                }
                side_min[s] = mn;
                side_len[s] = k;
            }

            const double reference = std::max(side_min[0], side_min[1]);
            const double prominence = level - reference;
            if (!(prominence > 0.0) || prominence < min_prominence_db)
                continue;

            // Half-prominence crossings, as signed offsets from the peak azimuth
            const double half = level - 0.5 * prominence;
            double edge[2] = {0.0, 0.0};
            for (int s = 0; s < 2; ++s)
            {
                const CyclicWalker w{profile, i, s == 0 ? -1 : +1};
                double prev_off = 0.0, prev_val = level;
                for (std::size_t k = 1; k <= side_len[s] && k < n; ++k)
                {
                    const double off = prev_off + w.step_deg(k);
                    const double v = w.value(k);
                    if (v < half)
                    {
                        edge[s] = prev_off + (prev_val - half) / (prev_val - v) * (off - prev_off);
                        break;
                    }
                    prev_off = off;
                    prev_val = v;
                }
            }

            Beam b;
            b.peak_index = i;
            b.peak_dbm = level;
            b.prominence_db = prominence;
            b.width_deg = edge[0] + edge[1];
            b.center_deg = wrap_deg(profile.azimuths_deg[i] + 0.5 * (edge[1] - edge[0]));
            beams.push_back(b);
        }
        return beams;
    }

    ToaHistogram toa_density(std::span<const Mpc> mpcs, double bin_ns)
    {
        if (mpcs.empty())
            throw ModelError("toa_density: no MPCs");
        if (!(bin_ns > 0.0))
            throw ModelError("toa_density: bin width must be positive");

        auto [lo, hi] = std::minmax_element(mpcs.begin(), mpcs.end(),
                                            [](const Mpc &a, const Mpc &b) { return a.toa_ns < b.toa_ns; });
        ToaHistogram h;
        h.bin_ns = bin_ns;
        h.start_ns = std::floor(lo->toa_ns / bin_ns) * bin_ns;
        const std::size_t nbins = std::size_t(std::floor((hi->toa_ns - h.start_ns) / bin_ns)) + 1;
        h.density.assign(nbins, 0.0);
        for (const auto &m : mpcs)
        {
            std::size_t b = std::size_t(std::floor((m.toa_ns - h.start_ns) / bin_ns));
            h.density[std::min(b, nbins - 1)] += 1.0;
        }
        const double norm = double(mpcs.size()) * bin_ns;
        for (auto &d : h.density)
            d /= norm;
        return h;
    }

    double rms_delay_spread(std::span<const Mpc> mpcs)
    {
        if (mpcs.empty())
            throw ModelError("rms_delay_spread: no MPCs");
        double ps = 0.0, mean = 0.0;
        for (const auto &m : mpcs)
        {
            ps += m.linear_power();
            mean += m.linear_power() * m.toa_ns;
        }
        if (!(ps > 0.0))
            throw ModelError("rms_delay_spread: zero total power");
        mean /= ps;
        double var = 0.0;
        for (const auto &m : mpcs)
            var += m.linear_power() * (m.toa_ns - mean) * (m.toa_ns - mean);
        return std::sqrt(var / ps);
    }

    double angular_spread(std::span<const Mpc> mpcs, AngleDomain domain)
    {
        if (mpcs.empty())
            throw ModelError("angular_spread: no MPCs");
        std::complex<double> acc(0.0, 0.0);
        double ps = 0.0;
        for (const auto &m : mpcs)
        {
            const double ang = domain == AngleDomain::azimuth ? m.aoa_az_deg : m.aoa_el_deg;
            acc += m.linear_power() * std::polar(1.0, deg_to_rad(ang));
            ps += m.linear_power();
        }
        if (!(ps > 0.0))
            throw ModelError("angular_spread: zero total power");
        const double r = std::min(1.0, std::abs(acc) / ps);
        return rad_to_deg(std::sqrt(std::max(0.0, -2.0 * std::log(r))));
    }

    std::vector<Cluster> cluster_mpcs(std::span<const Mpc> mpcs, double gate_delay_ns, double gate_angle_deg)
    {
        if (!(gate_delay_ns > 0.0) || !(gate_angle_deg > 0.0))
            throw ModelError("cluster_mpcs: gates must be positive");

        std::vector<std::size_t> order(mpcs.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         {
                             const Mpc &x = mpcs[a], &y = mpcs[b];
                             if (x.power_db != y.power_db)
                                 return x.power_db > y.power_db;
                             if (x.toa_ns != y.toa_ns)
                                 return x.toa_ns < y.toa_ns;
                             return x.aoa_az_deg < y.aoa_az_deg;
                         });

        std::vector<bool> taken(mpcs.size(), false);
        std::vector<Cluster> clusters;
        for (std::size_t c : order)
        {
            if (taken[c])
                continue;
            taken[c] = true;
            Cluster cl;
            cl.kind = ClusterKind::non_rt;
            cl.center = mpcs[c];
            for (std::size_t j = 0; j < mpcs.size(); ++j)
            {
                if (taken[j])
                    continue;
                if (std::abs(mpcs[j].toa_ns - cl.center.toa_ns) <= gate_delay_ns &&
                    cyclic_distance_deg(mpcs[j].aoa_az_deg, cl.center.aoa_az_deg) <= gate_angle_deg)
                {
                    taken[j] = true;
                    cl.subpaths.push_back(mpcs[j]);
                }
            }
            clusters.push_back(std::move(cl));
        }
        return clusters;
    }
}
