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

#include "thzhall/synth.hpp"
#include "thzhall/analysis.hpp"
#include "thzhall/error.hpp"
#include "thzhall/raytrace.hpp"

#include <algorithm>
#include <complex>
#include <limits>
#include <numbers>

namespace thzhall
{
    // ---------------------------------------------------------------------------------------------
    // Laws

    double LogNormalLaw::cdf(double x) const
    {
        if (!(x > 0.0))
            return 0.0;
        const double z = std::log(x) - mu;
        if (sigma == 0.0)
            return z >= 0.0 ? 1.0 : 0.0;
        return 0.5 * std::erfc(-z / (sigma * std::numbers::sqrt2));
    }

    double LogNormalLaw::sample(std::mt19937_64 &rng) const
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double z = normal(rng);
        return std::exp(mu + sigma * z);
    }

    void LogNormalLaw::validate(const char *what) const
    {
        if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0)
            throw ModelError(std::string(what) + ": log-normal law needs finite mu and sigma >= 0");
    }

    void ClusterLaws::validate(const char *what) const
    {
        subpath_count.validate(what);
        delay_spread_ns.validate(what);
        angular_spread_deg.validate(what);
        if (!std::isfinite(subpath_decay_db) || subpath_decay_db < 0.0)
            throw ModelError(std::string(what) + ": subpath decay must be >= 0 dB");
    }

    void NonRtPlacement::validate() const
    {
        if (!(mean_count >= 0.0) || !std::isfinite(mean_count))
            throw ModelError("non-RT placement: mean count must be >= 0");
        if (!(toa_min_ns >= 0.0) || !(toa_max_ns >= toa_min_ns))
            throw ModelError("non-RT placement: need 0 <= toa_min <= toa_max");
        if (!(aoa_max_deg >= aoa_min_deg))
            throw ModelError("non-RT placement: need aoa_min <= aoa_max");
        if (!(power_max_db >= power_min_db) || power_max_db > 0.0)
            throw ModelError("non-RT placement: need power_min <= power_max <= 0 dB");
    }

    const BandLaws &StatLaws::for_band(const std::string &band) const
    {
        const auto it = bands.find(band);
        if (it == bands.end())
            throw ModelError("no statistical laws for band '" + band + "'");
        if (!it->second.rt || !it->second.non_rt)
            throw ModelError("statistical laws for band '" + band + "' are incomplete (RT and non-RT required)");
        return it->second;
    }

    void StatLaws::validate() const
    {
        for (const auto &[name, b] : bands)
        {
            if (b.rt)
                b.rt->validate(("RT laws of " + name).c_str());
            if (b.non_rt)
                b.non_rt->validate(("non-RT laws of " + name).c_str());
            b.placement.validate();
        }
    }

    StatLaws StatLaws::illustrative()
    {
        BandLaws b;
        b.rt = ClusterLaws{{1.6, 0.4}, {0.5, 0.4}, {1.5, 0.4}, 6.0};
        b.non_rt = ClusterLaws{{1.4, 0.4}, {0.8, 0.4}, {2.0, 0.4}, 6.0};
        StatLaws laws;
        laws.bands["306-321"] = b;
        laws.bands["356-371"] = b;
        return laws;
    }

    // ---------------------------------------------------------------------------------------------
    // Realisation

    std::vector<Mpc> ChannelRealization::mpcs() const
    {
        std::vector<Mpc> out;
        for (const auto &c : clusters)
        {
            out.push_back(c.center);
            out.insert(out.end(), c.subpaths.begin(), c.subpaths.end());
        }
        return out;
    }

    double ChannelRealization::total_linear_power() const
    {
        double p = 0.0;
        for (const auto &m : mpcs())
            p += m.linear_power();
        return p;
    }

    std::size_t ChannelRealization::rt_cluster_count() const
    {
        return std::size_t(std::count_if(clusters.begin(), clusters.end(),
                                         [](const Cluster &c) { return c.kind == ClusterKind::rt; }));
    }

    std::mt19937_64 cluster_stream(std::uint64_t seed, std::uint64_t rx, std::uint64_t cluster, std::uint64_t tag)
    {
        auto lo = [](std::uint64_t v) { return std::uint32_t(v & 0xffffffffu); };
        auto hi = [](std::uint64_t v) { return std::uint32_t(v >> 32); };
        std::seed_seq seq{lo(seed), hi(seed), lo(rx), hi(rx), lo(cluster), hi(cluster), lo(tag), hi(tag)};
        return std::mt19937_64(seq);
    }

    namespace
    {
        constexpr int max_shape_draws = 64;
        constexpr double max_offset_ratio = 20.0; // largest subpath offset over the target spread

        double exponential(std::mt19937_64 &rng, double mean)
        {
            std::exponential_distribution<double> e(1.0);
            return mean * e(rng);
        }

        double laplacian(std::mt19937_64 &rng)
        {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
            return sign * exponential(rng, 1.0);
        }

        double azimuth_spread_at(const std::vector<Mpc> &base, const std::vector<double> &unit, double center,
                                 double scale, std::vector<Mpc> &work)
        {
            for (std::size_t i = 0; i < base.size(); ++i)
                work[i].aoa_az_deg = wrap_deg(center + scale * unit[i]);
            return angular_spread(work, AngleDomain::azimuth);
        }

        // Scale of the unit offsets giving the target circular spread; nothing if out of reach
        std::optional<double> solve_angle_scale(const std::vector<Mpc> &subpaths, const std::vector<double> &unit,
                                                double center, double target)
        {
            std::vector<Mpc> work = subpaths;
            double max_unit = 0.0;
            for (double u : unit)
                max_unit = std::max(max_unit, std::abs(u));
            if (!(max_unit > 0.0))
                return std::nullopt;

            // The spread is monotone while every offset stays within a half turn
            const double limit = 180.0 / max_unit;
            double lo = 0.0, hi = std::min(limit, target / max_unit);
            while (azimuth_spread_at(subpaths, unit, center, hi, work) < target)
            {
                if (hi >= limit)
                    return std::nullopt;
                lo = hi;
                hi = std::min(limit, 2.0 * hi);
            }
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
            {
                const double mid = 0.5 * (lo + hi);
                if (azimuth_spread_at(subpaths, unit, center, mid, work) < target)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
    }

    ClusterSample sample_cluster(const Mpc &center, const ClusterLaws &laws, double min_excess_ns,
                                 std::mt19937_64 &rng)
    {
        ClusterSample out;
        out.draw.subpath_count = std::size_t(std::max(0.0, std::round(laws.subpath_count.sample(rng))));
        out.draw.delay_spread_ns = laws.delay_spread_ns.sample(rng);
        out.draw.angular_spread_deg = laws.angular_spread_deg.sample(rng);
        const std::size_t n = out.draw.subpath_count;
        if (n == 0)
            return out;

        for (int attempt = 0; attempt < max_shape_draws; ++attempt)
        {
            std::vector<Mpc> sub(n);
            std::vector<double> excess(n), unit(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                sub[i].power_db = center.power_db - exponential(rng, laws.subpath_decay_db);
                excess[i] = exponential(rng, 1.0);
                unit[i] = laplacian(rng);
            }

            if (n == 1)
            {
                sub[0].toa_ns = center.toa_ns + min_excess_ns + out.draw.delay_spread_ns * excess[0];
                sub[0].aoa_az_deg = wrap_deg(center.aoa_az_deg + out.draw.angular_spread_deg * unit[0]);
                out.subpaths = std::move(sub);
                return out;
            }

            for (std::size_t i = 0; i < n; ++i)
                sub[i].toa_ns = excess[i];
            const double unit_ds = rms_delay_spread(sub);
            if (!(unit_ds > 0.0))
                continue;
            const double scale = out.draw.delay_spread_ns / unit_ds;
            if (scale * *std::max_element(excess.begin(), excess.end()) > max_offset_ratio * out.draw.delay_spread_ns)
                continue;
            for (std::size_t i = 0; i < n; ++i)
                sub[i].toa_ns = center.toa_ns + min_excess_ns + scale * excess[i];

            const auto angle_scale = solve_angle_scale(sub, unit, center.aoa_az_deg, out.draw.angular_spread_deg);
            if (!angle_scale)
                continue;
            double max_unit = 0.0;
            for (double u : unit)
                max_unit = std::max(max_unit, std::abs(u));
            if (*angle_scale * max_unit > max_offset_ratio * out.draw.angular_spread_deg)
                continue;
            for (std::size_t i = 0; i < n; ++i)
                sub[i].aoa_az_deg = wrap_deg(center.aoa_az_deg + *angle_scale * unit[i]);
            out.subpaths = std::move(sub);
            return out;
        }
        throw ModelError("sample_cluster: could not place " + std::to_string(n) + " subpaths for delay spread " +
                         std::to_string(out.draw.delay_spread_ns) + " ns, angular spread " +
                         std::to_string(out.draw.angular_spread_deg) + " deg");
    }

    namespace
    {
        struct Guard
        {
            double delay_ns;
            double angle_deg;

            bool clashes(const Mpc &m, std::span<const Mpc> centers, std::size_t skip) const
            {
                for (std::size_t j = 0; j < centers.size(); ++j)
                    if (j != skip && std::abs(m.toa_ns - centers[j].toa_ns) < delay_ns &&
                        cyclic_distance_deg(m.aoa_az_deg, centers[j].aoa_az_deg) < angle_deg)
                        return true;
                return false;
            }
        };

        // Delays at or beyond this round to a bin past the end of the CIR
        double observable_window_ns(const BandConfig &band)
        {
            return (double(band.n_points) - 0.5) * band.delay_bin_ns();
        }

        // Drops subpaths that fall outside the delay window
        void truncate(ClusterSample &s, const BandConfig &band)
        {
            const double window_ns = observable_window_ns(band);
            const auto it = std::remove_if(s.subpaths.begin(), s.subpaths.end(),
                                           [&](const Mpc &m) { return !(m.toa_ns < window_ns); });
            if (it != s.subpaths.end())
            {
                s.subpaths.erase(it, s.subpaths.end());
                s.draw.truncated = true;
            }
        }

        struct Dominant
        {
            std::vector<Mpc> centers;
            std::vector<int> sides;
            std::string reference_rx_id;
        };

        Dominant reference_centers(const ReferencePaths &ref, const std::string &rx_id)
        {
            Dominant d;
            for (int side = 1; side <= 2; ++side)
                if (const auto &p = ref.side(side))
                {
                    d.centers.push_back(p->as_mpc());
                    d.sides.push_back(side);
                }
            if (d.centers.empty())
                throw ModelError("synthesize: no valid Wall C or Wall D path at '" + rx_id + "'");
            return d;
        }

        Dominant dominant_paths(const LShapeScene &scene, std::size_t idx, const BentAxisPosition &pos,
                                const BandConfig &band, const EvolveParams &params, const SynthOptions &opt)
        {
            const std::string &id = scene.rx[idx].id;
            const double f = band.center_hz();
            switch (pos.region)
            {
            case RxRegion::los:
            case RxRegion::corner:
            {
                const auto paths = trace(scene, idx, opt.max_bounces, f);
                const double window_ns = observable_window_ns(band);
                double strongest = -std::numeric_limits<double>::infinity();
                for (const auto &p : paths)
                    if (p.toa_ns < window_ns)
                        strongest = std::max(strongest, p.power_db);
                if (!std::isfinite(strongest))
                    throw ModelError("synthesize: no traced path reaches '" + id + "' within the delay window");
                Dominant d;
                for (const auto &p : paths)
                    if (p.power_db >= strongest - band.dynamic_range_db && p.toa_ns < window_ns)
                    {
                        d.centers.push_back(p.as_mpc());
                        d.sides.push_back(0);
                    }
                return d;
            }
            case RxRegion::near_nlos:
                return reference_centers(reference_dominant_mpcs(scene, idx, opt.max_bounces, f), id);
            case RxRegion::far_nlos:
                break;
            }

            std::optional<std::size_t> ref_idx;
            double ref_d = 0.0;
            for (std::size_t j = 0; j < scene.rx.size(); ++j)
            {
                if (scene.rx[j].row != scene.rx[idx].row)
                    continue;
                const auto pj = bent_axis_distance(scene, j);
                if (pj.region == RxRegion::near_nlos && (!ref_idx || pj.d < ref_d))
                {
                    ref_idx = j;
                    ref_d = pj.d;
                }
            }
            if (!ref_idx)
                throw ModelError("synthesize: far-NLoS Rx '" + id + "' has no near-NLoS reference in row " +
                                 std::to_string(scene.rx[idx].row));
            const auto ref = reference_dominant_mpcs(scene, *ref_idx, opt.max_bounces, f);
            const auto anchor = make_anchor(scene, *ref_idx, ref);
            if (!anchor.has_side(1) && !anchor.has_side(2))
                throw ModelError("synthesize: reference Rx '" + anchor.ref_rx_id + "' has no valid Wall C or Wall D path");
            Dominant d;
            d.reference_rx_id = anchor.ref_rx_id;
            for (const auto &e : evolve_dominant_mpcs(anchor, pos.d - anchor.ref_d_m, band.name, params))
            {
                d.centers.push_back(e.mpc);
                d.sides.push_back(e.side);
            }
            return d;
        }
    }

    ChannelRealization synthesize(const LShapeScene &scene, const std::string &rx_id, const BandConfig &band,
                                  const EvolveParams &params, const StatLaws &laws, std::uint64_t seed,
                                  const SynthOptions &options)
    {
        scene.validate();
        band.validate();
        laws.validate();
        const BandLaws &bl = laws.for_band(band.name);
        if (options.max_redraws < 1)
            throw ModelError("synthesize: max_redraws must be >= 1");

        const std::size_t idx = scene.rx_index(rx_id);
        const auto pos = bent_axis_distance(scene, idx);

        ChannelRealization real;
        real.rx_id = rx_id;
        real.band = band;
        real.seed = seed;
        real.region = pos.region;

        const Dominant dom = dominant_paths(scene, idx, pos, band, params, options);
        real.reference_rx_id = dom.reference_rx_id;
        const Guard guard{options.min_separation_bins * band.delay_bin_ns(), options.min_separation_deg};
        const std::span<const Mpc> centers(dom.centers);

        for (std::size_t i = 0; i < dom.centers.size(); ++i)
        {
            auto rng = cluster_stream(seed, idx, i, 1);
            for (int attempt = 0;; ++attempt)
            {
                if (attempt == options.max_redraws)
                    throw ModelError("synthesize: subpaths of RT cluster " + std::to_string(i) +
                                     " keep colliding with another RT centre");
                auto s = sample_cluster(dom.centers[i], *bl.rt, guard.delay_ns, rng);
                truncate(s, band);
                const bool clash = std::any_of(s.subpaths.begin(), s.subpaths.end(),
                                               [&](const Mpc &m) { return guard.clashes(m, centers, i); });
                if (clash)
                    continue;
                s.draw.side = dom.sides[i];
                real.clusters.push_back({ClusterKind::rt, dom.centers[i], std::move(s.subpaths)});
                real.draws.push_back(s.draw);
                break;
            }
        }

        const NonRtPlacement &pl = bl.placement;
        std::size_t count = 0;
        if (pl.mean_count > 0.0)
        {
            auto rng = cluster_stream(seed, idx, 0, 2);
            count = std::size_t(std::poisson_distribution<long>(pl.mean_count)(rng));
        }
        double strongest = -std::numeric_limits<double>::infinity();
        for (const auto &c : dom.centers)
            strongest = std::max(strongest, c.power_db);

        const std::size_t none = std::numeric_limits<std::size_t>::max();
        for (std::size_t c = 0; c < count; ++c)
        {
            auto rng = cluster_stream(seed, idx, c, 3);
            std::uniform_real_distribution<double> toa(pl.toa_min_ns, pl.toa_max_ns);
            std::uniform_real_distribution<double> aoa(pl.aoa_min_deg, pl.aoa_max_deg);
            std::uniform_real_distribution<double> pw(pl.power_min_db, pl.power_max_db);
            for (int attempt = 0;; ++attempt)
            {
                if (attempt == options.max_redraws)
                    throw ModelError("synthesize: non-RT cluster " + std::to_string(c) +
                                     " keeps colliding with an RT centre");
                Mpc center;
                center.toa_ns = toa(rng);
                center.aoa_az_deg = wrap_deg(aoa(rng));
                center.power_db = strongest + pw(rng);
                auto s = sample_cluster(center, *bl.non_rt, guard.delay_ns, rng);
                truncate(s, band);
                bool clash = guard.clashes(center, centers, none);
                for (const auto &m : s.subpaths)
                    clash = clash || guard.clashes(m, centers, none);
                if (clash)
                    continue;
                real.clusters.push_back({ClusterKind::non_rt, center, std::move(s.subpaths)});
                real.draws.push_back(s.draw);
                break;
            }
        }
        return real;
    }

    // ---------------------------------------------------------------------------------------------
    // CIR assembly

    namespace
    {
        Eigen::Index tap_index(const Mpc &m, const BandConfig &band, std::vector<std::string> &bad)
        {
            const double bin = std::round(m.toa_ns / band.delay_bin_ns());
            if (!(m.toa_ns >= 0.0) || !(bin < double(band.n_points)))
            {
                bad.push_back(std::to_string(m.toa_ns) + " ns @ " + std::to_string(m.aoa_az_deg) + " deg");
                return -1;
            }
            return Eigen::Index(bin);
        }

        std::complex<double> tap_value(const Mpc &m, double fc_hz)
        {
            const double phase = -2.0 * std::numbers::pi * fc_hz * m.toa_ns * 1e-9;
            return std::polar(std::sqrt(m.linear_power()), phase);
        }

        void throw_if_bad(const std::vector<std::string> &bad, const BandConfig &band)
        {
            if (bad.empty())
                return;
            std::string msg = "realization_to_cir: delays outside [0, " +
                              std::to_string(band.max_excess_delay_s() * 1e9) + ") ns:";
            for (const auto &b : bad)
                msg += " [" + b + "]";
            throw ModelError(msg);
        }

        std::vector<Mpc> checked_mpcs(const ChannelRealization &real)
        {
            real.band.validate();
            auto all = real.mpcs();
            if (all.empty())
                throw ModelError("realization_to_cir: empty realization");
            return all;
        }
    }

    Cir realization_to_cir(const ChannelRealization &real)
    {
        const auto all = checked_mpcs(real);
        const BandConfig &band = real.band;
        Cir cir;
        cir.bin_ns = band.delay_bin_ns();
        cir.taps = Eigen::VectorXcd::Zero(Eigen::Index(band.n_points));
        std::vector<std::string> bad;
        for (const auto &m : all)
        {
            const auto k = tap_index(m, band, bad);
            if (k >= 0)
                cir.taps(k) += tap_value(m, band.center_hz());
        }
        throw_if_bad(bad, band);
        return cir;
    }

    std::vector<Cir> realization_to_cirs(const ChannelRealization &real, const ScanGrid &grid, double gate_deg)
    {
        grid.validate();
        const auto all = checked_mpcs(real);
        const BandConfig &band = real.band;
        const std::size_t n_el = grid.elevations_deg.size();

        std::vector<Cir> cirs;
        cirs.reserve(grid.size());
        for (double az : grid.azimuths_deg)
            for (double el : grid.elevations_deg)
            {
                Cir c;
                c.az_deg = az;
                c.el_deg = el;
                c.bin_ns = band.delay_bin_ns();
                c.taps = Eigen::VectorXcd::Zero(Eigen::Index(band.n_points));
                cirs.push_back(std::move(c));
            }

        std::vector<std::string> bad;
        for (const auto &m : all)
        {
            const auto k = tap_index(m, band, bad);
            if (k < 0)
                continue;
            std::size_t ia = 0, ie = 0;
            double best_a = 1e300, best_e = 1e300;
            for (std::size_t i = 0; i < grid.azimuths_deg.size(); ++i)
            {
                const double dist = cyclic_distance_deg(m.aoa_az_deg, grid.azimuths_deg[i]);
                if (dist < best_a)
                {
                    best_a = dist;
                    ia = i;
                }
            }
            for (std::size_t i = 0; i < n_el; ++i)
            {
                const double dist = std::abs(m.aoa_el_deg - grid.elevations_deg[i]);
                if (dist < best_e)
                {
                    best_e = dist;
                    ie = i;
                }
            }
            if (best_a > gate_deg || best_e > gate_deg)
                continue;
            cirs[ia * n_el + ie].taps(k) += tap_value(m, band.center_hz());
        }
        throw_if_bad(bad, band);
        return cirs;
    }

    // ---------------------------------------------------------------------------------------------
    // Law fitting

    namespace
    {
        LogNormalLaw fit_log(const std::vector<double> &x)
        {
            double mean = 0.0;
            for (double v : x)
                mean += std::log(v);
            mean /= double(x.size());
            double var = 0.0;
            for (double v : x)
                var += (std::log(v) - mean) * (std::log(v) - mean);
            return {mean, std::sqrt(var / double(x.size()))};
        }

        constexpr std::size_t min_clusters = 5;
    }

    StatLawFit fit_stat_laws(std::span<const Cluster> clusters, const BandLaws &base)
    {
        StatLawFit fit;
        fit.laws.placement = base.placement;
        for (const ClusterKind kind : {ClusterKind::rt, ClusterKind::non_rt})
        {
            const std::string name(to_string(kind));
            std::vector<double> counts, ds, asa;
            double decay = 0.0;
            std::size_t n_sub = 0;
            for (const auto &c : clusters)
            {
                if (c.kind != kind)
                    continue;
                if (!c.subpaths.empty())
                    counts.push_back(double(c.subpaths.size()));
                for (const auto &s : c.subpaths)
                {
                    decay += c.center.power_db - s.power_db;
                    ++n_sub;
                }
                if (c.subpaths.size() >= 2)
                {
                    const double d = rms_delay_spread(c.subpaths);
                    const double a = angular_spread(c.subpaths, AngleDomain::azimuth);
                    if (d > 0.0 && a > 0.0)
                    {
                        ds.push_back(d);
                        asa.push_back(a);
                    }
                }
            }
            if (counts.size() < min_clusters || ds.size() < min_clusters)
            {
                fit.notes.push_back(name + ": fewer than " + std::to_string(min_clusters) +
                                    " clusters with subpaths, law left unset");
                continue;
            }
            ClusterLaws law;
            law.subpath_count = fit_log(counts);
            law.delay_spread_ns = fit_log(ds);
            law.angular_spread_deg = fit_log(asa);
            law.subpath_decay_db = decay / double(n_sub);
            if (law.subpath_decay_db < 0.0)
            {
                fit.notes.push_back(name + ": subpaths stronger than centres on average, decay set to 0 dB");
                law.subpath_decay_db = 0.0;
            }
            (kind == ClusterKind::rt ? fit.laws.rt : fit.laws.non_rt) = law;
        }
        return fit;
    }
}
