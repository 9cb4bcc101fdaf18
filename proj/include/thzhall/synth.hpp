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

#ifndef THZHALL_SYNTH_HPP
#define THZHALL_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "thzhall/core.hpp"
#include "thzhall/evolve.hpp"
#include "thzhall/sounding.hpp"

namespace thzhall
{
    // Log-normal law: ln X ~ N(mu, sigma^2), natural logarithm
    struct LogNormalLaw
    {
        double mu = 0.0;
        double sigma = 0.0;

        double median() const { return std::exp(mu); }
        double cdf(double x) const;
        double sample(std::mt19937_64 &rng) const;
        void validate(const char *what) const; // sigma >= 0, finite

        bool operator==(const LogNormalLaw &) const = default;
    };

    // Intra-cluster laws of one cluster kind
    struct ClusterLaws
    {
        LogNormalLaw subpath_count;      // rounded to the nearest integer >= 0
        LogNormalLaw delay_spread_ns;    // RMS delay spread over the subpaths
        LogNormalLaw angular_spread_deg; // circular azimuth spread over the subpaths
        double subpath_decay_db = 6.0;   // subpath power = centre power - Exp(mean subpath_decay_db)

        void validate(const char *what) const;
        bool operator==(const ClusterLaws &) const = default;
    };

    // Placement of non-RT clusters
    struct NonRtPlacement
    {
        double mean_count = 4.0; // Poisson mean
        double toa_min_ns = 65.0;
        double toa_max_ns = 200.0;
        double aoa_min_deg = 0.0;
        double aoa_max_deg = 180.0;
        double power_min_db = -20.0; // relative to the strongest RT centre
        double power_max_db = -8.0;

        void validate() const;
        bool operator==(const NonRtPlacement &) const = default;
    };

    struct BandLaws
    {
        std::optional<ClusterLaws> rt;
        std::optional<ClusterLaws> non_rt;
        NonRtPlacement placement;

        bool operator==(const BandLaws &) const = default;
    };

    struct StatLaws
    {
        std::map<std::string, BandLaws> bands; // keyed by band name

        // Throws ModelError when the band has no entry or a kind is unset
        const BandLaws &for_band(const std::string &band) const;
        void validate() const;

        bool operator==(const StatLaws &) const = default;

        // Placeholder values for both bands (illustrative, not fitted to measurements)
        static StatLaws illustrative();
    };

    // What was drawn for one cluster
    struct ClusterDraw
    {
        int side = 0;                 // 1 / 2 for NLoS RT clusters (Wall C / Wall D), 0 otherwise
        std::size_t subpath_count = 0;
        double delay_spread_ns = 0.0; // sampled targets; realised exactly when subpath_count >= 2
        double angular_spread_deg = 0.0;
        bool truncated = false; // subpaths beyond the delay window were dropped

        bool operator==(const ClusterDraw &) const = default;
    };

    struct ChannelRealization
    {
        std::string rx_id;
        BandConfig band;
        std::uint64_t seed = 0;
        RxRegion region = RxRegion::los;
        std::string reference_rx_id; // far-NLoS only
        std::vector<Cluster> clusters;
        std::vector<ClusterDraw> draws; // parallel to clusters

        std::vector<Mpc> mpcs() const;     // centres followed by subpaths, cluster by cluster
        double total_linear_power() const; // sum over all MPCs
        std::size_t rt_cluster_count() const;
    };

    struct SynthOptions
    {
        int max_bounces = 6;
        double min_separation_bins = 1.5; // delay guard around every RT centre, in delay bins
        double min_separation_deg = 10.0; // azimuth guard around every RT centre
        int max_redraws = 100;
    };

    // Hybrid realisation for one Rx of the scene.
    //   LoS / corner: every traced path inside the delay window and within the band's dynamic range
    //   is an RT cluster centre.
    //   near-NLoS: the traced Wall C / Wall D reference paths.
    //   far-NLoS: the dominant paths evolved from the nearest-to-corner near-NLoS Rx of the same row.
    // Each RT cluster gets statistical subpaths; Poisson-many non-RT clusters are added. Subpaths past
    // the delay window are dropped and the cluster is marked truncated.
    // Deterministic in (seed, rx); every cluster uses its own random stream.
    // Throws ModelError for far-NLoS without a usable reference, or invalid laws.
    ChannelRealization synthesize(const LShapeScene &scene, const std::string &rx_id, const BandConfig &band,
                                  const EvolveParams &params, const StatLaws &laws, std::uint64_t seed,
                                  const SynthOptions &options = {});

    // Subpaths of one cluster: exponential delay offsets after `min_excess_ns` and Laplacian
    // azimuth offsets, rescaled so that the subpaths' RMS delay spread and circular azimuth spread
    // equal the drawn targets. Shapes whose largest offset exceeds 20 times the target are redrawn.
    // Elevation is carried as 0.
    struct ClusterSample
    {
        std::vector<Mpc> subpaths;
        ClusterDraw draw;
    };
    ClusterSample sample_cluster(const Mpc &center, const ClusterLaws &laws, double min_excess_ns,
                                 std::mt19937_64 &rng);

    // Random stream for (seed, rx index, cluster index, purpose tag)
    std::mt19937_64 cluster_stream(std::uint64_t seed, std::uint64_t rx, std::uint64_t cluster, std::uint64_t tag);

    // Every MPC as tap amplitude * exp(-j 2 pi f_c tau) at bin round(tau / bin). Omni: one CIR.
    // Throws ModelError on an empty realisation or delays beyond the maximum excess delay.
    Cir realization_to_cir(const ChannelRealization &real);

    // One CIR per scan direction; an MPC goes to the nearest grid direction when it lies within
    // `gate_deg` of it in azimuth and elevation, and is dropped otherwise.
    std::vector<Cir> realization_to_cirs(const ChannelRealization &real, const ScanGrid &grid, double gate_deg = 8.0);

    struct StatLawFit
    {
        BandLaws laws;
        std::vector<std::string> notes;
    };

    // Log-domain mean / standard deviation (maximum likelihood) per quantity and cluster kind.
    // Counts use clusters with >= 1 subpath, spreads clusters with >= 2. A kind with fewer than
    // 5 usable clusters keeps its law unset. Placement is copied from `base`.
    StatLawFit fit_stat_laws(std::span<const Cluster> clusters, const BandLaws &base = {});
}

#endif
