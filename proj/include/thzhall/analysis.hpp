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

#ifndef THZHALL_ANALYSIS_HPP
#define THZHALL_ANALYSIS_HPP

#include <span>
#include <vector>

#include "thzhall/core.hpp"

namespace thzhall
{
    // Received power summed over delay and elevation for each scan azimuth (cyclic domain)
    struct AzimuthPowerProfile
    {
        std::vector<double> azimuths_deg;
        std::vector<double> power_dbm;

        std::size_t size() const { return azimuths_deg.size(); }
    };

    // Sums linear MPC power onto the nearest grid azimuth. Azimuths that receive nothing are set
    // to `floor_dbm`, which keeps the profile finite for the beam search.
    AzimuthPowerProfile azimuth_power_profile(std::span<const Mpc> mpcs, const ScanGrid &grid, double floor_dbm);

    struct Beam
    {
        double center_deg = 0.0;   // midpoint of the two half-prominence crossings, in [0, 360)
        double width_deg = 0.0;    // angular distance between the crossings
        double peak_dbm = 0.0;
        double prominence_db = 0.0;
        std::size_t peak_index = 0; // profile index of the local maximum
    };

    // Prominence-based beam detection on a cyclic profile.
    //
    // A candidate is a local maximum (for a plateau, its first sample). From the candidate, the
    // search walks both ways around the circle until it meets a strictly higher sample or has
    // travelled 180 deg. The minimum of each walked interval is taken; the higher of the two is the
    // reference level and the prominence is the peak height above it. Candidates with
    // prominence >= min_prominence_db are beams. The beam edges are where the profile falls to
    // half the prominence below the peak, linearly interpolated between grid samples.
    //
    // A constant profile has no candidates and yields an empty list.
    std::vector<Beam> detect_beams(const AzimuthPowerProfile &profile, double min_prominence_db = 15.0);

    struct ToaHistogram
    {
        double start_ns = 0.0;
        double bin_ns = 0.0;
        std::vector<double> density; // per-bin probability density, integrates to one

        double bin_center_ns(std::size_t i) const { return start_ns + (double(i) + 0.5) * bin_ns; }
    };

    // Probability density of MPC delays (each MPC counts once). Throws ModelError on empty input
    // or a non-positive bin width.
    ToaHistogram toa_density(std::span<const Mpc> mpcs, double bin_ns);

    // Power-weighted RMS delay spread, ns
    double rms_delay_spread(std::span<const Mpc> mpcs);

    enum class AngleDomain
    {
        azimuth,
        elevation
    };

    // Circular power-weighted spread sqrt(-2 ln |sum p e^{j phi} / sum p|), degrees
    double angular_spread(std::span<const Mpc> mpcs, AngleDomain domain);

    // Greedy power-ordered gating. The strongest unassigned MPC (ties: smaller ToA, then smaller
    // azimuth) opens a cluster and absorbs every unassigned MPC within gate_delay_ns in delay and
    // gate_angle_deg in cyclic azimuth distance of it. Clusters are returned in creation order,
    // subpaths in input order.
    std::vector<Cluster> cluster_mpcs(std::span<const Mpc> mpcs, double gate_delay_ns, double gate_angle_deg);
}

#endif
