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

#ifndef THZHALL_EVOLVE_HPP
#define THZHALL_EVOLVE_HPP

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thzhall/core.hpp"
#include "thzhall/raytrace.hpp"

// Evolution of the two dominant NLoS paths (side 1 via Wall C, side 2 via Wall D) as the Rx
// walks away from a near-NLoS reference Rx of the same row.
//
// Geometry, in the frame of the reference Rx (east = towards the corner):
//   the last interaction point of side p sits on its wall at distance h_p from the Rx and at an
//   eastward offset D_ref = h_p * tan(phi_ref) (side 1) or h_p * tan(180 - phi_ref) (side 2).
//   After the Rx moves by dd away from the corner the interaction point has drifted by
//   dL = k * dd in the same direction, so the eastward offset becomes D = dd - dL + D_ref and
//   phi_1 = 90 - atan(h / D), phi_2 = 90 + atan(h / D).

namespace thzhall
{
    struct LinearLaw
    {
        double slope = 0.0;
        double offset = 0.0;

        double operator()(double x) const { return slope * x + offset; }
        bool operator==(const LinearLaw &) const = default;
    };

    struct EvolveParams
    {
        double k = 0.75;                          // interaction-point drift per metre of Rx displacement
        std::map<std::string, LinearLaw> power_db; // per band name, in dB vs dd [m]
        std::map<std::string, LinearLaw> delay_ns; // per band name, in ns vs dd [m]

        bool operator==(const EvolveParams &) const = default;

        // Measured indoor-hallway fits for the 306-321 and 356-371 GHz bands
        static EvolveParams defaults();
    };

    // dL = k * dd, through the origin. Throws ModelError for dd < 0.
    double interaction_drift(double delta_d, double k);

    // Throws ModelError for dd < 0, side not in {1, 2}, h <= 0 or when the drifted interaction point
    // is no longer ahead of the Rx (D <= 0).
    double evolved_aoa(double wall_distance_m, double phi_ref_deg, double delta_d, double k, int side);

    // Linear power / delay law of the band. Throws ModelError for dd < 0 or a band without a law.
    double evolved_power(double delta_d, const std::string &band, const EvolveParams &params = EvolveParams::defaults());
    double evolved_delay(double delta_d, const std::string &band, const EvolveParams &params = EvolveParams::defaults());

    struct ReferenceAnchor
    {
        std::string ref_rx_id;
        int row = 0;
        Point2 ref_position = Point2::Zero();
        double ref_d_m = 0.0;                            // bent-axis distance of the reference Rx
        std::array<double, 2> wall_distance_m = {0, 0};  // h per side (index side - 1)
        std::array<std::optional<double>, 2> phi_ref_deg;
        std::array<std::optional<Point2>, 2> interaction_point; // initial interaction point per side

        bool has_side(int side) const { return phi_ref_deg[std::size_t(side - 1)].has_value(); }
    };

    // Anchor from the traced reference paths of a near-NLoS Rx. h_p is the distance from the
    // reference Rx to the wall carrying the last interaction of side p.
    ReferenceAnchor make_anchor(const LShapeScene &scene, std::size_t ref_rx_index, const ReferencePaths &ref);

    // Evolved AoA of one side; throws ModelError when the side is missing from the anchor
    double evolved_aoa(const ReferenceAnchor &anchor, double delta_d, double k, int side);

    struct EvolvedPath
    {
        int side = 1;
        Mpc mpc; // elevation carried as 0 deg
    };

    // Dominant paths of every side present in the anchor, at displacement dd
    std::vector<EvolvedPath> evolve_dominant_mpcs(const ReferenceAnchor &anchor, double delta_d, const std::string &band,
                                                  const EvolveParams &params);

    // Observed dominant path at one NLoS position of the anchor's row
    struct BeamObservation
    {
        double delta_d = 0.0;
        int side = 1;
        std::optional<double> aoa_deg;  // beam centre
        std::optional<double> power_db; // strongest MPC in the beam
        std::optional<double> delay_ns;
    };

    // Inverse of the AoA law: the drift dL implied by an observed AoA
    double drift_from_aoa(double wall_distance_m, double phi_ref_deg, double delta_d, double phi_obs_deg, int side);

    struct EvolveFit
    {
        EvolveParams params;
        std::array<std::optional<double>, 2> k_per_side;
        std::vector<std::string> notes; // skipped sides and laws
    };

    // k by least squares through the origin over all usable sides (pooled), power and delay lines
    // by ordinary least squares for `band`. A side needs observations at >= 2 distinct dd (including
    // dd = 0 when present); sides without them are skipped. Throws ModelError if no side is usable.
    EvolveFit fit_evolve_params(std::span<const BeamObservation> observations, const ReferenceAnchor &anchor,
                                const std::string &band, const EvolveParams &base = EvolveParams::defaults());
}

#endif
