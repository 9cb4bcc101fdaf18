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

#ifndef THZHALL_RAYTRACE_HPP
#define THZHALL_RAYTRACE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thzhall/core.hpp"

namespace thzhall
{
    // One specular propagation path (LoS when bounce_count == 0)
    struct RayPath
    {
        int bounce_count = 0;
        std::vector<Point2> interaction_points; // in propagation order, Tx side first
        std::vector<std::size_t> walls;         // wall index of each interaction
        double total_length_m = 0.0;
        double aoa_az_deg = 0.0; // direction from the Rx towards the last interaction point (or the Tx)
        double power_db = 0.0;   // -(FSPL(total_length) + sum of per-bounce losses), antenna gains excluded
        double toa_ns = 0.0;     // total_length / c

        Mpc as_mpc() const { return Mpc{toa_ns, aoa_az_deg, 0.0, power_db}; }
    };

    // Mirror image of p across the infinite line through wall a-b
    Point2 mirror_point(const Point2 &p, const Wall &wall);

    // Image-method enumeration of all specular paths with up to max_bounces wall reflections.
    // A path is kept when every reflection point lies on its wall segment and no leg is cut by
    // any wall. Paths are sorted by length, then by wall sequence.
    // Throws ModelError for negative max_bounces, zero-length walls or non-positive frequency.
    std::vector<RayPath> trace_paths(std::span<const Wall> walls, const Point2 &tx, const Point2 &rx, int max_bounces,
                                     double frequency_hz);

    // Traces Tx -> scene.rx[rx_index]. Validates the scene first (zero-width corridors are rejected).
    std::vector<RayPath> trace(const LShapeScene &scene, std::size_t rx_index, int max_bounces, double frequency_hz);

    // Strongest reflected paths whose last interaction is on Wall C (AoA in [0, 90)) and on
    // Wall D (AoA in (90, 180]). A side without a valid path is left empty and reported in `warnings`.
    struct ReferencePaths
    {
        std::optional<RayPath> wall_c;
        std::optional<RayPath> wall_d;
        std::vector<std::string> warnings;

        const std::optional<RayPath> &side(int p) const { return p == 1 ? wall_c : wall_d; }
    };

    inline constexpr const char *wall_c_name = "C";
    inline constexpr const char *wall_d_name = "D";

    // Throws ModelError unless the Rx is in the near-NLoS region
    ReferencePaths reference_dominant_mpcs(const LShapeScene &scene, std::size_t rx_index, int max_bounces,
                                           double frequency_hz);

    // Selection rule on an existing path list (no region check)
    ReferencePaths select_reference_paths(const LShapeScene &scene, std::span<const RayPath> paths);

    // Perpendicular distance from p to the infinite line through the wall
    double distance_to_wall_line(const Point2 &p, const Wall &wall);
}

#endif
