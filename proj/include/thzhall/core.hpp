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

#ifndef THZHALL_CORE_HPP
#define THZHALL_CORE_HPP

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "thzhall/units.hpp"

namespace thzhall
{
    using Point2 = Eigen::Vector2d;

    // ---------------------------------------------------------------------------------------------
    // Sounder band

    struct BandConfig
    {
        std::string name = "custom";    // "306-321", "356-371" or "custom"
        double f_start_hz = 0.0;        // First sweep frequency
        double f_stop_hz = 0.0;         // Last sweep frequency
        std::size_t n_points = 0;       // Sweep points, including both ends
        double if_freq_hz = 7.6e6;      // Informational
        double tx_gain_db = 7.0;        // Tx horn gain
        double rx_gain_db = 25.0;       // Rx horn gain
        double noise_floor_dbm = -180.0;
        double dynamic_range_db = 30.0;

        double span_hz() const { return f_stop_hz - f_start_hz; }
        double step_hz() const { return span_hz() / double(n_points - 1); }
        double center_hz() const { return 0.5 * (f_start_hz + f_stop_hz); }
        double frequency_hz(std::size_t k) const { return f_start_hz + double(k) * step_hz(); }

        // Nominal time resolution 1/span, seconds
        double time_resolution_s() const { return 1.0 / span_hz(); }

        // Maximum excess delay 1/step, seconds
        double max_excess_delay_s() const { return 1.0 / step_hz(); }

        double max_path_length_m() const { return speed_of_light * max_excess_delay_s(); }

        // Width of one IDFT delay bin, 1/(N*step). Differs from the nominal
        // resolution 1/span by the factor (N-1)/N.
        double delay_bin_ns() const { return max_excess_delay_s() / double(n_points) * 1e9; }

        double cascaded_antenna_gain_db() const { return tx_gain_db + rx_gain_db; }

        void validate() const; // Throws ModelError
    };

    BandConfig band_306_321();
    BandConfig band_356_371();

    // Accepts "306-321", "356-371"; throws ModelError otherwise
    BandConfig band_from_name(std::string_view name);

    // ---------------------------------------------------------------------------------------------
    // Rx scan directions

    struct ScanGrid
    {
        std::vector<double> azimuths_deg;   // strictly increasing in [0, 360)
        std::vector<double> elevations_deg; // strictly increasing

        std::size_t size() const { return azimuths_deg.size() * elevations_deg.size(); }
        void validate() const;
    };

    // 0:10:350 deg azimuth, -20:10:20 deg elevation
    ScanGrid default_scan_grid();

    // ---------------------------------------------------------------------------------------------
    // Multipath components and clusters

    struct Mpc
    {
        double toa_ns = 0.0;
        double aoa_az_deg = 0.0;
        double aoa_el_deg = 0.0;
        double power_db = 0.0; // received power in dBm for 0 dBm transmit power, i.e. -PL

        double linear_power() const { return db_to_linear(power_db); }

        bool operator==(const Mpc &) const = default;
    };

    enum class ClusterKind
    {
        rt,
        non_rt
    };

    std::string_view to_string(ClusterKind kind);

    struct Cluster
    {
        ClusterKind kind = ClusterKind::non_rt;
        Mpc center;
        std::vector<Mpc> subpaths;

        bool operator==(const Cluster &) const = default;
    };

    // ---------------------------------------------------------------------------------------------
    // L-shaped scene (plan view)
    //
    // Frame: x east, y north. The LoS corridor runs along +y; its outer (east) edge is the line
    // x = axis_x. The NLoS corridor branches off towards -x. The bent distance axis starts at the
    // projection of the Tx onto the outer edge (y = axis_origin_y), runs north to d1 and then turns
    // west; d = d_y in the LoS leg and d = d_x + d1 in the NLoS leg, with d_x = axis_x - x.

    struct Wall
    {
        std::string name;          // Several segments may share a name (e.g. a notched wall)
        Point2 a = Point2::Zero(); // Segment end points
        Point2 b = Point2::Zero();
        double reflection_loss_db = 0.0;

        double length() const { return (b - a).norm(); }
    };

    struct RxSite
    {
        std::string id;
        Point2 position = Point2::Zero();
        int row = 0; // NLoS row index, 0 when not applicable
    };

    struct LShapeScene
    {
        std::string name;
        double los_corridor_width = 0.0;
        double nlos_corridor_width = 0.0;
        std::vector<Wall> walls;
        Point2 tx_position = Point2::Zero();
        std::vector<RxSite> rx;
        double tx_height = 2.0;  // informational
        double rx_height = 1.75; // informational
        double d1 = 0.0;
        double d2 = 0.0;
        double d3 = 0.0;
        double axis_x = 0.0;
        double axis_origin_y = 0.0;

        // Throws ModelError on inconsistent geometry (d ordering, non-positive widths, empty walls)
        void validate() const;

        // Throws ModelError if the id is unknown
        std::size_t rx_index(std::string_view id) const;
    };

    enum class RxRegion
    {
        los,
        corner, // between d1 and d2, not covered by the model
        near_nlos,
        far_nlos
    };

    std::string_view to_string(RxRegion region);

    struct BentAxisPosition
    {
        double d = 0.0;   // distance along the bent axis
        double d_x = 0.0; // axis_x - x
        double d_y = 0.0; // y - axis_origin_y
        RxRegion region = RxRegion::los;

        bool is_nlos() const { return region == RxRegion::near_nlos || region == RxRegion::far_nlos; }
    };

    BentAxisPosition bent_axis_distance(const LShapeScene &scene, const Point2 &position);
    BentAxisPosition bent_axis_distance(const LShapeScene &scene, std::size_t rx_index);

    // Default geometries. Dimensions follow the measured deployment: 2.97 m / 7 m corridor widths,
    // d1 = 22.09 m, d2 = 25.06 m, NLoS rows at d - d1 = 5.09 ... 18.30 m.
    LShapeScene indoor_l_scene(double wall_loss_db = 5.0, double metal_door_loss_db = 1.0);

    // Straight 2.97 m x 32.53 m corridor with metal end walls A and B, one Tx and one Rx 7.8 m apart
    LShapeScene long_corridor_scene(double wall_loss_db = 5.0, double metal_door_loss_db = 1.0);

    // Outdoor street constants (d1 = 30.36 m, d2 = 39.59 m) with NLoS Rx at the measured d - d1
    LShapeScene outdoor_l_scene(double wall_loss_db = 8.0);

    // Splits every segment of the named wall that contains [center - width/2, center + width/2]
    // and inserts a rectangular notch of the given depth, pushed away from `inside`.
    void add_notch(LShapeScene &scene, std::string_view wall_name, const Point2 &center, double width,
                   double depth, const Point2 &inside);
}

#endif
