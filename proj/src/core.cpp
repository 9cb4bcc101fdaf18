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

#include "thzhall/core.hpp"
#include "thzhall/error.hpp"

#include <cmath>
#include <string>

namespace thzhall
{
    void BandConfig::validate() const
    {
        if (!(f_stop_hz > f_start_hz))
            throw ModelError("BandConfig: f_stop must exceed f_start");
        if (n_points < 2)
            throw ModelError("BandConfig: at least two sweep points are required");
        if (!(dynamic_range_db > 0.0))
            throw ModelError("BandConfig: dynamic range must be positive");
        if (!std::isfinite(noise_floor_dbm))
            throw ModelError("BandConfig: noise floor must be finite");
    }

    BandConfig band_306_321()
    {
        BandConfig b;
        b.name = "306-321";
        b.f_start_hz = 306e9;
        b.f_stop_hz = 321e9;
        b.n_points = 6001;
        return b;
    }

    BandConfig band_356_371()
    {
        BandConfig b;
        b.name = "356-371";
        b.f_start_hz = 356e9;
        b.f_stop_hz = 371e9;
        b.n_points = 6001;
        return b;
    }

    BandConfig band_from_name(std::string_view name)
    {
        if (name == "306-321")
            return band_306_321();
        if (name == "356-371")
            return band_356_371();
        throw ModelError("unknown band '" + std::string(name) + "' (expected 306-321 or 356-371)");
    }

    void ScanGrid::validate() const
    {
        if (azimuths_deg.empty() || elevations_deg.empty())
            throw ModelError("ScanGrid: empty angle list");
        for (std::size_t i = 0; i < azimuths_deg.size(); ++i)
        {
            if (azimuths_deg[i] < 0.0 || azimuths_deg[i] >= 360.0)
                throw ModelError("ScanGrid: azimuths must lie in [0, 360)");
            if (i > 0 && !(azimuths_deg[i] > azimuths_deg[i - 1]))
                throw ModelError("ScanGrid: azimuths must be strictly increasing");
        }
        for (std::size_t i = 1; i < elevations_deg.size(); ++i)
            if (!(elevations_deg[i] > elevations_deg[i - 1]))
                throw ModelError("ScanGrid: elevations must be strictly increasing");
    }

    ScanGrid default_scan_grid()
    {
        ScanGrid g;
        for (int a = 0; a < 360; a += 10)
            g.azimuths_deg.push_back(a);
        for (int e = -20; e <= 20; e += 10)
            g.elevations_deg.push_back(e);
        return g;
    }

    std::string_view to_string(ClusterKind kind)
    {
        return kind == ClusterKind::rt ? "rt" : "non-rt";
    }

    std::string_view to_string(RxRegion region)
    {
        switch (region)
        {
        case RxRegion::los:
            return "los";
        case RxRegion::corner:
            return "corner";
        case RxRegion::near_nlos:
            return "near-nlos";
        case RxRegion::far_nlos:
            return "far-nlos";
        }
        return "unknown";
    }

    void LShapeScene::validate() const
    {
        if (!(los_corridor_width > 0.0) || !(nlos_corridor_width > 0.0))
            throw ModelError("scene '" + name + "': corridor widths must be positive");
        if (!(d1 < d2) || !(d2 <= d3))
            throw ModelError("scene '" + name + "': expected d1 < d2 <= d3");
        for (const auto &w : walls)
        {
            if (!(w.length() > 0.0))
                throw ModelError("scene '" + name + "': wall '" + w.name + "' has zero length");
            if (!std::isfinite(w.reflection_loss_db))
                throw ModelError("scene '" + name + "': wall '" + w.name + "' has a non-finite loss");
        }
        for (std::size_t i = 0; i < rx.size(); ++i)
            for (std::size_t j = i + 1; j < rx.size(); ++j)
                if (rx[i].id == rx[j].id)
                    throw ModelError("scene '" + name + "': duplicate Rx id '" + rx[i].id + "'");
    }

    std::size_t LShapeScene::rx_index(std::string_view id) const
    {
        for (std::size_t i = 0; i < rx.size(); ++i)
            if (rx[i].id == id)
                return i;
        throw ModelError("scene '" + name + "': no Rx with id '" + std::string(id) + "'");
    }

    BentAxisPosition bent_axis_distance(const LShapeScene &scene, const Point2 &position)
    {
        BentAxisPosition p;
        p.d_x = scene.axis_x - position.x();
        p.d_y = position.y() - scene.axis_origin_y;

        if (p.d_x < scene.los_corridor_width)
        {
            // Inside the LoS corridor footprint
            p.d = p.d_y;
            p.region = p.d <= scene.d1 ? RxRegion::los : RxRegion::corner;
            return p;
        }

        p.d = p.d_x + scene.d1;
        if (p.d < scene.d2)
            p.region = RxRegion::corner;
        else if (p.d <= scene.d3)
            p.region = RxRegion::near_nlos;
        else
            p.region = RxRegion::far_nlos;
        return p;
    }

    BentAxisPosition bent_axis_distance(const LShapeScene &scene, std::size_t rx_index)
    {
        if (rx_index >= scene.rx.size())
            throw ModelError("bent_axis_distance: Rx index " + std::to_string(rx_index) + " out of range");
        return bent_axis_distance(scene, scene.rx[rx_index].position);
    }

    namespace
    {
        Wall make_wall(std::string name, double ax, double ay, double bx, double by, double loss)
        {
            return Wall{std::move(name), Point2(ax, ay), Point2(bx, by), loss};
        }
    }

    LShapeScene indoor_l_scene(double wall_loss_db, double metal_door_loss_db)
    {
        LShapeScene s;
        s.name = "indoor-l-hallway";
        s.los_corridor_width = 2.97;
        s.nlos_corridor_width = 7.0;
        s.d1 = 22.09;
        s.d2 = 25.06;
        s.d3 = 31.68; // between the third (8.69 m) and fourth (10.49 m) NLoS Rx of each row
        s.axis_x = 0.0;
        s.axis_origin_y = 0.0;

        const double w = s.los_corridor_width;
        const double y_a = -3.0;                              // 3 m extension behind the Tx
        const double y_d = s.d1;                              // Wall D, south wall of the NLoS corridor
        const double y_c = s.d1 + s.nlos_corridor_width;      // Wall C, north wall
        const double y_b = y_a + 32.53;                       // A-B corridor length
        const double x_end = -60.0;

        s.walls = {
            make_wall("A", -w, y_a, 0.0, y_a, metal_door_loss_db),
            make_wall("B", -w, y_b, 0.0, y_b, metal_door_loss_db),
            make_wall("E", 0.0, y_a, 0.0, y_b, wall_loss_db), // outer edge of the LoS corridor
            make_wall("W1", -w, y_a, -w, y_d, wall_loss_db),
            make_wall("W2", -w, y_c, -w, y_b, wall_loss_db),
            make_wall("D", x_end, y_d, -w, y_d, wall_loss_db),
            make_wall("C", x_end, y_c, -w, y_c, wall_loss_db),
        };

        s.tx_position = Point2(-0.5 * w, 0.0);

        int n = 1;
        for (double y : {7.8, 12.0, 16.0, 20.0})
            s.rx.push_back({"Rx" + std::to_string(n++), Point2(-0.5 * w, y), 0});

        const double offsets[] = {5.09, 6.89, 8.69, 10.49, 13.49, 15.29, 18.30};
        const double row_y[] = {y_c - 2.0, y_c - 4.5}; // 2 m and 4.5 m from Wall C
        for (int row = 1; row <= 2; ++row)
            for (double off : offsets)
                s.rx.push_back({"Rx" + std::to_string(n++), Point2(s.axis_x - off, row_y[row - 1]), row});
        return s;
    }

    LShapeScene long_corridor_scene(double wall_loss_db, double metal_door_loss_db)
    {
        // End-wall positions are chosen so that the B-A-B triple reflection between Tx and Rx is
        // 2 * 32.53 + 25.93 + 18.13 = 109.12 m long.
        LShapeScene s;
        s.name = "long-corridor";
        s.los_corridor_width = 2.97;
        s.nlos_corridor_width = 2.97;
        s.d1 = 25.93;
        s.d2 = 28.9;
        s.d3 = 28.9;
        s.axis_x = 1.485;
        s.axis_origin_y = 0.0;

        const double h = 1.485;
        const double y_a = -6.6;
        const double y_b = 25.93;
        s.walls = {
            make_wall("A", -h, y_a, h, y_a, metal_door_loss_db),
            make_wall("B", -h, y_b, h, y_b, metal_door_loss_db),
            make_wall("E", h, y_a, h, y_b, wall_loss_db),
            make_wall("W", -h, y_a, -h, y_b, wall_loss_db),
        };
        s.tx_position = Point2(0.0, 0.0);
        s.rx.push_back({"Rx1", Point2(0.0, 7.8), 0});
        return s;
    }

    LShapeScene outdoor_l_scene(double wall_loss_db)
    {
        LShapeScene s;
        s.name = "outdoor-l-street";
        s.d1 = 30.36;
        s.d2 = 39.59;
        s.los_corridor_width = s.d2 - s.d1;
        s.nlos_corridor_width = 15.0;
        s.d3 = s.d1 + 17.0;
        s.axis_x = 0.0;
        s.axis_origin_y = 0.0;

        const double w = s.los_corridor_width;
        const double y_d = s.d1;
        const double y_c = s.d1 + s.nlos_corridor_width;
        s.walls = {
            make_wall("E", 0.0, -10.0, 0.0, y_c + 20.0, wall_loss_db),
            make_wall("W1", -w, -10.0, -w, y_d, wall_loss_db),
            make_wall("W2", -w, y_c, -w, y_c + 20.0, wall_loss_db),
            make_wall("D", -120.0, y_d, -w, y_d, wall_loss_db),
            make_wall("C", -120.0, y_c, -w, y_c, wall_loss_db),
        };
        s.tx_position = Point2(-0.5 * w, 0.0);
        int n = 11;
        for (double off : {11.67, 13.30, 16.31, 18.27, 21.27, 23.27})
            s.rx.push_back({"Rx" + std::to_string(n++), Point2(s.axis_x - off, y_c - 5.0), 1});
        return s;
    }

    void add_notch(LShapeScene &scene, std::string_view wall_name, const Point2 &center, double width,
                   double depth, const Point2 &inside)
    {
        if (!(width > 0.0) || !(depth > 0.0))
            throw ModelError("add_notch: width and depth must be positive");

        for (std::size_t i = 0; i < scene.walls.size(); ++i)
        {
            const Wall w = scene.walls[i];
            if (w.name != wall_name)
                continue;
            const Point2 dir = (w.b - w.a) / w.length();
            const double t_center = (center - w.a).dot(dir);
            const double off_line = std::abs((center - w.a).x() * dir.y() - (center - w.a).y() * dir.x());
            if (off_line > 1e-9 || t_center - 0.5 * width <= 0.0 || t_center + 0.5 * width >= w.length())
                continue;

            Point2 normal(-dir.y(), dir.x());
            if (normal.dot(inside - w.a) > 0.0)
                normal = -normal;

            const Point2 p1 = w.a + dir * (t_center - 0.5 * width);
            const Point2 p2 = w.a + dir * (t_center + 0.5 * width);
            const Point2 q1 = p1 + normal * depth;
            const Point2 q2 = p2 + normal * depth;

            std::vector<Wall> pieces = {
                {w.name, w.a, p1, w.reflection_loss_db},
                {w.name, p1, q1, w.reflection_loss_db},
                {w.name, q1, q2, w.reflection_loss_db},
                {w.name, q2, p2, w.reflection_loss_db},
                {w.name, p2, w.b, w.reflection_loss_db},
            };
            scene.walls.erase(scene.walls.begin() + std::ptrdiff_t(i));
            scene.walls.insert(scene.walls.begin() + std::ptrdiff_t(i), pieces.begin(), pieces.end());
            return;
        }
        throw ModelError("add_notch: no segment of wall '" + std::string(wall_name) + "' contains the notch");
    }
}
