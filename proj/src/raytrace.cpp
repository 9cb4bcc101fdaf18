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

#include "thzhall/raytrace.hpp"
#include "thzhall/error.hpp"
#include "thzhall/pathloss.hpp"

#include <algorithm>
#include <cmath>

namespace thzhall
{
    namespace
    {
        constexpr double leg_eps = 1e-9;  // relative leg parameter excluded at both ends
        constexpr double wall_eps = 1e-12; // tolerance on the wall parameter

        double cross(const Point2 &a, const Point2 &b) { return a.x() * b.y() - a.y() * b.x(); }

        // Intersection of segment p->q with wall a->b: returns (t on p->q, s on a->b)
        std::optional<std::pair<double, double>> intersect(const Point2 &p, const Point2 &q, const Wall &w)
        {
            const Point2 r = q - p;
            const Point2 e = w.b - w.a;
            const double den = cross(r, e);
            if (std::abs(den) < 1e-15 * r.norm() * e.norm())
                return std::nullopt; // parallel
            const Point2 ap = w.a - p;
            return std::make_pair(cross(ap, e) / den, cross(ap, r) / den);
        }

        bool leg_blocked(const Point2 &p, const Point2 &q, std::span<const Wall> walls)
        {
            for (const auto &w : walls)
            {
                const auto hit = intersect(p, q, w);
                if (!hit)
                    continue;
                const auto [t, s] = *hit;
                if (t > leg_eps && t < 1.0 - leg_eps && s >= -wall_eps && s <= 1.0 + wall_eps)
                    return true;
            }
            return false;
        }

        double azimuth_of(const Point2 &v)
        {
            return wrap_deg(rad_to_deg(std::atan2(v.x(), v.y())));
        }

        // Builds the path for one wall sequence, or nothing if it is geometrically invalid
        std::optional<RayPath> build_path(std::span<const Wall> walls, const std::vector<std::size_t> &seq,
                                          const Point2 &tx, const Point2 &rx, double frequency_hz)
        {
            const std::size_t k = seq.size();
            std::vector<Point2> images(k + 1);
            images[0] = tx;
            for (std::size_t j = 0; j < k; ++j)
                images[j + 1] = mirror_point(images[j], walls[seq[j]]);

            std::vector<Point2> pts(k);
            Point2 target = rx;
            for (std::size_t j = k; j-- > 0;)
            {
                const Wall &w = walls[seq[j]];
                const auto hit = intersect(images[j + 1], target, w);
                if (!hit)
                    return std::nullopt;
                const auto [t, s] = *hit;
                if (!(t > leg_eps && t < 1.0 - leg_eps) || s < 0.0 || s > 1.0)
                    return std::nullopt;
                pts[j] = images[j + 1] + t * (target - images[j + 1]);
                target = pts[j];
            }

            Point2 from = tx;
            for (std::size_t j = 0; j < k; ++j)
            {
                if (leg_blocked(from, pts[j], walls))
                    return std::nullopt;
                from = pts[j];
            }
            if (leg_blocked(from, rx, walls))
                return std::nullopt;

            RayPath path;
            path.bounce_count = int(k);
            path.interaction_points = pts;
            path.walls = seq;
            double len = 0.0, loss = 0.0;
            from = tx;
            for (std::size_t j = 0; j < k; ++j)
            {
                len += (pts[j] - from).norm();
                loss += walls[seq[j]].reflection_loss_db;
                from = pts[j];
            }
            len += (rx - from).norm();
            path.total_length_m = len;
            path.toa_ns = meters_to_ns(len);
            path.aoa_az_deg = azimuth_of(from - rx);
            path.power_db = -(fspl_db(len, frequency_hz) + loss);
            return path;
        }

        void enumerate(std::span<const Wall> walls, std::vector<std::size_t> &seq, int remaining, const Point2 &tx,
                       const Point2 &rx, double frequency_hz, std::vector<RayPath> &out)
        {
            if (auto p = build_path(walls, seq, tx, rx, frequency_hz))
                out.push_back(std::move(*p));
            if (remaining == 0)
                return;
            for (std::size_t w = 0; w < walls.size(); ++w)
            {
                if (!seq.empty() && seq.back() == w)
                    continue;
                seq.push_back(w);
                enumerate(walls, seq, remaining - 1, tx, rx, frequency_hz, out);
                seq.pop_back();
            }
        }
    }

    Point2 mirror_point(const Point2 &p, const Wall &wall)
    {
        const Point2 u = (wall.b - wall.a).normalized();
        const Point2 foot = wall.a + (p - wall.a).dot(u) * u;
        return 2.0 * foot - p;
    }

    double distance_to_wall_line(const Point2 &p, const Wall &wall)
    {
        const Point2 u = (wall.b - wall.a).normalized();
        return std::abs(cross(u, p - wall.a));
    }

    std::vector<RayPath> trace_paths(std::span<const Wall> walls, const Point2 &tx, const Point2 &rx, int max_bounces,
                                     double frequency_hz)
    {
        if (max_bounces < 0)
            throw ModelError("trace: max_bounces must be non-negative");
        if (!(frequency_hz > 0.0))
            throw ModelError("trace: frequency must be positive");
        for (const auto &w : walls)
            if (!(w.length() > 0.0))
                throw ModelError("trace: wall '" + w.name + "' has zero length");
        if ((tx - rx).norm() == 0.0)
            throw ModelError("trace: Tx and Rx coincide");

        std::vector<RayPath> out;
        std::vector<std::size_t> seq;
        enumerate(walls, seq, max_bounces, tx, rx, frequency_hz, out);
        std::sort(out.begin(), out.end(), [](const RayPath &a, const RayPath &b)
                  {
                      if (a.total_length_m != b.total_length_m)
                          return a.total_length_m < b.total_length_m;
                      return a.walls < b.walls;
                  });
        return out;
    }

    std::vector<RayPath> trace(const LShapeScene &scene, std::size_t rx_index, int max_bounces, double frequency_hz)
    {
        scene.validate();
        if (rx_index >= scene.rx.size())
            throw ModelError("trace: Rx index out of range");
        return trace_paths(scene.walls, scene.tx_position, scene.rx[rx_index].position, max_bounces, frequency_hz);
    }

    ReferencePaths select_reference_paths(const LShapeScene &scene, std::span<const RayPath> paths)
    {
        ReferencePaths ref;
        for (const auto &p : paths)
        {
            if (p.bounce_count == 0)
                continue;
            const std::string &last = scene.walls[p.walls.back()].name;
            if (last == wall_c_name && p.aoa_az_deg >= 0.0 && p.aoa_az_deg < 90.0)
            {
                if (!ref.wall_c || p.power_db > ref.wall_c->power_db)
                    ref.wall_c = p;
            }
            else if (last == wall_d_name && p.aoa_az_deg > 90.0 && p.aoa_az_deg <= 180.0)
            {
                if (!ref.wall_d || p.power_db > ref.wall_d->power_db)
                    ref.wall_d = p;
            }
        }
        if (!ref.wall_c)
            ref.warnings.push_back("no valid reflected path via Wall C");
        if (!ref.wall_d)
            ref.warnings.push_back("no valid reflected path via Wall D");
        return ref;
    }

    ReferencePaths reference_dominant_mpcs(const LShapeScene &scene, std::size_t rx_index, int max_bounces,
                                           double frequency_hz)
    {
        const auto pos = bent_axis_distance(scene, rx_index);
        if (pos.region != RxRegion::near_nlos)
            throw ModelError("reference_dominant_mpcs: Rx '" + scene.rx[rx_index].id + "' is " +
                             std::string(to_string(pos.region)) + ", expected near-nlos");
        const auto paths = trace(scene, rx_index, max_bounces, frequency_hz);
        return select_reference_paths(scene, paths);
    }
}
