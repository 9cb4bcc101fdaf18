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

// Covered tests:
//   hand-built one-bounce image path, LoS in an empty corridor
//   long corridor end-wall triple reflection
//   unfolded-length identity, ToA = length / c, points on walls, length >= LoS distance
//   exhaustive Rx-unfolding oracle on random L-shaped scenes up to three bounces
//   reference path selection: symmetry, near-NLoS both sides, far-NLoS with few bounces, AoA geometry
//   error paths

#include "catch_amalgamated.hpp"

#include "oracles/unfold_trace.hpp"
#include "thzhall/error.hpp"
#include "thzhall/pathloss.hpp"
#include "thzhall/raytrace.hpp"

#include <algorithm>
#include <random>

using namespace thzhall;
using Catch::Matchers::WithinAbs;

namespace
{
    const double f0 = 313.5e9;

    double bearing(const Point2 &from, const Point2 &to)
    {
        return wrap_deg(rad_to_deg(std::atan2(to.x() - from.x(), to.y() - from.y())));
    }

    // L-shaped polygon: vertical leg [0, w] x [0, len], horizontal leg to the west at the top
    struct RandomL
    {
        std::vector<Wall> walls;
        Point2 tx, rx;
    };

    RandomL random_l(std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double w = 2.0 + 4.0 * u(rng), len = 15.0 + 20.0 * u(rng);
        const double v = 2.0 + 6.0 * u(rng), reach = 10.0 + 20.0 * u(rng);
        const std::vector<Point2> poly = {{0, 0}, {w, 0}, {w, len}, {-reach, len}, {-reach, len - v}, {0, len - v}};
        RandomL s;
        for (std::size_t i = 0; i < poly.size(); ++i)
            s.walls.push_back({"W" + std::to_string(i), poly[i], poly[(i + 1) % poly.size()], 3.0 + u(rng)});
        auto in_vertical = [&] { return Point2(0.05 * w + 0.9 * w * u(rng), 0.5 + (len - 1.0) * u(rng)); };
        auto in_horizontal = [&] { return Point2(-reach + 0.5 + (reach - 0.5) * u(rng), len - v + 0.05 * v + 0.9 * v * u(rng)); };
        s.tx = in_vertical();
        s.rx = u(rng) < 0.5 ? in_horizontal() : in_vertical();
        return s;
    }
}

TEST_CASE("one-bounce image construction by hand", "[raytrace]")
{
    const std::vector<Wall> walls = {{"E", {1.5, -5}, {1.5, 20}, 5.0}, {"W", {-1.5, -5}, {-1.5, 20}, 5.0}};
    const auto paths = trace_paths(walls, {0, 0}, {0, 10}, 1, f0);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0].bounce_count == 0);
    CHECK_THAT(paths[0].total_length_m, WithinAbs(10.0, 1e-12));
    CHECK_THAT(paths[0].aoa_az_deg, WithinAbs(180.0, 1e-12));

    const auto east = std::find_if(paths.begin(), paths.end(), [](const RayPath &p) { return p.walls == std::vector<std::size_t>{0}; });
    REQUIRE(east != paths.end());
    CHECK_THAT(east->total_length_m, WithinAbs(std::sqrt(109.0), 1e-12));
    CHECK_THAT(east->total_length_m, WithinAbs(10.4403, 1e-4));
    CHECK_THAT(east->interaction_points[0].x(), WithinAbs(1.5, 1e-12));
    CHECK_THAT(east->interaction_points[0].y(), WithinAbs(5.0, 1e-12));
    CHECK_THAT(east->power_db, WithinAbs(-(fspl(std::sqrt(109.0), f0) + 5.0), 1e-9));
    CHECK((mirror_point({0, 0}, walls[0]) - Point2(3, 0)).norm() < 1e-15);
}

TEST_CASE("LoS in an empty corridor", "[raytrace]")
{
    const auto paths = trace_paths(std::vector<Wall>{}, {1, 2}, {4, 6}, 3, f0);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].bounce_count == 0);
    CHECK_THAT(paths[0].total_length_m, WithinAbs(5.0, 1e-12));
    CHECK_THAT(paths[0].toa_ns, WithinAbs(meters_to_ns(5.0), 1e-12));
}

TEST_CASE("long corridor end-wall triple reflection", "[raytrace]")
{
    const auto s = long_corridor_scene();
    const auto paths = trace(s, 0, 3, f0);
    const auto it = std::find_if(paths.begin(), paths.end(), [&](const RayPath &p) {
        if (p.bounce_count != 3)
            return false;
        for (auto w : p.walls)
            if (s.walls[w].name != "A" && s.walls[w].name != "B")
                return false;
        return s.walls[p.walls.back()].name == "B";
    });
    REQUIRE(it != paths.end());
    CHECK_THAT(it->total_length_m, WithinAbs(109.12, 1e-9));
    CHECK_THAT(it->toa_ns, WithinAbs(364.0, band_306_321().delay_bin_ns()));
    CHECK(it->aoa_az_deg == 0.0);
}

TEST_CASE("path invariants on the indoor scene", "[raytrace][property]")
{
    const auto s = indoor_l_scene();
    for (std::size_t r = 0; r < s.rx.size(); ++r)
    {
        const auto paths = trace(s, r, 4, f0);
        const double los = (s.rx[r].position - s.tx_position).norm();
        for (const auto &p : paths)
        {
            // highest-order image of the Tx
            Point2 img = s.tx_position;
            for (auto w : p.walls)
                img = mirror_point(img, s.walls[w]);
            CHECK_THAT(p.total_length_m, WithinAbs((img - s.rx[r].position).norm(), 1e-9));
            CHECK(p.total_length_m >= los - 1e-12);
            CHECK(p.toa_ns == meters_to_ns(p.total_length_m));
            REQUIRE(p.interaction_points.size() == std::size_t(p.bounce_count));
            for (std::size_t j = 0; j < p.walls.size(); ++j)
            {
                const auto &w = s.walls[p.walls[j]];
                const Point2 &x = p.interaction_points[j];
                CHECK(distance_to_wall_line(x, w) < 1e-9);
                CHECK((x - w.a).norm() + (x - w.b).norm() <= w.length() + 1e-9);
            }
            const Point2 last = p.bounce_count ? p.interaction_points.back() : s.tx_position;
            CHECK(cyclic_distance_deg(p.aoa_az_deg, bearing(s.rx[r].position, last)) < 1e-9);
        }
    }
}

TEST_CASE("trace equals the exhaustive unfolding oracle", "[raytrace][oracle]")
{
    std::mt19937_64 rng(77);
    for (int scene = 0; scene < 30; ++scene)
    {
        const auto s = random_l(rng);
        std::vector<oracle::Seg> segs;
        for (const auto &w : s.walls)
            segs.push_back({{w.a.x(), w.a.y()}, {w.b.x(), w.b.y()}});
        auto want = oracle::enumerate_paths(segs, {s.tx.x(), s.tx.y()}, {s.rx.x(), s.rx.y()}, 3);
        auto got = trace_paths(s.walls, s.tx, s.rx, 3, f0);
        std::sort(want.begin(), want.end(), [](const auto &a, const auto &b) { return a.walls < b.walls; });
        std::sort(got.begin(), got.end(), [](const auto &a, const auto &b) { return a.walls < b.walls; });
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
        {
            CHECK(got[i].walls == want[i].walls);
            CHECK_THAT(got[i].total_length_m, WithinAbs(want[i].length, 1e-9));
            CHECK(cyclic_distance_deg(got[i].aoa_az_deg, want[i].aoa_deg) < 1e-9);
        }
    }
}

TEST_CASE("reference paths on a symmetric toy scene are mirror images", "[raytrace][reference]")
{
    LShapeScene s;
    s.walls = {{"C", {-30, 1.5}, {30, 1.5}, 5.0}, {"D", {-30, -1.5}, {30, -1.5}, 5.0}};
    s.tx_position = Point2(20.0, 0.0);
    const auto paths = trace_paths(s.walls, s.tx_position, {0.0, 0.0}, 2, f0);
    const auto ref = select_reference_paths(s, paths);
    REQUIRE(ref.wall_c);
    REQUIRE(ref.wall_d);
    CHECK(ref.warnings.empty());
    CHECK_THAT(ref.wall_c->aoa_az_deg + ref.wall_d->aoa_az_deg, WithinAbs(180.0, 1e-9));
    CHECK(ref.wall_c->bounce_count == 1);
}

TEST_CASE("reference paths in the indoor scene", "[raytrace][reference]")
{
    const auto s = indoor_l_scene();
    for (const char *id : {"Rx5", "Rx6", "Rx7", "Rx12", "Rx13", "Rx14"})
    {
        const auto ref = reference_dominant_mpcs(s, s.rx_index(id), 6, f0);
        REQUIRE(ref.wall_c);
        REQUIRE(ref.wall_d);
        CHECK(ref.wall_c->aoa_az_deg >= 0.0);
        CHECK(ref.wall_c->aoa_az_deg < 90.0);
        CHECK(ref.wall_d->aoa_az_deg > 90.0);
        CHECK(ref.wall_d->aoa_az_deg <= 180.0);
        for (const auto *p : {&*ref.wall_c, &*ref.wall_d})
            CHECK(cyclic_distance_deg(p->aoa_az_deg, bearing(s.rx[s.rx_index(id)].position, p->interaction_points.back())) <
                  1e-9);
    }

    // only near-NLoS positions are accepted
    CHECK_THROWS_AS(reference_dominant_mpcs(s, s.rx_index("Rx1"), 6, f0), ModelError);
    CHECK_THROWS_AS(reference_dominant_mpcs(s, s.rx_index("Rx11"), 6, f0), ModelError);

    // far NLoS with a tight bounce budget loses at least one side
    const auto far = select_reference_paths(s, trace(s, s.rx_index("Rx11"), 1, f0));
    CHECK((!far.wall_c || !far.wall_d));
    CHECK_FALSE(far.warnings.empty());
}

TEST_CASE("trace errors", "[raytrace]")
{
    auto s = indoor_l_scene();
    s.nlos_corridor_width = 0.0;
    CHECK_THROWS_AS(trace(s, 0, 2, f0), ModelError);
    const std::vector<Wall> w = {{"X", {0, 0}, {0, 0}, 1.0}};
    CHECK_THROWS_AS(trace_paths(w, {1, 1}, {2, 2}, 1, f0), ModelError);
    CHECK_THROWS_AS(trace_paths(std::vector<Wall>{}, {1, 1}, {2, 2}, -1, f0), ModelError);
    CHECK_THROWS_AS(trace_paths(std::vector<Wall>{}, {1, 1}, {1, 1}, 1, f0), ModelError);
}
