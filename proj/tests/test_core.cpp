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
//   band grid identities, band lookup, validation
//   scan grid defaults and validation
//   bent-axis distance examples and region classification
//   bent-axis monotonicity along both corridors
//   scene validation and notches

#include "catch_amalgamated.hpp"

#include "thzhall/core.hpp"
#include "thzhall/error.hpp"

#include <random>

using namespace thzhall;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("band grid matches the sounder table", "[core][band]")
{
    for (const auto &b : {band_306_321(), band_356_371()})
    {
        CHECK(b.n_points == 6001);
        CHECK_THAT(b.span_hz(), WithinRel(15e9, 1e-12));
        CHECK_THAT(b.time_resolution_s() * 1e12, WithinRel(66.7, 1e-3));
        CHECK_THAT(b.max_excess_delay_s() * 1e9, WithinRel(400.0, 1e-3));
        CHECK_THAT(b.max_path_length_m(), WithinRel(120.0, 1e-3));
        CHECK_THAT(b.delay_bin_ns() * double(b.n_points), WithinRel(b.max_excess_delay_s() * 1e9, 1e-12));
        CHECK(b.cascaded_antenna_gain_db() == 32.0);
        CHECK(b.noise_floor_dbm == -180.0); // wide corridor; the long LoS corridor sits at -165
    }
    CHECK(band_306_321().center_hz() == 313.5e9);
    CHECK(band_356_371().center_hz() == 363.5e9);
    CHECK(band_306_321().frequency_hz(6000) == 321e9);
}

TEST_CASE("band lookup by name", "[core][band]")
{
    CHECK(band_from_name("356-371").f_start_hz == 356e9);
    CHECK_THROWS_AS(band_from_name("300-400"), ModelError);

    BandConfig b = band_306_321();
    b.n_points = 1;
    CHECK_THROWS_AS(b.validate(), ModelError);
    b = band_306_321();
    b.f_stop_hz = b.f_start_hz;
    CHECK_THROWS_AS(b.validate(), ModelError);
}

TEST_CASE("default scan grid", "[core][grid]")
{
    const auto g = default_scan_grid();
    REQUIRE(g.azimuths_deg.size() == 36);
    REQUIRE(g.elevations_deg.size() == 5);
    CHECK(g.azimuths_deg.front() == 0.0);
    CHECK(g.azimuths_deg.back() == 350.0);
    CHECK(g.elevations_deg.front() == -20.0);
    CHECK(g.size() == 180);
    CHECK_NOTHROW(g.validate());

    ScanGrid bad = g;
    bad.azimuths_deg.push_back(360.0);
    CHECK_THROWS_AS(bad.validate(), ModelError);
    bad = g;
    std::swap(bad.elevations_deg[0], bad.elevations_deg[1]);
    CHECK_THROWS_AS(bad.validate(), ModelError);
}

TEST_CASE("bent-axis distance examples", "[core][scene]")
{
    const auto indoor = indoor_l_scene();
    const auto p = bent_axis_distance(indoor, indoor.rx_index("Rx5"));
    CHECK_THAT(p.d, WithinAbs(27.18, 1e-9));
    CHECK(p.region == RxRegion::near_nlos);
    CHECK(p.is_nlos());

    // Tx projection on the outer edge
    CHECK_THAT(bent_axis_distance(indoor, Point2(-0.5, 0.0)).d, WithinAbs(0.0, 1e-12));

    const auto outdoor = outdoor_l_scene();
    CHECK_THAT(bent_axis_distance(outdoor, outdoor.rx_index("Rx11")).d, WithinAbs(42.03, 1e-9));
    CHECK(outdoor.d1 == 30.36);
    CHECK(outdoor.d2 == 39.59);
}

TEST_CASE("region classification of the indoor Rx", "[core][scene]")
{
    const auto s = indoor_l_scene();
    int los = 0, near = 0, far = 0;
    for (std::size_t i = 0; i < s.rx.size(); ++i)
    {
        const auto r = bent_axis_distance(s, i).region;
        los += r == RxRegion::los;
        near += r == RxRegion::near_nlos;
        far += r == RxRegion::far_nlos;
    }
    CHECK(los == 4);
    CHECK(near == 6);
    CHECK(far == 8);

    // between d1 and d2: corner, not an error
    CHECK(bent_axis_distance(s, Point2(-1.0, 23.0)).region == RxRegion::corner);
    CHECK(bent_axis_distance(s, Point2(-2.5, 24.5)).region == RxRegion::corner);
    CHECK(bent_axis_distance(s, Point2(-4.0, 25.0)).region == RxRegion::near_nlos); // 4 + d1 >= d2
    CHECK(to_string(RxRegion::far_nlos) == "far-nlos");
    CHECK_THROWS_AS(bent_axis_distance(s, std::size_t(99)), ModelError);
}

TEST_CASE("bent-axis distance is monotone along both corridors", "[core][scene][property]")
{
    const auto s = indoor_l_scene();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const double x = -s.los_corridor_width * u(rng);
        const double y0 = 21.0 * u(rng), y1 = y0 + 0.01 + u(rng);
        CHECK(bent_axis_distance(s, Point2(x, y1)).d > bent_axis_distance(s, Point2(x, y0)).d);

        const double y = s.d1 + 7.0 * u(rng);
        const double x0 = -3.0 - 50.0 * u(rng), x1 = x0 - 0.01 - u(rng);
        CHECK(bent_axis_distance(s, Point2(x1, y)).d > bent_axis_distance(s, Point2(x0, y)).d);
    }
}

TEST_CASE("scene validation", "[core][scene]")
{
    auto s = indoor_l_scene();
    CHECK_NOTHROW(s.validate());
    CHECK_THROWS_AS(s.rx_index("Rx99"), ModelError);

    auto t = s;
    t.d2 = t.d1;
    CHECK_THROWS_AS(t.validate(), ModelError);
    t = s;
    t.los_corridor_width = 0.0;
    CHECK_THROWS_AS(t.validate(), ModelError);
    t = s;
    t.walls[0].b = t.walls[0].a;
    CHECK_THROWS_AS(t.validate(), ModelError);
    t = s;
    t.rx[1].id = t.rx[0].id;
    CHECK_THROWS_AS(t.validate(), ModelError);
}

TEST_CASE("notch splits a wall into five segments", "[core][scene]")
{
    auto s = indoor_l_scene();
    const auto before = s.walls.size();
    add_notch(s, "C", Point2(-10.0, s.d1 + 7.0), 1.0, 0.2, Point2(-10.0, s.d1 + 3.0));
    CHECK(s.walls.size() == before + 4);
    double total = 0.0, recess_y = 0.0;
    for (const auto &w : s.walls)
        if (w.name == "C")
        {
            total += w.length();
            recess_y = std::max(recess_y, std::max(w.a.y(), w.b.y()));
        }
    CHECK_THAT(total, WithinAbs(60.0 - 2.97 + 0.4, 1e-9));
    CHECK_THAT(recess_y, WithinAbs(s.d1 + 7.2, 1e-12));
    CHECK_THROWS_AS(add_notch(s, "C", Point2(-100.0, 0.0), 1.0, 0.2, Point2(0.0, 0.0)), ModelError);
}
