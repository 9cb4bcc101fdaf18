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
//   best / omni path loss examples and omni <= best
//   FSPL values, frequency-ratio and distance-doubling identities
//   CI, AB, M-AB recovery: noiseless, noisy with pinned seed, grid-search optimum
//   M-AB on the measured NLoS abscissae, both scenarios
//   M-AB beats AB on corner-concentrated data; translation consistency; per-row fits and offsets
//   error paths

#include "catch_amalgamated.hpp"

#include "oracles/grid_fit.hpp"
#include "thzhall/error.hpp"
#include "thzhall/pathloss.hpp"

#include <random>

using namespace thzhall;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    PathLossSample sample(double d, double pl, double bent = 0.0, int row = 0)
    {
        PathLossSample s;
        s.rx_id = "S" + std::to_string(d);
        s.row = row;
        s.d_m = d;
        s.bent_d_m = bent;
        s.pl_best_db = pl;
        s.pl_omni_db = pl - 3.0;
        return s;
    }
}

TEST_CASE("best and omni path loss", "[pathloss][pl]")
{
    CHECK_THAT(path_losses(std::vector<Mpc>{{10, 0, 0, -100}}).best_db, WithinAbs(100.0, 1e-12));
    CHECK_THAT(path_losses(std::vector<Mpc>{{10, 0, 0, -100}}).omni_db, WithinAbs(100.0, 1e-12));

    const std::vector<Mpc> two = {{10, 0, 0, -103.0103}, {12, 90, 0, -103.0103}};
    CHECK_THAT(path_losses(two).omni_db, WithinAbs(100.0, 1e-4));
    CHECK_THAT(path_losses(two).best_db, WithinAbs(103.0103, 1e-12));

    // one direction, several delays: summed
    const std::vector<Mpc> same = {{10, 30, 0, -100}, {20, 30, 0, -100}};
    CHECK_THAT(path_losses(same).best_db, WithinAbs(100.0 - 10.0 * std::log10(2.0), 1e-12));

    CHECK_THROWS_AS(path_losses(std::vector<Mpc>{}), ModelError);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> p(-150, -80);
    std::uniform_int_distribution<int> a(0, 35);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<Mpc> m(10);
        for (auto &x : m)
            x = {1.0, 10.0 * a(rng), 0, p(rng)};
        const auto r = path_losses(m);
        CHECK(r.omni_db <= r.best_db);
    }
}

TEST_CASE("free-space path loss", "[pathloss][fspl]")
{
    CHECK_THAT(fspl(1.0, 313.5e9), WithinAbs(82.37, 0.005));
    CHECK_THAT(fspl(1.0, 363.5e9) - fspl(1.0, 313.5e9), WithinAbs(20.0 * std::log10(363.5 / 313.5), 1e-9));
    CHECK_THAT(fspl(1.0, 363.5e9) - fspl(1.0, 313.5e9), WithinAbs(1.29, 0.005));
    for (double d : {0.5, 1.0, 7.3, 40.0})
        CHECK_THAT(fspl(2.0 * d, 313.5e9) - fspl(d, 313.5e9), WithinAbs(20.0 * std::log10(2.0), 1e-9));
    CHECK_THROWS_AS(fspl(0.0, 313.5e9), ModelError);
    CHECK_THROWS_AS(fspl(1.0, -1.0), ModelError);
}

TEST_CASE("CI recovers the planted exponent", "[pathloss][ci]")
{
    const double f = 313.5e9;
    for (double ple : {2.0, 1.67, 1.40})
    {
        std::vector<PathLossSample> s;
        for (double d : {7.8, 12.0, 16.0, 20.0})
            s.push_back(sample(d, fspl(1.0, f) + 10.0 * ple * std::log10(d)));
        const auto fit = fit_ci(s, PathLossKind::best, 1.0, f);
        CHECK_THAT(fit.ple, WithinAbs(ple, 1e-9));
        CHECK_THAT(fit.sigma_sf_db, WithinAbs(0.0, 1e-9));
        CHECK_THAT(fit.predict(10.0), WithinAbs(fspl(1.0, f) + 10.0 * ple, 1e-9));
    }
    std::vector<PathLossSample> same = {sample(5, 90), sample(5, 91)};
    CHECK_THROWS_AS(fit_ci(same, PathLossKind::best, 1.0, f), ModelError);
}

TEST_CASE("CI agrees with a grid search over the exponent", "[pathloss][ci][oracle]")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::uniform_real_distribution<double> dist(2.0, 40.0);
    const double f = 363.5e9;
    for (int trial = 0; trial < 5; ++trial)
    {
        std::vector<PathLossSample> s;
        std::vector<double> x, y;
        for (int i = 0; i < 12; ++i)
        {
            const double d = dist(rng);
            s.push_back(sample(d, fspl(1.0, f) + 18.0 * std::log10(d) + noise(rng)));
            x.push_back(10.0 * std::log10(d));
            y.push_back(s.back().pl_omni_db - fspl(1.0, f));
        }
        const auto fit = fit_ci(s, PathLossKind::omni, 1.0, f);
        CHECK_THAT(fit.ple, WithinAbs(oracle::grid_slope(x, y, 0.0, 0.0, 10.0, 1e-4), 1e-3));
    }
}

TEST_CASE("AB recovery, noiseless and noisy", "[pathloss][ab]")
{
    std::vector<PathLossSample> clean;
    for (int i = 0; i < 10; ++i)
    {
        const double d = 3.0 + 2.0 * i;
        clean.push_back(sample(d, 25.0 * std::log10(d) + 75.0));
    }
    const auto exact = fit_ab(clean, PathLossKind::best);
    CHECK_THAT(exact.alpha, WithinAbs(2.5, 1e-9));
    CHECK_THAT(exact.beta_db, WithinAbs(75.0, 1e-9));
    CHECK_THAT(exact.sigma_sf_db, WithinAbs(0.0, 1e-9));

    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::uniform_real_distribution<double> dist(1.0, 60.0);
    std::vector<PathLossSample> noisy;
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i)
    {
        const double d = dist(rng);
        noisy.push_back(sample(d, 25.0 * std::log10(d) + 75.0 + noise(rng)));
        x.push_back(10.0 * std::log10(d));
        y.push_back(noisy.back().pl_best_db);
    }
    const auto fit = fit_ab(noisy, PathLossKind::best);
    CHECK_THAT(fit.alpha, WithinAbs(2.5, 0.15));
    CHECK_THAT(fit.beta_db, WithinAbs(75.0, 3.0));
    CHECK(fit.sigma_sf_db > 1.0);
    CHECK(fit.sigma_sf_db < 3.0);

    const auto g = oracle::grid_line(x, y, 0.0, 5.0, 50.0, 100.0);
    CHECK_THAT(fit.alpha, WithinAbs(g.slope, 1e-3));
    CHECK_THAT(fit.beta_db, WithinAbs(g.icpt, 1e-3));

    std::vector<PathLossSample> one = {sample(4, 80)};
    CHECK_THROWS_AS(fit_ab(one, PathLossKind::best), ModelError);
}

TEST_CASE("M-AB on the measured NLoS abscissae", "[pathloss][mab]")
{
    const double d1 = 22.09;
    std::vector<PathLossSample> s;
    for (double x : {5.09, 6.89, 8.69, 10.49, 13.49, 15.29, 18.30})
        s.push_back(sample(30.0, 65.0 * std::log10(x) + 65.0, d1 + x, 1));
    const auto fit = fit_mab(s, PathLossKind::best, d1);
    CHECK_THAT(fit.alpha, WithinAbs(6.5, 1e-9));
    CHECK_THAT(fit.beta_db, WithinAbs(65.0, 1e-9));
    CHECK(fit.alpha >= 6.0);
    CHECK(fit.alpha <= 7.0);
    CHECK_THAT(fit.predict(d1 + 10.0), WithinAbs(130.0, 1e-9));

    const double d1o = 30.36;
    std::vector<PathLossSample> o;
    for (double x : {11.67, 13.30, 16.31, 18.27, 21.27, 23.27})
        o.push_back(sample(50.0, 40.0 * std::log10(x) + 64.0, d1o + x, 1));
    const auto fo = fit_mab(o, PathLossKind::best, d1o);
    CHECK_THAT(fo.alpha, WithinAbs(4.0, 1e-9));
    CHECK_THAT(fo.beta_db, WithinAbs(64.0, 1e-9));

    s.push_back(sample(20.0, 100.0, 21.0, 0));
    try
    {
        fit_mab(s, PathLossKind::best, d1);
        FAIL("expected an error");
    }
    catch (const ModelError &e)
    {
        CHECK(std::string(e.what()).find(s.back().rx_id) != std::string::npos);
    }
}

TEST_CASE("M-AB fits corner-concentrated data better than AB", "[pathloss][mab]")
{
    const auto scene = indoor_l_scene();
    std::vector<PathLossSample> s;
    for (std::size_t i = 0; i < scene.rx.size(); ++i)
    {
        const auto pos = bent_axis_distance(scene, i);
        if (!pos.is_nlos())
            continue;
        auto x = sample((scene.rx[i].position - scene.tx_position).norm(),
                        65.0 * std::log10(pos.d - scene.d1) + 65.0, pos.d, scene.rx[i].row);
        s.push_back(x);
    }
    const auto mab = fit_mab(s, PathLossKind::best, scene.d1);
    const auto ab = fit_ab(s, PathLossKind::best);
    CHECK(mab.sigma_sf_db < ab.sigma_sf_db);
    CHECK(mab.sigma_sf_db < 1e-9);
}

TEST_CASE("M-AB translation consistency and grid optimum", "[pathloss][mab][property]")
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::uniform_real_distribution<double> past(2.0, 25.0), shift(-10.0, 10.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        std::vector<PathLossSample> s, t;
        std::vector<double> x, y;
        const double c = shift(rng);
        for (int i = 0; i < 15; ++i)
        {
            const double dd = past(rng);
            s.push_back(sample(10.0, 50.0 * std::log10(dd) + 70.0 + noise(rng), 22.09 + dd, 1));
            t.push_back(s.back());
            t.back().bent_d_m += c;
            x.push_back(10.0 * std::log10(dd));
            y.push_back(s.back().pl_best_db);
        }
        const auto a = fit_mab(s, PathLossKind::best, 22.09);
        const auto b = fit_mab(t, PathLossKind::best, 22.09 + c);
        CHECK_THAT(b.alpha, WithinAbs(a.alpha, 1e-9));
        CHECK_THAT(b.beta_db, WithinAbs(a.beta_db, 1e-9));
        CHECK(a.sigma_sf_db >= 0.0);

        if (trial < 3)
        {
            const auto g = oracle::grid_line(x, y, 0.0, 10.0, 40.0, 100.0);
            CHECK_THAT(a.alpha, WithinAbs(g.slope, 1e-3));
            CHECK_THAT(a.beta_db, WithinAbs(g.icpt, 1e-3));
        }
    }
}

TEST_CASE("per-row fits and row offsets", "[pathloss][mab]")
{
    std::vector<PathLossSample> s;
    for (double x : {5.09, 6.89, 8.69, 10.49})
    {
        s.push_back(sample(20.0, 60.0 * std::log10(x) + 60.0, 22.09 + x, 1));
        s.push_back(sample(20.0, 60.0 * std::log10(x) + 62.0, 22.09 + x, 2));
    }
    s.push_back(sample(5.0, 80.0, 5.0, 0));
    const auto rows = fit_mab_per_row(s, PathLossKind::best, 22.09);
    REQUIRE(rows.size() == 2);
    CHECK_THAT(rows.at(1).beta_db, WithinAbs(60.0, 1e-9));
    CHECK_THAT(rows.at(2).beta_db, WithinAbs(62.0, 1e-9));
    CHECK_THAT(*mean_row_offset_db(s, PathLossKind::best, 1, 2), WithinAbs(2.0, 1e-9));
    CHECK_FALSE(mean_row_offset_db(s, PathLossKind::best, 1, 3).has_value());
}

TEST_CASE("model names", "[pathloss]")
{
    CHECK(path_loss_model_from_string("mab") == PathLossModel::mab);
    CHECK(path_loss_kind_from_string("omni") == PathLossKind::omni);
    CHECK(to_string(PathLossModel::ab) == "ab");
    CHECK_THROWS_AS(path_loss_model_from_string("abg"), ModelError);
    CHECK_THROWS_AS(path_loss_kind_from_string("mean"), ModelError);
}
