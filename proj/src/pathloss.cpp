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

#include "thzhall/pathloss.hpp"
#include "thzhall/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace thzhall
{
    double fspl(double distance_m, double frequency_hz)
    {
        if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
            throw ModelError("fspl: distance and frequency must be positive");
        return fspl_db(distance_m, frequency_hz);
    }

    PathLossPair path_losses(std::span<const Mpc> mpcs)
    {
        if (mpcs.empty())
            throw ModelError("path_losses: no MPCs");

        std::map<std::pair<double, double>, double> per_direction;
        for (const auto &m : mpcs)
            per_direction[{m.aoa_az_deg, m.aoa_el_deg}] += m.linear_power();

        double best = 0.0, total = 0.0;
        for (const auto &[dir, p] : per_direction)
        {
            best = std::max(best, p);
            total += p;
        }
        if (!(total > 0.0))
            throw ModelError("path_losses: zero received power");
        return {-linear_to_db(best), -linear_to_db(total)};
    }

    std::string_view to_string(PathLossKind kind)
    {
        return kind == PathLossKind::best ? "best" : "omni";
    }

    std::string_view to_string(PathLossModel model)
    {
        switch (model)
        {
        case PathLossModel::ci:
            return "ci";
        case PathLossModel::ab:
            return "ab";
        case PathLossModel::mab:
            return "mab";
        }
        return "unknown";
    }

    PathLossKind path_loss_kind_from_string(std::string_view s)
    {
        if (s == "best")
            return PathLossKind::best;
        if (s == "omni")
            return PathLossKind::omni;
        throw ModelError("unknown path-loss kind '" + std::string(s) + "' (expected best or omni)");
    }

    PathLossModel path_loss_model_from_string(std::string_view s)
    {
        if (s == "ci")
            return PathLossModel::ci;
        if (s == "ab")
            return PathLossModel::ab;
        if (s == "mab")
            return PathLossModel::mab;
        throw ModelError("unknown path-loss model '" + std::string(s) + "' (expected ci, ab or mab)");
    }

    double PathLossFit::predict(double d) const
    {
        switch (model)
        {
        case PathLossModel::ci:
            return fspl_db(d0_m, frequency_hz) + 10.0 * ple * std::log10(d / d0_m);
        case PathLossModel::ab:
            return 10.0 * alpha * std::log10(d) + beta_db;
        case PathLossModel::mab:
            return 10.0 * alpha * std::log10(d - d1_m) + beta_db;
        }
        return NAN;
    }

    namespace
    {
        double pick(const PathLossSample &s, PathLossKind kind)
        {
            return kind == PathLossKind::best ? s.pl_best_db : s.pl_omni_db;
        }

        std::size_t distinct_count(const Eigen::VectorXd &v)
        {
            std::set<double> s(v.begin(), v.end());
            return s.size();
        }

        double rms(const Eigen::VectorXd &r)
        {
            return std::sqrt(r.squaredNorm() / double(r.size()));
        }

        // Least-squares line y = a x + b; throws when the design is rank deficient
        std::pair<double, double> ols_line(const Eigen::VectorXd &x, const Eigen::VectorXd &y, const char *who)
        {
            Eigen::MatrixXd design(x.size(), 2);
            design.col(0) = x;
            design.col(1).setOnes();
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
            if (qr.rank() < 2)
                throw ModelError(std::string(who) + ": singular design (need at least two distinct distances)");
            const Eigen::Vector2d coef = qr.solve(y);
            return {coef(0), coef(1)};
        }

        PathLossFit fit_log_line(const Eigen::VectorXd &dist, const Eigen::VectorXd &pl, const char *who)
        {
            if (dist.size() < 2 || distinct_count(dist) < 2)
                throw ModelError(std::string(who) + ": at least two distinct distances are required");
            const Eigen::VectorXd x = 10.0 * dist.array().log10();
            const auto [alpha, beta] = ols_line(x, pl, who);
            const Eigen::VectorXd res = (pl.array() - alpha * x.array() - beta).matrix();

            PathLossFit f;
            f.alpha = alpha;
            f.beta_db = beta;
            f.sigma_sf_db = rms(res);
            f.residuals_db.assign(res.begin(), res.end());
            return f;
        }
    }

    PathLossFit fit_ci(std::span<const PathLossSample> samples, PathLossKind kind, double d0_m, double frequency_hz)
    {
        if (!(d0_m > 0.0) || !(frequency_hz > 0.0))
            throw ModelError("fit_ci: reference distance and frequency must be positive");

        const Eigen::Index n = Eigen::Index(samples.size());
        Eigen::VectorXd x(n), y(n), d(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const auto &s = samples[std::size_t(i)];
            if (!(s.d_m > 0.0))
                throw ModelError("fit_ci: sample '" + s.rx_id + "' has non-positive distance");
            d(i) = s.d_m;
            x(i) = 10.0 * std::log10(s.d_m / d0_m);
            y(i) = pick(s, kind) - fspl_db(d0_m, frequency_hz);
        }
        if (n < 2 || distinct_count(d) < 2)
            throw ModelError("fit_ci: at least two distinct distances are required");

        PathLossFit f;
        f.model = PathLossModel::ci;
        f.kind = kind;
        f.d0_m = d0_m;
        f.frequency_hz = frequency_hz;
        f.ple = x.dot(y) / x.squaredNorm();
        const Eigen::VectorXd res = y - f.ple * x;
        f.sigma_sf_db = rms(res);
        f.residuals_db.assign(res.begin(), res.end());
        return f;
    }

    PathLossFit fit_ab(std::span<const PathLossSample> samples, PathLossKind kind)
    {
        const Eigen::Index n = Eigen::Index(samples.size());
        Eigen::VectorXd d(n), y(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const auto &s = samples[std::size_t(i)];
            if (!(s.d_m > 0.0))
                throw ModelError("fit_ab: sample '" + s.rx_id + "' has non-positive distance");
            d(i) = s.d_m;
            y(i) = pick(s, kind);
        }
        PathLossFit f = fit_log_line(d, y, "fit_ab");
        f.model = PathLossModel::ab;
        f.kind = kind;
        return f;
    }

    PathLossFit fit_mab(std::span<const PathLossSample> samples, PathLossKind kind, double d1_m)
    {
        const Eigen::Index n = Eigen::Index(samples.size());
        Eigen::VectorXd d(n), y(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const auto &s = samples[std::size_t(i)];
            if (!(s.bent_d_m > d1_m))
                throw ModelError("fit_mab: sample '" + s.rx_id + "' has d = " + std::to_string(s.bent_d_m) +
                                 " m, not beyond d1 = " + std::to_string(d1_m) + " m");
            d(i) = s.bent_d_m - d1_m;
            y(i) = pick(s, kind);
        }
        PathLossFit f = fit_log_line(d, y, "fit_mab");
        f.model = PathLossModel::mab;
        f.kind = kind;
        f.d1_m = d1_m;
        return f;
    }

    std::map<int, PathLossFit> fit_mab_per_row(std::span<const PathLossSample> samples, PathLossKind kind, double d1_m)
    {
        std::map<int, std::vector<PathLossSample>> rows;
        for (const auto &s : samples)
            if (s.row > 0)
                rows[s.row].push_back(s);

        std::map<int, PathLossFit> fits;
        for (const auto &[row, rs] : rows)
        {
            std::set<double> distinct;
            for (const auto &s : rs)
                distinct.insert(s.bent_d_m);
            if (distinct.size() < 2)
                continue;
            fits.emplace(row, fit_mab(rs, kind, d1_m));
        }
        return fits;
    }

    std::optional<double> mean_row_offset_db(std::span<const PathLossSample> samples, PathLossKind kind, int row_a,
                                             int row_b)
    {
        double acc = 0.0;
        std::size_t pairs = 0;
        for (const auto &a : samples)
        {
            if (a.row != row_a)
                continue;
            for (const auto &b : samples)
                if (b.row == row_b && std::abs(a.bent_d_m - b.bent_d_m) < 1e-6)
                {
                    acc += std::abs(pick(a, kind) - pick(b, kind));
                    ++pairs;
                    break;
                }
        }
        if (pairs == 0)
            return std::nullopt;
        return acc / double(pairs);
    }

    PathLossSample make_path_loss_sample(const LShapeScene &scene, std::size_t rx_index, std::span<const Mpc> mpcs)
    {
        const auto pos = bent_axis_distance(scene, rx_index);
        const auto pl = path_losses(mpcs);
        PathLossSample s;
        s.rx_id = scene.rx[rx_index].id;
        s.row = scene.rx[rx_index].row;
        s.d_m = (scene.rx[rx_index].position - scene.tx_position).norm();
        s.bent_d_m = pos.d;
        s.pl_best_db = pl.best_db;
        s.pl_omni_db = pl.omni_db;
        return s;
    }
}
