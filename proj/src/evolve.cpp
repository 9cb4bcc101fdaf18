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

#include "thzhall/evolve.hpp"
#include "thzhall/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>

namespace thzhall
{
    EvolveParams EvolveParams::defaults()
    {
        EvolveParams p;
        p.k = 0.75;
        p.power_db["306-321"] = {-2.69, -122.0};
        p.power_db["356-371"] = {-2.89, -124.0};
        p.delay_ns["306-321"] = {4.45, 106.0};
        p.delay_ns["356-371"] = {5.06, 108.0};
        return p;
    }

    double interaction_drift(double delta_d, double k)
    {
        if (delta_d < 0.0)
            throw ModelError("interaction_drift: displacement must be non-negative");
        return k * delta_d;
    }

    namespace
    {
        void check_side(int side)
        {
            if (side != 1 && side != 2)
                throw ModelError("side must be 1 (Wall C) or 2 (Wall D), got " + std::to_string(side));
        }

        // Eastward offset of the initial interaction point seen from the reference Rx
        double reference_offset(double h, double phi_ref_deg, int side)
        {
            const double phi = side == 1 ? phi_ref_deg : 180.0 - phi_ref_deg;
            return h * std::tan(deg_to_rad(phi));
        }

        const LinearLaw &law_for(const std::map<std::string, LinearLaw> &laws, const std::string &band, const char *what)
        {
            const auto it = laws.find(band);
            if (it == laws.end())
                throw ModelError(std::string(what) + ": no law for band '" + band + "'; supply explicit parameters");
            return it->second;
        }
    }

    double evolved_aoa(double wall_distance_m, double phi_ref_deg, double delta_d, double k, int side)
    {
        check_side(side);
        if (!(wall_distance_m > 0.0))
            throw ModelError("evolved_aoa: wall distance must be positive");
        const double drift = interaction_drift(delta_d, k);
        const double offset = delta_d - drift + reference_offset(wall_distance_m, phi_ref_deg, side);
        if (!(offset > 0.0))
            throw ModelError("evolved_aoa: interaction point behind Rx (offset " + std::to_string(offset) + " m)");
        const double a = rad_to_deg(std::atan(wall_distance_m / offset));
        return side == 1 ? 90.0 - a : 90.0 + a;
    }

    double evolved_power(double delta_d, const std::string &band, const EvolveParams &params)
    {
        if (delta_d < 0.0)
            throw ModelError("evolved_power: displacement must be non-negative");
        return law_for(params.power_db, band, "evolved_power")(delta_d);
    }

    double evolved_delay(double delta_d, const std::string &band, const EvolveParams &params)
    {
        if (delta_d < 0.0)
            throw ModelError("evolved_delay: displacement must be non-negative");
        return law_for(params.delay_ns, band, "evolved_delay")(delta_d);
    }

    ReferenceAnchor make_anchor(const LShapeScene &scene, std::size_t ref_rx_index, const ReferencePaths &ref)
    {
        ReferenceAnchor a;
        const auto &rx = scene.rx.at(ref_rx_index);
        a.ref_rx_id = rx.id;
        a.row = rx.row;
        a.ref_position = rx.position;
        a.ref_d_m = bent_axis_distance(scene, ref_rx_index).d;
        for (int side = 1; side <= 2; ++side)
        {
            const auto &path = ref.side(side);
            if (!path)
                continue;
            const std::size_t s = std::size_t(side - 1);
            a.phi_ref_deg[s] = path->aoa_az_deg;
            a.interaction_point[s] = path->interaction_points.back();
            a.wall_distance_m[s] = distance_to_wall_line(rx.position, scene.walls[path->walls.back()]);
        }
        return a;
    }

    double evolved_aoa(const ReferenceAnchor &anchor, double delta_d, double k, int side)
    {
        check_side(side);
        if (!anchor.has_side(side))
            throw ModelError("evolved_aoa: anchor of '" + anchor.ref_rx_id + "' has no reference on side " +
                             std::to_string(side));
        const std::size_t s = std::size_t(side - 1);
        return evolved_aoa(anchor.wall_distance_m[s], *anchor.phi_ref_deg[s], delta_d, k, side);
    }

    std::vector<EvolvedPath> evolve_dominant_mpcs(const ReferenceAnchor &anchor, double delta_d, const std::string &band,
                                                  const EvolveParams &params)
    {
        std::vector<EvolvedPath> out;
        const double power = evolved_power(delta_d, band, params);
        const double delay = evolved_delay(delta_d, band, params);
        for (int side = 1; side <= 2; ++side)
        {
            if (!anchor.has_side(side))
                continue;
            out.push_back({side, Mpc{delay, evolved_aoa(anchor, delta_d, params.k, side), 0.0, power}});
        }
        return out;
    }

    double drift_from_aoa(double wall_distance_m, double phi_ref_deg, double delta_d, double phi_obs_deg, int side)
    {
        check_side(side);
        // tan of the angle between the wall normal and the arrival direction
        const double a = side == 1 ? phi_obs_deg : 180.0 - phi_obs_deg;
        const double offset = wall_distance_m * std::tan(deg_to_rad(a));
        return delta_d + reference_offset(wall_distance_m, phi_ref_deg, side) - offset;
    }

    EvolveFit fit_evolve_params(std::span<const BeamObservation> observations, const ReferenceAnchor &anchor,
                                const std::string &band, const EvolveParams &base)
    {
        EvolveFit fit;
        fit.params = base;

        double sxy = 0.0, sxx = 0.0;
        bool any_side = false;
        for (int side = 1; side <= 2; ++side)
        {
            const std::size_t s = std::size_t(side - 1);
            if (!anchor.has_side(side))
            {
                fit.notes.push_back("side " + std::to_string(side) + ": no reference path, skipped");
                continue;
            }
            std::set<double> distinct;
            double side_sxy = 0.0, side_sxx = 0.0;
            for (const auto &o : observations)
            {
                if (o.side != side || !o.aoa_deg)
                    continue;
                if (o.delta_d < 0.0)
                    throw ModelError("fit_evolve_params: negative displacement in observations");
                distinct.insert(o.delta_d);
                const double drift =
                    drift_from_aoa(anchor.wall_distance_m[s], *anchor.phi_ref_deg[s], o.delta_d, *o.aoa_deg, side);
                side_sxy += o.delta_d * drift;
                side_sxx += o.delta_d * o.delta_d;
            }
            if (distinct.size() < 2 || !(side_sxx > 0.0))
            {
                fit.notes.push_back("side " + std::to_string(side) + ": fewer than two positions with beams, skipped");
                continue;
            }
            fit.k_per_side[s] = side_sxy / side_sxx;
            sxy += side_sxy;
            sxx += side_sxx;
            any_side = true;
        }
        if (!any_side)
            throw ModelError("fit_evolve_params: no side has beams at two or more positions");
        fit.params.k = sxy / sxx;

        auto fit_line = [&](auto member, std::map<std::string, LinearLaw> &laws, const char *what)
        {
            std::vector<double> xs, ys;
            std::set<double> distinct;
            for (const auto &o : observations)
                if ((o.*member).has_value())
                {
                    xs.push_back(o.delta_d);
                    ys.push_back(*(o.*member));
                    distinct.insert(o.delta_d);
                }
            if (distinct.size() < 2)
            {
                fit.notes.push_back(std::string(what) + ": fewer than two distinct positions, law kept");
                return;
            }
            Eigen::MatrixXd design(Eigen::Index(xs.size()), 2);
            Eigen::VectorXd y(Eigen::Index(ys.size()));
            for (std::size_t i = 0; i < xs.size(); ++i)
            {
                design(Eigen::Index(i), 0) = xs[i];
                design(Eigen::Index(i), 1) = 1.0;
                y(Eigen::Index(i)) = ys[i];
            }
            const Eigen::Vector2d c = design.colPivHouseholderQr().solve(y);
            laws[band] = {c(0), c(1)};
        };
        fit_line(&BeamObservation::power_db, fit.params.power_db, "power");
        fit_line(&BeamObservation::delay_ns, fit.params.delay_ns, "delay");
        return fit;
    }
}
