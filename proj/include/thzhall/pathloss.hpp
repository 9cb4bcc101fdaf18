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

#ifndef THZHALL_PATHLOSS_HPP
#define THZHALL_PATHLOSS_HPP

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thzhall/core.hpp"

namespace thzhall
{
    // Free-space path loss 20 log10(4 pi f d / c), dB
    template <typename Scalar>
    Scalar fspl_db(Scalar distance_m, Scalar frequency_hz)
    {
        return Scalar(20) * std::log10(Scalar(4) * std::numbers::pi_v<Scalar> * frequency_hz * distance_m /
                                       Scalar(speed_of_light));
    }

    // Checked variant; throws ModelError unless d > 0 and f > 0
    double fspl(double distance_m, double frequency_hz);

    struct PathLossPair
    {
        double best_db = 0.0; // strongest scan direction, power summed over delay
        double omni_db = 0.0; // power summed over all directions and delays
    };

    // Groups MPCs by scan direction (az, el). PL_best = -10 log10 max_dir P_dir,
    // PL_omni = -10 log10 sum_dir P_dir, so omni <= best. Throws ModelError on empty or zero-power input.
    PathLossPair path_losses(std::span<const Mpc> mpcs);

    struct PathLossSample
    {
        std::string rx_id;
        int row = 0;
        double d_m = 0.0;      // straight-line Tx-Rx distance (CI, AB)
        double bent_d_m = 0.0; // distance along the bent axis (M-AB)
        double pl_best_db = 0.0;
        double pl_omni_db = 0.0;
    };

    enum class PathLossKind
    {
        best,
        omni
    };

    enum class PathLossModel
    {
        ci,
        ab,
        mab
    };

    std::string_view to_string(PathLossKind kind);
    std::string_view to_string(PathLossModel model);
    PathLossKind path_loss_kind_from_string(std::string_view s);
    PathLossModel path_loss_model_from_string(std::string_view s);

    struct PathLossFit
    {
        PathLossModel model = PathLossModel::ci;
        PathLossKind kind = PathLossKind::best;
        double ple = NAN;          // CI
        double d0_m = 1.0;         // CI reference distance
        double frequency_hz = NAN; // CI
        double alpha = NAN;        // AB, M-AB
        double beta_db = NAN;      // AB, M-AB
        double d1_m = NAN;         // M-AB
        double sigma_sf_db = 0.0;  // RMS residual
        std::vector<double> residuals_db; // measured - model, in sample order

        // Model path loss at straight-line distance d (CI, AB) or bent-axis distance d (M-AB)
        double predict(double d) const;
    };

    // Close-in model PL = FSPL(d0, f) + 10 PLE log10(d / d0); PLE by least squares through the anchor.
    // Throws ModelError with fewer than two distinct distances.
    PathLossFit fit_ci(std::span<const PathLossSample> samples, PathLossKind kind, double d0_m, double frequency_hz);

    // Floating-intercept model PL = 10 alpha log10(d) + beta by ordinary least squares
    PathLossFit fit_ab(std::span<const PathLossSample> samples, PathLossKind kind);

    // NLoS model PL = 10 alpha log10(d - d1) + beta, d along the bent axis.
    // Throws ModelError naming the first sample with d <= d1.
    PathLossFit fit_mab(std::span<const PathLossSample> samples, PathLossKind kind, double d1_m);

    // One M-AB fit per NLoS row (row ids > 0); rows with fewer than two distinct distances are skipped
    std::map<int, PathLossFit> fit_mab_per_row(std::span<const PathLossSample> samples, PathLossKind kind, double d1_m);

    // Mean absolute path-loss difference between Rx of row_a and row_b at the same distance past
    // the corner. Empty when no aligned pairs exist.
    std::optional<double> mean_row_offset_db(std::span<const PathLossSample> samples, PathLossKind kind, int row_a,
                                             int row_b);

    // Builds the sample of one Rx from its extracted MPCs
    PathLossSample make_path_loss_sample(const LShapeScene &scene, std::size_t rx_index, std::span<const Mpc> mpcs);
}

#endif
