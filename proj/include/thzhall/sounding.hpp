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

#ifndef THZHALL_SOUNDING_HPP
#define THZHALL_SOUNDING_HPP

#include <Eigen/Core>

#include <span>
#include <vector>

#include "thzhall/core.hpp"

namespace thzhall
{
    // Measured S21 of one Rx scan direction
    struct SweepRecord
    {
        double az_deg = 0.0;
        double el_deg = 0.0;
        Eigen::VectorXcd s21;
    };

    // Back-to-back S21 with the antennas replaced by an attenuator
    struct CalibrationRecord
    {
        Eigen::VectorXcd s21;
        double attenuator_gain_db = -40.0;
    };

    // Channel impulse response of one scan direction; tap i sits at delay i * bin_ns
    struct Cir
    {
        double az_deg = 0.0;
        double el_deg = 0.0;
        double bin_ns = 0.0;
        Eigen::VectorXcd taps;

        double toa_ns(Eigen::Index bin) const { return double(bin) * bin_ns; }
        double energy() const { return taps.squaredNorm(); }
    };

    // H = S_measure / S_calib * G_attenuator / G_AT, gains applied as amplitude factors.
    // Throws ModelError on length mismatch or a zero calibration sample (the message names the bin).
    Eigen::VectorXcd calibrate(const SweepRecord &sweep, const CalibrationRecord &calib, double antenna_gains_db);

    // Inverse DFT with 1/N on the inverse: h[n] = 1/N sum_k H[k] exp(+j 2 pi k n / N)
    Eigen::VectorXcd inverse_dft(const Eigen::VectorXcd &ctf);

    // Forward DFT, unscaled; inverse of inverse_dft
    Eigen::VectorXcd forward_dft(const Eigen::VectorXcd &cir);

    Cir ctf_to_cir(const Eigen::VectorXcd &ctf, const BandConfig &band, double az_deg = 0.0, double el_deg = 0.0);

    struct ExtractResult
    {
        std::vector<Mpc> mpcs;       // retained samples, sorted by azimuth, elevation, delay
        double peak_dbm = 0.0;       // P_m, strongest sample over all directions
        double threshold_dbm = 0.0;  // P_TH = max(P_m - DR, NF + 10)
        bool no_signal = false;      // the threshold lies above every sample
    };

    // Every CIR sample is a candidate MPC. Samples with power >= max(P_m - dynamic_range, NF + 10)
    // are kept, tagged with the direction of their CIR and the delay of their bin.
    // Throws ModelError when `cirs` is empty.
    ExtractResult extract_mpcs(std::span<const Cir> cirs, const BandConfig &band);

    // Threshold rule on its own, in dBm
    double mpc_threshold_dbm(double peak_dbm, double noise_floor_dbm, double dynamic_range_db);
}

#endif
