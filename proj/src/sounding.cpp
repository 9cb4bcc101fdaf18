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

#include "thzhall/sounding.hpp"
#include "thzhall/error.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace thzhall
{
    Eigen::VectorXcd calibrate(const SweepRecord &sweep, const CalibrationRecord &calib, double antenna_gains_db)
    {
        if (sweep.s21.size() != calib.s21.size())
            throw ModelError("calibrate: sweep has " + std::to_string(sweep.s21.size()) +
                             " samples but calibration has " + std::to_string(calib.s21.size()));

        for (Eigen::Index k = 0; k < calib.s21.size(); ++k)
            if (calib.s21[k] == std::complex<double>(0.0, 0.0))
                throw ModelError("calibrate: calibration sample at bin " + std::to_string(k) + " is zero");

        const double gain = db_to_amplitude(calib.attenuator_gain_db - antenna_gains_db);
        return (sweep.s21.array() / calib.s21.array() * gain).matrix();
    }

    namespace
    {
        Eigen::Index largest_prime_factor(Eigen::Index n)
        {
            Eigen::Index p = 1;
            for (Eigen::Index f = 2; f * f <= n; ++f)
                while (n % f == 0)
                {
                    p = f;
                    n /= f;
                }
            return n > 1 ? n : p;
        }

        // Chirp-z (Bluestein) forward transform for lengths kissfft handles slowly,
        // e.g. 6001 = 17 * 353. Convolution runs on a power-of-two Eigen FFT.
        class Bluestein
        {
          public:
            explicit Bluestein(Eigen::Index n) : n_(n)
            {
                m_ = 1;
                while (m_ < 2 * n - 1)
                    m_ *= 2;
                chirp_.resize(n);
                const long long two_n = 2LL * n;
                for (Eigen::Index k = 0; k < n; ++k)
                {
                    // k^2 mod 2N keeps the phase argument small
                    const long long q = (static_cast<long long>(k) * k) % two_n;
                    chirp_[k] = std::polar(1.0, -std::numbers::pi * double(q) / double(n));
                }
                Eigen::VectorXcd b = Eigen::VectorXcd::Zero(m_);
                b[0] = std::conj(chirp_[0]);
                for (Eigen::Index k = 1; k < n; ++k)
                    b[k] = b[m_ - k] = std::conj(chirp_[k]);
                fft_.fwd(b_hat_, b);
            }

            Eigen::VectorXcd forward(const Eigen::VectorXcd &x)
            {
                Eigen::VectorXcd a = Eigen::VectorXcd::Zero(m_);
                a.head(n_) = x.cwiseProduct(chirp_);
                Eigen::VectorXcd a_hat, conv;
                fft_.fwd(a_hat, a);
                a_hat = a_hat.cwiseProduct(b_hat_);
                fft_.inv(conv, a_hat);
                return conv.head(n_).cwiseProduct(chirp_);
            }

          private:
            Eigen::Index n_, m_;
            Eigen::VectorXcd chirp_, b_hat_;
            Eigen::FFT<double> fft_;
        };

        Eigen::VectorXcd unscaled_forward(const Eigen::VectorXcd &x)
        {
            thread_local Eigen::FFT<double> fft;
            thread_local std::map<Eigen::Index, Bluestein> chirps;
            if (largest_prime_factor(x.size()) <= 61)
            {
                Eigen::VectorXcd out;
                fft.fwd(out, x);
                return out;
            }
            auto it = chirps.find(x.size());
            if (it == chirps.end())
                it = chirps.emplace(x.size(), Bluestein(x.size())).first;
            return it->second.forward(x);
        }
    }

    Eigen::VectorXcd inverse_dft(const Eigen::VectorXcd &ctf)
    {
        if (ctf.size() < 2)
            throw ModelError("inverse_dft: at least two samples are required");
        return unscaled_forward(ctf.conjugate()).conjugate() / double(ctf.size());
    }

    Eigen::VectorXcd forward_dft(const Eigen::VectorXcd &cir)
    {
        if (cir.size() < 2)
            throw ModelError("forward_dft: at least two samples are required");
        return unscaled_forward(cir);
    }

    Cir ctf_to_cir(const Eigen::VectorXcd &ctf, const BandConfig &band, double az_deg, double el_deg)
    {
        if (std::size_t(ctf.size()) != band.n_points)
            throw ModelError("ctf_to_cir: CTF length " + std::to_string(ctf.size()) + " does not match band (" +
                             std::to_string(band.n_points) + " points)");
        return Cir{az_deg, el_deg, band.delay_bin_ns(), inverse_dft(ctf)};
    }

    double mpc_threshold_dbm(double peak_dbm, double noise_floor_dbm, double dynamic_range_db)
    {
        return std::max(peak_dbm - dynamic_range_db, noise_floor_dbm + 10.0);
    }

    ExtractResult extract_mpcs(std::span<const Cir> cirs, const BandConfig &band)
    {
        if (cirs.empty())
            throw ModelError("extract_mpcs: no scan directions");

        ExtractResult res;
        double peak_lin = 0.0;
        for (const auto &c : cirs)
            if (c.taps.size() > 0)
                peak_lin = std::max(peak_lin, c.taps.cwiseAbs2().maxCoeff());

        res.peak_dbm = peak_lin > 0.0 ? linear_to_db(peak_lin) : -std::numeric_limits<double>::infinity();
        res.threshold_dbm = mpc_threshold_dbm(res.peak_dbm, band.noise_floor_dbm, band.dynamic_range_db);

        for (const auto &c : cirs)
            for (Eigen::Index i = 0; i < c.taps.size(); ++i)
            {
                const double p = std::norm(c.taps[i]);
                if (p <= 0.0)
                    continue;
                const double p_db = linear_to_db(p);
                if (p_db >= res.threshold_dbm)
                    res.mpcs.push_back(Mpc{c.toa_ns(i), c.az_deg, c.el_deg, p_db});
            }

        std::sort(res.mpcs.begin(), res.mpcs.end(), [](const Mpc &a, const Mpc &b)
                  {
                      if (a.aoa_az_deg != b.aoa_az_deg)
                          return a.aoa_az_deg < b.aoa_az_deg;
                      if (a.aoa_el_deg != b.aoa_el_deg)
                          return a.aoa_el_deg < b.aoa_el_deg;
                      return a.toa_ns < b.toa_ns;
                  });
        res.no_signal = res.mpcs.empty();
        return res;
    }
}
