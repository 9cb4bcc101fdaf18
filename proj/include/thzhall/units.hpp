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

#ifndef THZHALL_UNITS_HPP
#define THZHALL_UNITS_HPP

#include <cmath>
#include <numbers>

// Unit conventions used throughout the library:
// - distances in meters, frequencies in Hz, delays in ns at the API boundary
// - angles in degrees at the API boundary, azimuth measured clockwise from +y ("north"),
//   so +x ("east") is 90 deg
// - powers are linear watts internally; dB / dBm only where a function name says so.
//   The transmit power is normalised to 0 dBm, hence received power in dBm equals
//   the path gain in dB. The sounder actually transmits -10 dBm; add that offset for absolute levels.

namespace thzhall
{
    inline constexpr double speed_of_light = 299792458.0; // m/s

    template <typename Scalar>
    Scalar db_to_linear(Scalar db)
    {
        return std::pow(Scalar(10), db / Scalar(10));
    }

    template <typename Scalar>
    Scalar linear_to_db(Scalar lin)
    {
        return Scalar(10) * std::log10(lin);
    }

    // Amplitude factor for a power gain in dB
    template <typename Scalar>
    Scalar db_to_amplitude(Scalar db)
    {
        return std::pow(Scalar(10), db / Scalar(20));
    }

    template <typename Scalar>
    constexpr Scalar deg_to_rad(Scalar deg)
    {
        return deg * std::numbers::pi_v<Scalar> / Scalar(180);
    }

    template <typename Scalar>
    constexpr Scalar rad_to_deg(Scalar rad)
    {
        return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
    }

    // Wraps an angle into [0, 360)
    template <typename Scalar>
    Scalar wrap_deg(Scalar deg)
    {
        Scalar w = std::fmod(deg, Scalar(360));
        if (w < Scalar(0))
            w += Scalar(360);
        if (w >= Scalar(360)) // fmod of tiny negatives
            w -= Scalar(360);
        return w;
    }

    // Smallest absolute angular separation, in [0, 180]
    template <typename Scalar>
    Scalar cyclic_distance_deg(Scalar a, Scalar b)
    {
        Scalar d = wrap_deg(a - b);
        return d > Scalar(180) ? Scalar(360) - d : d;
    }

    inline double meters_to_ns(double m) { return m / speed_of_light * 1e9; }
    inline double ns_to_meters(double ns) { return ns * 1e-9 * speed_of_light; }
}

#endif
