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

#ifndef THZHALL_ORACLE_DRIFT_GEOMETRY_HPP
#define THZHALL_ORACLE_DRIFT_GEOMETRY_HPP

#include <cmath>
#include <numbers>

// Explicit construction of the drifted interaction point. Frame: reference Rx at the origin,
// x towards the corner (east), Wall C on y = +h, Wall D on y = -h. The Rx walks west by dd and the
// interaction point slides west by k dd along its wall; the AoA is read off the Rx -> point vector
// as a compass bearing.
namespace oracle
{
    inline double drifted_aoa(double h, double phi_ref_deg, double dd, double k, int side)
    {
        const double deg = std::numbers::pi / 180.0;
        const double wall_y = side == 1 ? h : -h;
        // initial interaction point: on the wall, along the reference bearing from the origin
        const double ux = std::sin(phi_ref_deg * deg), uy = std::cos(phi_ref_deg * deg);
        const double t = wall_y / uy;
        const double px0 = t * ux;
        const double rx_x = -dd;
        const double px = px0 - k * dd;
        const double bearing = std::atan2(px - rx_x, wall_y - 0.0) / deg;
        return bearing < 0.0 ? bearing + 360.0 : bearing;
    }
}

#endif
