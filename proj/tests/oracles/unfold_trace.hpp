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

#ifndef THZHALL_ORACLE_UNFOLD_TRACE_HPP
#define THZHALL_ORACLE_UNFOLD_TRACE_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

// Reflection paths by unfolding the Rx (images of the receiver, walls taken last to first) and
// exhaustive enumeration of every wall sequence, repeats included. Plain doubles, no Eigen.
namespace oracle
{
    struct P2
    {
        double x, y;
    };

    struct Seg
    {
        P2 a, b;
    };

    struct OraclePath
    {
        std::vector<std::size_t> walls;
        std::vector<P2> points;
        double length;
        double aoa_deg;
    };

    inline P2 reflect(P2 p, const Seg &w)
    {
        const double dx = w.b.x - w.a.x, dy = w.b.y - w.a.y;
        const double t = ((p.x - w.a.x) * dx + (p.y - w.a.y) * dy) / (dx * dx + dy * dy);
        const P2 f{w.a.x + t * dx, w.a.y + t * dy};
        return {2 * f.x - p.x, 2 * f.y - p.y};
    }

    inline double orient(P2 a, P2 b, P2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

    // Leg p->q crosses wall w away from the leg end points
    inline bool crosses(P2 p, P2 q, const Seg &w)
    {
        const double e = 1e-9;
        const P2 p2{p.x + e * (q.x - p.x), p.y + e * (q.y - p.y)};
        const P2 q2{q.x + e * (p.x - q.x), q.y + e * (p.y - q.y)};
        const double o1 = orient(p2, q2, w.a), o2 = orient(p2, q2, w.b);
        const double o3 = orient(w.a, w.b, p2), o4 = orient(w.a, w.b, q2);
        return o1 * o2 <= 0.0 && o3 * o4 < 0.0 && !(o1 == 0.0 && o2 == 0.0);
    }

    // Point where segment p->q meets the wall, when it does strictly inside the leg
    inline std::optional<P2> hit(P2 p, P2 q, const Seg &w)
    {
        const double o1 = orient(w.a, w.b, p), o2 = orient(w.a, w.b, q);
        if (o1 * o2 >= 0.0)
            return std::nullopt;
        const double t = o1 / (o1 - o2);
        if (t < 1e-9 || t > 1.0 - 1e-9)
            return std::nullopt;
        const P2 x{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
        // on the segment
        const double dx = w.b.x - w.a.x, dy = w.b.y - w.a.y;
        const double s = ((x.x - w.a.x) * dx + (x.y - w.a.y) * dy) / (dx * dx + dy * dy);
        if (s < 0.0 || s > 1.0)
            return std::nullopt;
        return x;
    }

    inline std::optional<OraclePath> unfold(const std::vector<Seg> &walls, const std::vector<std::size_t> &seq, P2 tx,
                                            P2 rx)
    {
        const std::size_t k = seq.size();
        std::vector<P2> rx_img(k + 1); // rx_img[m]: Rx mirrored over the last m walls
        rx_img[0] = rx;
        for (std::size_t m = 1; m <= k; ++m)
            rx_img[m] = reflect(rx_img[m - 1], walls[seq[k - m]]);

        OraclePath path;
        path.walls = seq;
        P2 from = tx;
        for (std::size_t j = 0; j < k; ++j)
        {
            const auto x = hit(from, rx_img[k - j], walls[seq[j]]);
            if (!x)
                return std::nullopt;
            path.points.push_back(*x);
            from = *x;
        }
        P2 prev = tx;
        for (std::size_t j = 0; j <= k; ++j)
        {
            const P2 next = j < k ? path.points[j] : rx;
            for (const auto &w : walls)
                if (crosses(prev, next, w))
                    return std::nullopt;
            prev = next;
        }
        path.length = std::hypot(rx_img[k].x - tx.x, rx_img[k].y - tx.y);
        const P2 last = k ? path.points[k - 1] : tx;
        const double a = std::atan2(last.x - rx.x, last.y - rx.y) * 180.0 / 3.14159265358979323846;
        path.aoa_deg = a < 0.0 ? a + 360.0 : a;
        return path;
    }

    inline std::vector<OraclePath> enumerate_paths(const std::vector<Seg> &walls, P2 tx, P2 rx, int max_bounces)
    {
        std::vector<OraclePath> out;
        std::vector<std::size_t> seq;
        // odometer over all sequences of each length
        for (int len = 0; len <= max_bounces; ++len)
        {
            seq.assign(std::size_t(len), 0);
            for (;;)
            {
                if (auto p = unfold(walls, seq, tx, rx))
                    out.push_back(*p);
                int pos = len - 1;
                while (pos >= 0 && ++seq[std::size_t(pos)] == walls.size())
                    seq[std::size_t(pos--)] = 0;
                if (pos < 0)
                    break;
            }
        }
        return out;
    }
}

#endif
