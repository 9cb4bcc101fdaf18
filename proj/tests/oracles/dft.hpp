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

#ifndef THZHALL_ORACLE_DFT_HPP
#define THZHALL_ORACLE_DFT_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

// Direct O(N^2) DFT by matrix-vector product, twiddles from an exact index table
namespace oracle
{
    using cplx = std::complex<double>;

    // sign = +1: h[n] = 1/N sum_k H[k] w^{kn}, w = exp(+j 2 pi / N); sign = -1: unscaled forward
    inline std::vector<cplx> direct_dft(const std::vector<cplx> &x, int sign)
    {
        const std::size_t n = x.size();
        std::vector<cplx> w(n);
        for (std::size_t k = 0; k < n; ++k)
            w[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * double(k) / double(n));
        std::vector<cplx> out(n, cplx(0.0, 0.0));
        for (std::size_t m = 0; m < n; ++m)
        {
            cplx acc(0.0, 0.0);
            std::size_t idx = 0;
            for (std::size_t k = 0; k < n; ++k)
            {
                acc += x[k] * w[idx];
                idx += m;
                if (idx >= n)
                    idx -= n;
            }
            out[m] = sign > 0 ? acc / double(n) : acc;
        }
        return out;
    }
}

#endif
