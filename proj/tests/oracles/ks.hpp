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

#ifndef THZHALL_ORACLE_KS_HPP
#define THZHALL_ORACLE_KS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

// One-sample Kolmogorov-Smirnov statistic against a log-normal CDF (natural log)
namespace oracle
{
    inline double lognormal_cdf(double x, double mu, double sigma)
    {
        if (x <= 0.0)
            return 0.0;
        return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::sqrt(2.0)));
    }

    inline double ks_statistic(std::vector<double> xs, double mu, double sigma)
    {
        std::sort(xs.begin(), xs.end());
        const double n = double(xs.size());
        double d = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            const double f = lognormal_cdf(xs[i], mu, sigma);
            d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
        }
        return d;
    }

    // Asymptotic critical value at the 1% level
    inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(double(n)); }
}

#endif
