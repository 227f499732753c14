// SPDX-License-Identifier: Apache-2.0
//
// capamimo: beamforming optimization library for continuous-aperture MIMO
// Copyright (C) 2026 capamimo contributors
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

#include "capa/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace capa {

std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) return {p0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    // P'_n(x) = n (P_{n-1}(x) - x P_n(x)) / (1 - x^2)
    const double dp = n * (p0 - x * p1) / (1.0 - x * x);
    return {p1, dp};
}

namespace {

GaussLegendreRule compute_rule(int order) {
    GaussLegendreRule rule;
    rule.order = order;
    rule.nodes.resize(order);
    rule.weights.resize(order);

    const int half = (order + 1) / 2;
    constexpr double tol = 1e-14;
    for (int i = 0; i < half; ++i) {
        // Asymptotic (Chebyshev-like) initial guess for the i-th root.
        double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre_with_derivative(order, z);
            dp = d;
            const double step = p / d;
            z -= step;
            if (std::abs(step) <= tol) break;
        }
        auto [p, d] = legendre_with_derivative(order, z);
        (void)p;
        dp = d;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[order - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");

    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

std::complex<double> integrate_1d(const GaussLegendreRule& rule,
                                  const std::function<std::complex<double>(double)>& f,
                                  double a, double b) {
    if (!(a < b)) throw std::invalid_argument("integrate_1d: requires a < b");
    const double scale = 0.5 * (b - a);
    const double shift = 0.5 * (a + b);
    std::complex<double> sum = 0.0;
    for (int m = 0; m < rule.order; ++m)
        sum += rule.weights[m] * f(scale * rule.nodes[m] + shift);
    return scale * sum;
}

std::complex<double> tensor_integrate_2d(const GaussLegendreRule& rule,
                                         const std::function<std::complex<double>(double, double)>& f,
                                         double ax, double bx, double ay, double by) {
    if (!(ax < bx) || !(ay < by)) throw std::invalid_argument("tensor_integrate_2d: degenerate rectangle");
    const double sx = 0.5 * (bx - ax), cx = 0.5 * (ax + bx);
    const double sy = 0.5 * (by - ay), cy = 0.5 * (ay + by);
    std::complex<double> sum = 0.0;
    for (int n = 0; n < rule.order; ++n) {
        const double x = sx * rule.nodes[n] + cx;
        std::complex<double> row = 0.0;
        for (int m = 0; m < rule.order; ++m)
            row += rule.weights[m] * f(x, sy * rule.nodes[m] + cy);
        sum += rule.weights[n] * row;
    }
    return sx * sy * sum;
}

}  // namespace capa
