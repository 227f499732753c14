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

#ifndef CAPA_QUADRATURE_HPP
#define CAPA_QUADRATURE_HPP

#include <complex>
#include <functional>

#include <Eigen/Core>

namespace capa {

/// One-dimensional Gauss-Legendre rule on (-1, 1).
///
/// Nodes are the roots of the Legendre polynomial P_M, strictly increasing
/// and symmetric about zero; weights are positive and sum to 2. The rule
/// integrates polynomials of degree <= 2M-1 exactly.
struct GaussLegendreRule {
    int order = 0;            // number of 1-D sample points M
    Eigen::VectorXd nodes;    // ascending, in (-1, 1)
    Eigen::VectorXd weights;  // positive, sum = 2
};

/// Returns the cached Gauss-Legendre rule of the given order.
/// Nodes are computed by Newton iteration on P_M with asymptotic initial
/// guesses (tolerance 1e-14). Throws std::invalid_argument if order < 1.
const GaussLegendreRule& gauss_legendre(int order);

/// Legendre polynomial P_n(x) and its derivative via the three-term
/// recurrence. Exposed for test oracles.
std::pair<double, double> legendre_with_derivative(int n, double x);

/// Integrates f over [a, b] with the affinely mapped rule. Non-finite
/// samples of f propagate into the result.
std::complex<double> integrate_1d(const GaussLegendreRule& rule,
                                  const std::function<std::complex<double>(double)>& f,
                                  double a, double b);

/// Tensor-product integration of f(x, y) over [ax, bx] x [ay, by];
/// equivalent to nesting integrate_1d in each axis.
std::complex<double> tensor_integrate_2d(const GaussLegendreRule& rule,
                                         const std::function<std::complex<double>(double, double)>& f,
                                         double ax, double bx, double ay, double by);

}  // namespace capa

#endif  // CAPA_QUADRATURE_HPP
