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

#include "capa/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace capa {

Eigen::Matrix3d rotation_matrix(double alpha, double beta, double phi) {
    Eigen::Matrix3d rz, ry, rx;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    rz << ca, -sa, 0.0,
          sa, ca, 0.0,
          0.0, 0.0, 1.0;
    ry << cb, 0.0, sb,
          0.0, 1.0, 0.0,
          -sb, 0.0, cb;
    rx << 1.0, 0.0, 0.0,
          0.0, cp, -sp,
          0.0, sp, cp;
    return rz * ry * rx;
}

ApertureGeometry ApertureGeometry::square(double area, const Eigen::Vector3d& center,
                                          double alpha, double beta, double phi) {
    if (!(area > 0.0)) throw std::invalid_argument("ApertureGeometry::square: area must be > 0");
    ApertureGeometry g;
    g.len_x = g.len_y = std::sqrt(area);
    g.center = center;
    g.alpha = alpha;
    g.beta = beta;
    g.phi = phi;
    return g;
}

QuadratureGrid build_grid(const ApertureGeometry& geometry, const GaussLegendreRule& rule) {
    if (!(geometry.len_x > 0.0) || !(geometry.len_y > 0.0))
        throw std::invalid_argument("build_grid: aperture edge lengths must be > 0");

    const int m = rule.order;
    const Eigen::Index count = static_cast<Eigen::Index>(m) * m;
    QuadratureGrid grid;
    grid.geometry = geometry;
    grid.order = m;
    grid.points.resize(3, count);
    grid.local_points.resize(2, count);
    grid.weights.resize(count);

    const Eigen::Matrix3d rot = geometry.rotation();
    const double quarter_area = 0.25 * geometry.area();
    Eigen::Index idx = 0;
    for (int n = 0; n < m; ++n) {
        const double x = 0.5 * geometry.len_x * rule.nodes[n];
        for (int mm = 0; mm < m; ++mm, ++idx) {
            const double y = 0.5 * geometry.len_y * rule.nodes[mm];
            grid.local_points(0, idx) = x;
            grid.local_points(1, idx) = y;
            grid.points.col(idx) = rot * Eigen::Vector3d(x, y, 0.0) + geometry.center;
            grid.weights[idx] = quarter_area * rule.weights[n] * rule.weights[mm];
        }
    }
    return grid;
}

}  // namespace capa
