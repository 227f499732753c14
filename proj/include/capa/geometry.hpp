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

#ifndef CAPA_GEOMETRY_HPP
#define CAPA_GEOMETRY_HPP

#include <Eigen/Core>

#include "capa/quadrature.hpp"

namespace capa {

/// R_z(alpha) * R_y(beta) * R_x(phi); orthonormal with determinant +1.
Eigen::Matrix3d rotation_matrix(double alpha, double beta, double phi);

/// Rectangular aperture: edge lengths, center offset, pose angles and the
/// local polarization direction (y-axis by default for both apertures).
struct ApertureGeometry {
    double len_x = 0.0;  // m
    double len_y = 0.0;  // m
    Eigen::Vector3d center = Eigen::Vector3d::Zero();  // m
    double alpha = 0.0;  // rotation about z, rad
    double beta = 0.0;   // rotation about y, rad
    double phi = 0.0;    // rotation about x, rad
    Eigen::Vector3d local_polarization = Eigen::Vector3d(0.0, 1.0, 0.0);

    double area() const { return len_x * len_y; }
    Eigen::Matrix3d rotation() const { return rotation_matrix(alpha, beta, phi); }
    /// Polarization direction in the global frame (unit norm).
    Eigen::Vector3d polarization() const { return rotation() * local_polarization; }

    /// Convenience for a square aperture of the given area at a center offset.
    static ApertureGeometry square(double area, const Eigen::Vector3d& center,
                                   double alpha = 0.0, double beta = 0.0, double phi = 0.0);
};

/// Gauss-Legendre sample points lifted onto an aperture.
///
/// Points are stored in raster order (x-index outer, y-index inner); the
/// diagonal of the quadrature weight matrix Phi uses the same ordering, with
/// entries (A/4) * w_n * w_m in square meters, so trace(Phi) = A.
struct QuadratureGrid {
    ApertureGeometry geometry;
    int order = 0;                  // 1-D rule order M; sample count is M*M
    Eigen::Matrix3Xd points;        // global coordinates, 3 x M_s
    Eigen::Matrix2Xd local_points;  // in-plane coordinates before pose, 2 x M_s
    Eigen::VectorXd weights;        // Phi diagonal, M_s

    Eigen::Index sample_count() const { return points.cols(); }
};

QuadratureGrid build_grid(const ApertureGeometry& geometry, const GaussLegendreRule& rule);

}  // namespace capa

#endif  // CAPA_GEOMETRY_HPP
