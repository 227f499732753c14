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

#ifndef CAPA_CHANNEL_HPP
#define CAPA_CHANNEL_HPP

#include <complex>

#include <Eigen/Core>

#include "capa/geometry.hpp"

namespace capa {

/// Carrier, medium and link-budget scalars, all in SI units.
///
/// The speed of light defaults to 3e8 m/s: the wavenumber truncation counts
/// (81/729/2601 modes at 2.4/7.8/15 GHz for a 0.5 m aperture) require
/// L/lambda to be an exact integer at those frequencies. The power budget
/// default 0.1 A^2 is the evaluation setup's 100 mA^2.
struct PhysicalConstants {
    double frequency = 2.4e9;        // Hz
    double light_speed = 3.0e8;      // m/s
    double impedance = 120.0 * M_PI; // ohm
    double noise_power = 5.6e-3;     // sigma^2, V^2/m^2
    double power_budget = 0.1;       // P_T, A^2

    double wavelength() const { return light_speed / frequency; }
    void validate() const;
};

/// Polarized scalar projection of the free-space dyadic Green's function:
/// u_r^T G(r, s) u_t with G = -j eta exp(-j 2 pi d / lambda) / (2 lambda d)
/// * (I - dd^T / d^2). Throws std::domain_error when r == s.
std::complex<double> green_scalar(const Eigen::Vector3d& receive_point,
                                  const Eigen::Vector3d& source_point,
                                  const Eigen::Vector3d& receive_polarization,
                                  const Eigen::Vector3d& source_polarization,
                                  const PhysicalConstants& constants);

/// Channel sampled at Gauss-Legendre nodes: matrix(i, j) = h(r_i, s_j),
/// rows over Rx samples, columns over Tx samples, both in raster order.
struct SampledChannel {
    QuadratureGrid tx;
    QuadratureGrid rx;
    Eigen::MatrixXcd matrix;
    PhysicalConstants constants;

    Eigen::Index tx_samples() const { return matrix.cols(); }
    Eigen::Index rx_samples() const { return matrix.rows(); }
};

SampledChannel build_sampled_channel(const QuadratureGrid& tx_grid,
                                     const QuadratureGrid& rx_grid,
                                     const PhysicalConstants& constants);

/// Green's-function samples from every Rx grid point to an arbitrary Tx-side
/// point, conjugated: entry i = conj(h(r_i, s)). Row vector of length M_s.
Eigen::RowVectorXcd green_row_to_point(const SampledChannel& chan, const Eigen::Vector3d& s);

/// Wavenumber (spatial Fourier) truncation orders per axis: ceil(L/lambda).
struct WavenumberTruncation {
    int tx_x = 0, tx_y = 0, rx_x = 0, rx_y = 0;
    int tx_modes() const { return (2 * tx_x + 1) * (2 * tx_y + 1); }
    int rx_modes() const { return (2 * rx_x + 1) * (2 * rx_y + 1); }
};

WavenumberTruncation wavenumber_truncation(const ApertureGeometry& tx_geom,
                                           const ApertureGeometry& rx_geom,
                                           const PhysicalConstants& constants);

/// Channel projected onto truncated Fourier bases of both apertures,
/// H_w(k, l) = psi_R(k)^H Phi_R H Phi_T psi_T(l), with the 1/sqrt(A)
/// normalized basis evaluated at the quadrature nodes.
struct WavenumberChannel {
    WavenumberTruncation truncation;
    Eigen::MatrixXcd matrix;  // rx_modes x tx_modes
    PhysicalConstants constants;

    /// Flattened column index of Tx mode (n, m), n in [-tx_x, tx_x] outer,
    /// m in [-tx_y, tx_y] inner.
    Eigen::Index tx_mode_index(int n, int m) const;
    Eigen::Index rx_mode_index(int n, int m) const;
};

WavenumberChannel build_wavenumber_channel(const SampledChannel& chan);

/// Discrete planar array (SPDA or metasurface): element centers on a
/// d-spaced lattice, channel entry A_d * h(r_bar, s_bar).
struct DiscreteArrayChannel {
    double spacing = 0.0;           // m
    double element_aperture = 0.0;  // A_d, m^2
    int tx_count_x = 0, tx_count_y = 0;
    int rx_count_x = 0, rx_count_y = 0;
    Eigen::Matrix3Xd tx_positions;  // 3 x (tx_count_x * tx_count_y)
    Eigen::Matrix3Xd rx_positions;
    Eigen::MatrixXcd matrix;        // rx elements x tx elements
    PhysicalConstants constants;

    Eigen::Index tx_elements() const { return matrix.cols(); }
    Eigen::Index rx_elements() const { return matrix.rows(); }
};

/// Half-wavelength array with the standard effective aperture lambda^2 / 4 pi.
DiscreteArrayChannel build_spda_channel(const ApertureGeometry& tx_geom,
                                        const ApertureGeometry& rx_geom,
                                        const PhysicalConstants& constants);

/// Same lattice construction with caller-specified element spacing and area
/// (metasurface evaluation). Throws std::invalid_argument when the spacing
/// exceeds an aperture edge (empty array) or the area exceeds spacing^2.
DiscreteArrayChannel sample_metasurface_channel(const ApertureGeometry& tx_geom,
                                                const ApertureGeometry& rx_geom,
                                                const PhysicalConstants& constants,
                                                double element_spacing,
                                                double element_area);

}  // namespace capa

#endif  // CAPA_CHANNEL_HPP
