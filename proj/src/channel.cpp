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

#include "capa/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace capa {

void PhysicalConstants::validate() const {
    if (!(frequency > 0.0)) throw std::invalid_argument("constants.frequency must be > 0");
    if (!(light_speed > 0.0)) throw std::invalid_argument("constants.light_speed must be > 0");
    if (!(impedance > 0.0)) throw std::invalid_argument("constants.impedance must be > 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("constants.noise_power must be > 0");
    if (!(power_budget > 0.0)) throw std::invalid_argument("constants.power_budget must be > 0");
}

std::complex<double> green_scalar(const Eigen::Vector3d& receive_point,
                                  const Eigen::Vector3d& source_point,
                                  const Eigen::Vector3d& receive_polarization,
                                  const Eigen::Vector3d& source_polarization,
                                  const PhysicalConstants& constants) {
    const Eigen::Vector3d d = receive_point - source_point;
    const double dist = d.norm();
    if (dist == 0.0) throw std::domain_error("green_scalar: receive point coincides with source point");

    const double lambda = constants.wavelength();
    const double phase = -2.0 * M_PI * dist / lambda;
    // u_r^T (I - dd^T/|d|^2) u_t
    const double projection = receive_polarization.dot(source_polarization)
        - receive_polarization.dot(d) * source_polarization.dot(d) / (dist * dist);
    const std::complex<double> amplitude =
        std::complex<double>(0.0, -constants.impedance / (2.0 * lambda * dist));
    return amplitude * std::polar(1.0, phase) * projection;
}

SampledChannel build_sampled_channel(const QuadratureGrid& tx_grid,
                                     const QuadratureGrid& rx_grid,
                                     const PhysicalConstants& constants) {
    constants.validate();
    SampledChannel chan;
    chan.tx = tx_grid;
    chan.rx = rx_grid;
    chan.constants = constants;

    const Eigen::Vector3d u_t = tx_grid.geometry.polarization();
    const Eigen::Vector3d u_r = rx_grid.geometry.polarization();
    const Eigen::Index nt = tx_grid.sample_count();
    const Eigen::Index nr = rx_grid.sample_count();
    chan.matrix.resize(nr, nt);
    for (Eigen::Index j = 0; j < nt; ++j) {
        const Eigen::Vector3d s = tx_grid.points.col(j);
        for (Eigen::Index i = 0; i < nr; ++i) {
            const Eigen::Vector3d r = rx_grid.points.col(i);
            if ((r - s).norm() == 0.0)
                throw std::domain_error("build_sampled_channel: apertures intersect at rx sample " +
                                        std::to_string(i) + ", tx sample " + std::to_string(j));
            chan.matrix(i, j) = green_scalar(r, s, u_r, u_t, constants);
        }
    }
    return chan;
}

Eigen::RowVectorXcd green_row_to_point(const SampledChannel& chan, const Eigen::Vector3d& s) {
    const Eigen::Vector3d u_t = chan.tx.geometry.polarization();
    const Eigen::Vector3d u_r = chan.rx.geometry.polarization();
    const Eigen::Index nr = chan.rx_samples();
    Eigen::RowVectorXcd row(nr);
    for (Eigen::Index i = 0; i < nr; ++i)
        row[i] = std::conj(green_scalar(chan.rx.points.col(i), s, u_r, u_t, chan.constants));
    return row;
}

WavenumberTruncation wavenumber_truncation(const ApertureGeometry& tx_geom,
                                           const ApertureGeometry& rx_geom,
                                           const PhysicalConstants& constants) {
    const double lambda = constants.wavelength();
    WavenumberTruncation t;
    t.tx_x = static_cast<int>(std::ceil(tx_geom.len_x / lambda));
    t.tx_y = static_cast<int>(std::ceil(tx_geom.len_y / lambda));
    t.rx_x = static_cast<int>(std::ceil(rx_geom.len_x / lambda));
    t.rx_y = static_cast<int>(std::ceil(rx_geom.len_y / lambda));
    return t;
}

Eigen::Index WavenumberChannel::tx_mode_index(int n, int m) const {
    return static_cast<Eigen::Index>(n + truncation.tx_x) * (2 * truncation.tx_y + 1) +
           (m + truncation.tx_y);
}

Eigen::Index WavenumberChannel::rx_mode_index(int n, int m) const {
    return static_cast<Eigen::Index>(n + truncation.rx_x) * (2 * truncation.rx_y + 1) +
           (m + truncation.rx_y);
}

namespace {

// Fourier basis samples psi_{n,m}(p) = exp(j 2 pi (n x / L_x + m y / L_y)) / sqrt(A)
// at the grid's in-plane coordinates; one column per (n, m) in raster order.
Eigen::MatrixXcd basis_at_nodes(const QuadratureGrid& grid, int orders_x, int orders_y) {
    const Eigen::Index samples = grid.sample_count();
    const Eigen::Index modes = static_cast<Eigen::Index>(2 * orders_x + 1) * (2 * orders_y + 1);
    const double inv_sqrt_area = 1.0 / std::sqrt(grid.geometry.area());
    Eigen::MatrixXcd psi(samples, modes);
    Eigen::Index col = 0;
    for (int n = -orders_x; n <= orders_x; ++n) {
        for (int m = -orders_y; m <= orders_y; ++m, ++col) {
            for (Eigen::Index i = 0; i < samples; ++i) {
                const double arg = 2.0 * M_PI * (n * grid.local_points(0, i) / grid.geometry.len_x +
                                                 m * grid.local_points(1, i) / grid.geometry.len_y);
                psi(i, col) = inv_sqrt_area * std::polar(1.0, arg);
            }
        }
    }
    return psi;
}

}  // namespace

WavenumberChannel build_wavenumber_channel(const SampledChannel& chan) {
    WavenumberChannel wchan;
    wchan.constants = chan.constants;
    wchan.truncation = wavenumber_truncation(chan.tx.geometry, chan.rx.geometry, chan.constants);

    const Eigen::MatrixXcd psi_t = basis_at_nodes(chan.tx, wchan.truncation.tx_x, wchan.truncation.tx_y);
    const Eigen::MatrixXcd psi_r = basis_at_nodes(chan.rx, wchan.truncation.rx_x, wchan.truncation.rx_y);

    // psi_R^H Phi_R H Phi_T psi_T, grouped to keep the large product M_s-sized.
    const Eigen::MatrixXcd weighted =
        chan.rx.weights.asDiagonal() * chan.matrix * chan.tx.weights.asDiagonal();
    wchan.matrix = psi_r.adjoint() * (weighted * psi_t);
    return wchan;
}

namespace {

DiscreteArrayChannel build_lattice_channel(const ApertureGeometry& tx_geom,
                                           const ApertureGeometry& rx_geom,
                                           const PhysicalConstants& constants,
                                           double spacing, double element_area,
                                           bool require_fit) {
    constants.validate();
    if (!(spacing > 0.0)) throw std::invalid_argument("element spacing must be > 0");
    if (!(element_area > 0.0) || element_area > spacing * spacing + 1e-15)
        throw std::invalid_argument("element area must lie in (0, spacing^2]");
    if (require_fit &&
        (spacing > tx_geom.len_x || spacing > tx_geom.len_y ||
         spacing > rx_geom.len_x || spacing > rx_geom.len_y))
        throw std::invalid_argument("element spacing exceeds an aperture edge: empty array");

    DiscreteArrayChannel dchan;
    dchan.spacing = spacing;
    dchan.element_aperture = element_area;
    dchan.constants = constants;
    dchan.tx_count_x = static_cast<int>(std::ceil(tx_geom.len_x / spacing));
    dchan.tx_count_y = static_cast<int>(std::ceil(tx_geom.len_y / spacing));
    dchan.rx_count_x = static_cast<int>(std::ceil(rx_geom.len_x / spacing));
    dchan.rx_count_y = static_cast<int>(std::ceil(rx_geom.len_y / spacing));

    auto lattice = [&](const ApertureGeometry& geom, int count_x, int count_y) {
        Eigen::Matrix3Xd pos(3, static_cast<Eigen::Index>(count_x) * count_y);
        const Eigen::Matrix3d rot = geom.rotation();
        Eigen::Index idx = 0;
        for (int n = 0; n < count_x; ++n)
            for (int m = 0; m < count_y; ++m, ++idx) {
                const Eigen::Vector3d local(n * spacing - 0.5 * geom.len_x,
                                            m * spacing - 0.5 * geom.len_y, 0.0);
                pos.col(idx) = rot * local + geom.center;
            }
        return pos;
    };
    dchan.tx_positions = lattice(tx_geom, dchan.tx_count_x, dchan.tx_count_y);
    dchan.rx_positions = lattice(rx_geom, dchan.rx_count_x, dchan.rx_count_y);

    const Eigen::Vector3d u_t = tx_geom.polarization();
    const Eigen::Vector3d u_r = rx_geom.polarization();
    const Eigen::Index nt = dchan.tx_positions.cols();
    const Eigen::Index nr = dchan.rx_positions.cols();
    dchan.matrix.resize(nr, nt);
    for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < nr; ++i)
            dchan.matrix(i, j) = element_area *
                green_scalar(dchan.rx_positions.col(i), dchan.tx_positions.col(j), u_r, u_t, constants);
    return dchan;
}

}  // namespace

DiscreteArrayChannel build_spda_channel(const ApertureGeometry& tx_geom,
                                        const ApertureGeometry& rx_geom,
                                        const PhysicalConstants& constants) {
    const double lambda = constants.wavelength();
    return build_lattice_channel(tx_geom, rx_geom, constants, 0.5 * lambda,
                                 lambda * lambda / (4.0 * M_PI), /*require_fit=*/false);
}

DiscreteArrayChannel sample_metasurface_channel(const ApertureGeometry& tx_geom,
                                                const ApertureGeometry& rx_geom,
                                                const PhysicalConstants& constants,
                                                double element_spacing,
                                                double element_area) {
    return build_lattice_channel(tx_geom, rx_geom, constants, element_spacing, element_area,
                                 /*require_fit=*/true);
}

}  // namespace capa
