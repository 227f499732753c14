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

#include "capa/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "capa/linalg.hpp"

namespace capa {

Eigen::VectorXd water_fill(const Eigen::VectorXd& gains, double total_power, double noise) {
    if (!(total_power > 0.0)) throw std::invalid_argument("water_fill: total power must be > 0");
    if (!(noise > 0.0)) throw std::invalid_argument("water_fill: noise must be > 0");
    if (gains.size() == 0 || (gains.array() < 0.0).any())
        throw std::invalid_argument("water_fill: gains must be nonnegative");
    const double max_gain = gains.maxCoeff();
    if (!(max_gain > 0.0)) throw std::invalid_argument("water_fill: all gains are zero");

    auto allocated = [&](double mu) {
        double sum = 0.0;
        for (Eigen::Index k = 0; k < gains.size(); ++k)
            if (gains[k] > 0.0) sum += std::max(0.0, mu - noise / gains[k]);
        return sum;
    };

    // The total allocation is continuous and strictly increasing in mu once
    // positive, so bisection on [noise/max_gain, noise/max_gain + P_T] brackets it.
    double lo = noise / max_gain;
    double hi = lo + total_power;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (allocated(mid) < total_power)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) break;
    }
    const double mu = 0.5 * (lo + hi);

    Eigen::VectorXd powers = Eigen::VectorXd::Zero(gains.size());
    double sum = 0.0;
    for (Eigen::Index k = 0; k < gains.size(); ++k) {
        if (gains[k] > 0.0) powers[k] = std::max(0.0, mu - noise / gains[k]);
        sum += powers[k];
    }
    if (sum > 0.0) powers *= total_power / sum;  // close the bisection residual exactly
    return powers;
}

namespace {

SvdBeamformingResult svd_water_fill(const Eigen::MatrixXcd& channel, int streams,
                                    const PhysicalConstants& constants, std::string method) {
    if (streams < 1 || streams > std::min(channel.rows(), channel.cols()))
        throw std::invalid_argument(method + ": stream count must lie in [1, min(modes)]");

    SvdBeamformingResult result;
    result.method = std::move(method);
    // A full SVD is prohibitive above a few thousand modes; when only a thin
    // leading subspace is requested, seeded subspace iteration supplies it.
    if (channel.rows() + channel.cols() > 2048 &&
        static_cast<Eigen::Index>(streams) * 4 < std::min(channel.rows(), channel.cols())) {
        TopSvd top = top_singular_triplets(channel, streams);
        result.singular_values = top.values;
        result.beams = top.right_vectors;
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(channel, Eigen::ComputeThinV);
        result.singular_values = svd.singularValues().head(streams);
        result.beams = svd.matrixV().leftCols(streams);
    }

    const Eigen::VectorXd gains = result.singular_values.array().square();
    result.powers = water_fill(gains, constants.power_budget, constants.noise_power);
    double rate = 0.0;
    for (Eigen::Index k = 0; k < gains.size(); ++k)
        rate += std::log1p(gains[k] * result.powers[k] / constants.noise_power);
    result.rate_bits = rate / std::numbers::ln2;
    return result;
}

}  // namespace

SvdBeamformingResult fourier_svd_solve(const WavenumberChannel& wchan, int streams,
                                       const PhysicalConstants& constants) {
    return svd_water_fill(wchan.matrix, streams, constants, "fourier_svd");
}

SvdBeamformingResult spda_svd_solve(const DiscreteArrayChannel& dchan, int streams,
                                    const PhysicalConstants& constants) {
    return svd_water_fill(dchan.matrix, streams, constants, "spda");
}

int dense_default_samples(const ApertureGeometry& geom, const PhysicalConstants& constants) {
    const double edge = std::max(geom.len_x, geom.len_y);
    const int nyquist = static_cast<int>(std::ceil(4.0 * edge / constants.wavelength()));
    return std::max(60, nyquist);
}

namespace {

// Uniform midpoint sampling of an aperture, returning global positions.
Eigen::Matrix3Xd uniform_positions(const ApertureGeometry& geom, int samples_per_axis) {
    Eigen::Matrix3Xd pos(3, static_cast<Eigen::Index>(samples_per_axis) * samples_per_axis);
    const Eigen::Matrix3d rot = geom.rotation();
    const double dx = geom.len_x / samples_per_axis;
    const double dy = geom.len_y / samples_per_axis;
    Eigen::Index idx = 0;
    for (int n = 0; n < samples_per_axis; ++n)
        for (int m = 0; m < samples_per_axis; ++m, ++idx) {
            const Eigen::Vector3d local((n + 0.5) * dx - 0.5 * geom.len_x,
                                        (m + 0.5) * dy - 0.5 * geom.len_y, 0.0);
            pos.col(idx) = rot * local + geom.center;
        }
    return pos;
}

SvdBeamformingResult dense_solve_once(const ApertureGeometry& tx_geom,
                                      const ApertureGeometry& rx_geom,
                                      const PhysicalConstants& constants,
                                      int samples_per_axis, int streams) {
    const Eigen::Matrix3Xd tx_pos = uniform_positions(tx_geom, samples_per_axis);
    const Eigen::Matrix3Xd rx_pos = uniform_positions(rx_geom, samples_per_axis);
    const Eigen::Vector3d u_t = tx_geom.polarization();
    const Eigen::Vector3d u_r = rx_geom.polarization();

    const double cells = static_cast<double>(samples_per_axis) * samples_per_axis;
    const double cell_weight =
        std::sqrt(tx_geom.area() / cells) * std::sqrt(rx_geom.area() / cells);

    Eigen::MatrixXcd weighted(rx_pos.cols(), tx_pos.cols());
    for (Eigen::Index j = 0; j < tx_pos.cols(); ++j)
        for (Eigen::Index i = 0; i < rx_pos.cols(); ++i)
            weighted(i, j) = cell_weight *
                green_scalar(rx_pos.col(i), tx_pos.col(j), u_r, u_t, constants);

    return svd_water_fill(weighted, streams, constants, "dense_optimal");
}

}  // namespace

SvdBeamformingResult dense_optimal_solve(const ApertureGeometry& tx_geom,
                                         const ApertureGeometry& rx_geom,
                                         const PhysicalConstants& constants,
                                         int samples_per_axis, int streams,
                                         const DenseOptimalOptions& options) {
    if (samples_per_axis < 1)
        throw std::invalid_argument("dense_optimal_solve: samples_per_axis must be >= 1");
    const std::size_t cells = static_cast<std::size_t>(samples_per_axis) * samples_per_axis;
    const std::size_t worst_cells = options.verify ? 4 * cells : cells;
    if (worst_cells * worst_cells > options.max_matrix_entries)
        throw std::invalid_argument("dense_optimal_solve: sample budget exceeded (raise max_matrix_entries)");

    SvdBeamformingResult result =
        dense_solve_once(tx_geom, rx_geom, constants, samples_per_axis, streams);
    if (options.verify) {
        const SvdBeamformingResult doubled =
            dense_solve_once(tx_geom, rx_geom, constants, 2 * samples_per_axis, streams);
        if (std::abs(doubled.rate_bits - result.rate_bits) >= options.verify_tolerance_bits)
            throw std::runtime_error("dense_optimal_solve: rate not converged in sampling density");
    }
    return result;
}

}  // namespace capa
