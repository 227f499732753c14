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

#ifndef CAPA_BASELINES_HPP
#define CAPA_BASELINES_HPP

#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "capa/channel.hpp"

namespace capa {

/// SVD-plus-water-filling solution of a discrete MIMO beamforming problem.
struct SvdBeamformingResult {
    Eigen::MatrixXcd beams;         // modes x N, orthonormal columns
    Eigen::VectorXd singular_values;  // descending
    Eigen::VectorXd powers;         // per-stream, sum = P_T
    double rate_bits = 0.0;
    std::string method;
};

/// Water-filling P_k = max(0, mu - noise / g_k) with mu chosen by bisection
/// so the powers sum to the budget. At least one gain must be positive.
Eigen::VectorXd water_fill(const Eigen::VectorXd& gains, double total_power, double noise);

/// SVD of the wavenumber-domain channel, top-N modes, water-filled powers.
SvdBeamformingResult fourier_svd_solve(const WavenumberChannel& wchan, int streams,
                                       const PhysicalConstants& constants);

/// Same procedure on a discrete-array channel (SPDA or metasurface).
SvdBeamformingResult spda_svd_solve(const DiscreteArrayChannel& dchan, int streams,
                                    const PhysicalConstants& constants);

struct DenseOptimalOptions {
    bool verify = false;  // doubling check on the converged rate
    std::size_t max_matrix_entries = 60'000'000;  // memory guard on the K^2 x K^2 channel
    double verify_tolerance_bits = 1e-3;
};

/// Default dense-sampling resolution: 60 per axis at the 2.4 GHz scale,
/// growing as ceil(4 L / lambda) (two samples per half wavelength).
int dense_default_samples(const ApertureGeometry& geom, const PhysicalConstants& constants);

/// Discrete surrogate of the continuous eigenproblem: uniform dense sampling
/// of both apertures with cell-area weights, SVD, water-filling. Serves as
/// the optimality reference for the WMMSE solver.
SvdBeamformingResult dense_optimal_solve(const ApertureGeometry& tx_geom,
                                         const ApertureGeometry& rx_geom,
                                         const PhysicalConstants& constants,
                                         int samples_per_axis, int streams,
                                         const DenseOptimalOptions& options = {});

}  // namespace capa

#endif  // CAPA_BASELINES_HPP
