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

#ifndef CAPA_ANALYSIS_HPP
#define CAPA_ANALYSIS_HPP

#include <Eigen/Core>

#include "capa/channel.hpp"
#include "capa/wmmse.hpp"

namespace capa {

/// Linear receiver sampled at the Rx quadrature nodes; row i is v(r_i)^T.
struct ReceiverMatrix {
    Eigen::MatrixXcd samples;  // M_s x N
};

/// log2 det(I_N + Q / noise) with Q = W^H Phi_T H^H Phi_R H Phi_T W.
double achievable_rate(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                       double noise);

/// Q itself (Hermitian PSD, N x N).
Eigen::MatrixXcd beamformer_gram(const BeamformerMatrix& beamformer, const SampledChannel& chan);

/// No-SIC MMSE receiver rows v(r_i) = h(r_i) Phi_T W Theta^-1 with
/// Theta = noise I + Q.
ReceiverMatrix mmse_receiver(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                             double noise);

/// Symbol-error covariance of an arbitrary linear receiver,
/// E = (I - V^H Phi_R H Phi_T W)(...)^H + noise V^H Phi_R V.
Eigen::MatrixXcd mse_matrix(const BeamformerMatrix& beamformer, const ReceiverMatrix& receiver,
                            const SampledChannel& chan, double noise);

struct SicRates {
    Eigen::VectorXd per_stream;  // bits/s/Hz
    double total = 0.0;
};

/// Sequential MMSE-SIC receiver rates, decoding streams in column order with
/// interference only from not-yet-decoded streams. The total telescopes to
/// the log-det rate and serves as an independent oracle for it.
SicRates sic_rate_oracle(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                         double noise);

/// Desired-signal / interference powers xi(n, m) = |(V^H Phi_R H Phi_T W)(n, m)|^2
/// with V the no-SIC MMSE receiver at the given noise power.
struct CorrelationMap {
    Eigen::MatrixXd xi;  // N x N, nonnegative
};

CorrelationMap stream_correlation(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                                  double noise);

enum class DofWeighting {
    sqrt_phi,  // singular values of Phi_R^(1/2) H Phi_T^(1/2)
    raw        // singular values of H itself
};

/// Spatial degrees of freedom: the number of channel singular values within
/// threshold_db of the largest, on a Gauss-Legendre sampling of order M.
int dof_estimate(const ApertureGeometry& tx_geom, const ApertureGeometry& rx_geom,
                 const PhysicalConstants& constants, int quadrature_order,
                 double threshold_db = 10.0, DofWeighting weighting = DofWeighting::sqrt_phi);

/// Singular-value DoF count on a premultiplied matrix (shared by the
/// estimator and external oracles).
int dof_from_singular_values(const Eigen::VectorXd& values, double threshold_db);

/// Closed-form far-field approximation A_T A_R / (lambda D)^2.
double dof_closed_form(const ApertureGeometry& tx_geom, const ApertureGeometry& rx_geom,
                       const PhysicalConstants& constants, double distance);

}  // namespace capa

#endif  // CAPA_ANALYSIS_HPP
