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

#include "capa/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "capa/linalg.hpp"

namespace capa {

Eigen::MatrixXcd beamformer_gram(const BeamformerMatrix& beamformer, const SampledChannel& chan) {
    if (beamformer.node_count() != chan.tx_samples())
        throw std::invalid_argument("beamformer_gram: beamformer rows do not match Tx grid");
    const Eigen::MatrixXcd x = chan.tx.weights.asDiagonal() * beamformer.samples;
    const Eigen::MatrixXcd field = chan.matrix * x;
    Eigen::MatrixXcd gram = x.adjoint() * (chan.matrix.adjoint() * (chan.rx.weights.asDiagonal() * field));
    return 0.5 * (gram + gram.adjoint());
}

double achievable_rate(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                       double noise) {
    return log2_det_identity_plus(beamformer_gram(beamformer, chan), noise);
}

ReceiverMatrix mmse_receiver(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                             double noise) {
    if (!(noise > 0.0)) throw std::invalid_argument("mmse_receiver: noise must be > 0");
    Eigen::MatrixXcd theta = beamformer_gram(beamformer, chan);
    theta.diagonal().array() += noise;
    Eigen::LLT<Eigen::MatrixXcd> llt(theta);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("mmse_receiver: Theta is not positive definite");

    ReceiverMatrix v;
    const Eigen::MatrixXcd field = chan.matrix * (chan.tx.weights.asDiagonal() * beamformer.samples);
    v.samples = llt.solve(field.adjoint()).adjoint();
    return v;
}

Eigen::MatrixXcd mse_matrix(const BeamformerMatrix& beamformer, const ReceiverMatrix& receiver,
                            const SampledChannel& chan, double noise) {
    if (receiver.samples.rows() != chan.rx_samples())
        throw std::invalid_argument("mse_matrix: receiver rows do not match Rx grid");
    if (receiver.samples.cols() != beamformer.streams())
        throw std::invalid_argument("mse_matrix: stream counts differ");

    const Eigen::Index n = beamformer.streams();
    const Eigen::MatrixXcd field = chan.matrix * (chan.tx.weights.asDiagonal() * beamformer.samples);
    const Eigen::MatrixXcd weighted_v = chan.rx.weights.asDiagonal() * receiver.samples;
    const Eigen::MatrixXcd coupling = weighted_v.adjoint() * field;  // V^H Phi_R H Phi_T W
    const Eigen::MatrixXcd residual = Eigen::MatrixXcd::Identity(n, n) - coupling;
    Eigen::MatrixXcd mse = residual * residual.adjoint() + noise * (weighted_v.adjoint() * receiver.samples);
    return 0.5 * (mse + mse.adjoint());
}

SicRates sic_rate_oracle(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                         double noise) {
    if (!(noise > 0.0)) throw std::invalid_argument("sic_rate_oracle: noise must be > 0");
    const Eigen::Index n = beamformer.streams();
    const Eigen::MatrixXcd field = chan.matrix * (chan.tx.weights.asDiagonal() * beamformer.samples);
    // Gram of the received stream fields over the Rx aperture.
    Eigen::MatrixXcd full = field.adjoint() * (chan.rx.weights.asDiagonal() * field);
    full = 0.5 * (full + full.adjoint()).eval();

    SicRates rates;
    rates.per_stream.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double signal = full(k, k).real();
        double sinr = signal / noise;
        const Eigen::Index tail = n - k - 1;
        if (tail > 0) {
            const Eigen::VectorXcd q = full.block(k + 1, k, tail, 1);
            Eigen::MatrixXcd shifted = full.block(k + 1, k + 1, tail, tail) / noise;
            shifted.diagonal().array() += 1.0;
            const Eigen::VectorXcd solved = shifted.llt().solve(q);
            sinr -= (q.adjoint() * solved)(0, 0).real() / (noise * noise);
        }
        rates.per_stream[k] = std::log1p(std::max(sinr, 0.0)) / std::numbers::ln2;
    }
    rates.total = rates.per_stream.sum();
    return rates;
}

CorrelationMap stream_correlation(const BeamformerMatrix& beamformer, const SampledChannel& chan,
                                  double noise) {
    const ReceiverMatrix v = mmse_receiver(beamformer, chan, noise);
    const Eigen::MatrixXcd field = chan.matrix * (chan.tx.weights.asDiagonal() * beamformer.samples);
    const Eigen::MatrixXcd coupling = v.samples.adjoint() * (chan.rx.weights.asDiagonal() * field);
    CorrelationMap map;
    map.xi = coupling.cwiseAbs2();
    return map;
}

int dof_from_singular_values(const Eigen::VectorXd& values, double threshold_db) {
    if (values.size() == 0) return 0;
    const double top = values.maxCoeff();
    if (!(top > 0.0)) return 0;
    const double cutoff = top * std::pow(10.0, -threshold_db / 20.0);
    return static_cast<int>((values.array() >= cutoff).count());
}

int dof_estimate(const ApertureGeometry& tx_geom, const ApertureGeometry& rx_geom,
                 const PhysicalConstants& constants, int quadrature_order,
                 double threshold_db, DofWeighting weighting) {
    if (quadrature_order < 2) throw std::invalid_argument("dof_estimate: quadrature order must be >= 2");
    if (!(threshold_db > 0.0)) throw std::invalid_argument("dof_estimate: threshold_db must be > 0");

    const GaussLegendreRule& rule = gauss_legendre(quadrature_order);
    const SampledChannel chan =
        build_sampled_channel(build_grid(tx_geom, rule), build_grid(rx_geom, rule), constants);

    Eigen::MatrixXcd weighted;
    if (weighting == DofWeighting::sqrt_phi)
        weighted = chan.rx.weights.cwiseSqrt().asDiagonal() * chan.matrix *
                   chan.tx.weights.cwiseSqrt().asDiagonal();
    else
        weighted = chan.matrix;
    return dof_from_singular_values(singular_values(weighted), threshold_db);
}

double dof_closed_form(const ApertureGeometry& tx_geom, const ApertureGeometry& rx_geom,
                       const PhysicalConstants& constants, double distance) {
    const double lambda_d = constants.wavelength() * distance;
    return tx_geom.area() * rx_geom.area() / (lambda_d * lambda_d);
}

}  // namespace capa
