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

#ifndef CAPA_WMMSE_HPP
#define CAPA_WMMSE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "capa/channel.hpp"

namespace capa {

/// Transmit beamformer sampled at the Tx quadrature nodes; row i is
/// w(s_i)^T, one column per data stream.
struct BeamformerMatrix {
    Eigen::MatrixXcd samples;  // M_s x N

    Eigen::Index streams() const { return samples.cols(); }
    Eigen::Index node_count() const { return samples.rows(); }
};

/// Quadrature transmit power Tr(W^H Phi_T W).
double transmit_power(const BeamformerMatrix& beamformer, const QuadratureGrid& tx_grid);

enum class InitMode { random_seeded, matched_filter };

struct SolverConfig {
    int max_iterations = 100;
    double rel_increase_threshold = 1e-6;
    InitMode init = InitMode::matched_filter;
    int streams = 1;              // N
    int quadrature_order = 10;    // M
    std::uint64_t seed = 42;
    bool force_full_iterations = false;  // benchmark mode: ignore the threshold
};

/// Thrown when Theta or Omega becomes numerically singular mid-iteration.
class IllConditionedIterate : public std::runtime_error {
  public:
    IllConditionedIterate(const std::string& what, int iteration)
        : std::runtime_error(what), iteration(iteration) {}
    int iteration;
};

/// One iterate of the matrix-based WMMSE recursion. `beamformer` holds
/// W_{t}; the N x N blocks are the quantities that produced it from
/// W_{t-1} and double as the continuous-reconstruction coefficients.
struct WmmseState {
    Eigen::MatrixXcd beamformer;      // W_t, M_s x N
    double effective_noise = 0.0;     // sigma_tilde^2 evaluated at W_{t-1}
    Eigen::MatrixXcd gram;            // Q_t, N x N Hermitian PSD
    Eigen::MatrixXcd theta;           // sigma_tilde^2 I + Q
    Eigen::MatrixXcd weight;          // U = I + Q / sigma_tilde^2
    Eigen::MatrixXcd omega;           // (1/eps) I + G U
    Eigen::MatrixXcd projector;       // Phi_R H Phi_T W_{t-1} Theta^-1 U Omega^-1
    std::vector<double> rate_trace;   // R_1..R_t, bits/s/Hz
    int iteration = 0;
};

WmmseState make_initial_state(const BeamformerMatrix& w0);

/// Runs one update W_t -> W_{t+1} per the closed-form recursion
/// W_{t+1} = H^H Phi_R H Phi_T W_t Theta^-1 U Omega^-1 and appends
/// R_{t+1} = log2 det(I + Q_{t+1} / sigma_tilde^2) to the trace.
WmmseState wmmse_step(const WmmseState& state, const SampledChannel& chan);

struct SolveReport {
    double rate_bits = 0.0;
    int iterations = 0;
    std::vector<double> rate_trace;
    double wall_ms = 0.0;
    int effective_rank = 0;
    bool max_iter_reached = false;
    int streams = 0;
    int quadrature_order = 0;
};

struct WmmseSolution {
    BeamformerMatrix beamformer;      // scaled to transmit power P_T
    Eigen::MatrixXcd reconstruction;  // M_s x N; w(s) = h_tilde(s) * reconstruction
    bool reconstruction_available = false;
    SolveReport report;
};

/// W_0 for the iteration: seeded complex Gaussian columns or the conjugated
/// dominant right-singular directions of Phi_R^(1/2) H Phi_T, either way
/// scaled to transmit power P_T.
BeamformerMatrix init_beamformer(const SampledChannel& chan, int streams, InitMode mode,
                                 std::uint64_t seed = 42);

/// Full Algorithm-2 run: iterate until the fractional rate increase drops
/// below the threshold (or max iterations), scale the beamformer to meet the
/// power budget with equality, and report the rate at the true noise power.
WmmseSolution solve(const SampledChannel& chan, const SolverConfig& config);

/// WMMSE under the correlated power constraint w^H Phi_T C Phi_T w <= P_T,
/// with the inverse kernel realized by numeric inversion of C at quadrature
/// scale. C = Phi_T^-1 (the discrete delta kernel) reduces to solve().
WmmseSolution solve_correlated(const SampledChannel& chan, const SolverConfig& config,
                               const Eigen::MatrixXcd& tx_correlation);

/// Evaluates the continuous beamformer w(s) at an arbitrary point on the Tx
/// aperture from the retained reconstruction coefficients. Throws
/// std::domain_error when the point is off the aperture.
Eigen::RowVectorXcd reconstruct_continuous(const WmmseSolution& solution,
                                           const SampledChannel& chan,
                                           const Eigen::Vector3d& point);

}  // namespace capa

#endif  // CAPA_WMMSE_HPP
