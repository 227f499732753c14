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

#include "capa/wmmse.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "capa/linalg.hpp"

namespace capa {

namespace {

constexpr double kMaxCondition = 1e14;
constexpr double kRankFloor = 1e-12;

double weighted_power(const Eigen::MatrixXcd& w, const Eigen::VectorXd& weights) {
    return (weights.array() * w.rowwise().squaredNorm().array()).sum();
}

// Correlated-power evaluation Tr(W^H Phi C Phi W); with C absent this is the
// standard Tr(W^H Phi W).
double correlated_power(const Eigen::MatrixXcd& w, const Eigen::VectorXd& weights,
                        const Eigen::MatrixXcd* kernel) {
    if (kernel == nullptr) return weighted_power(w, weights);
    const Eigen::MatrixXcd pw = weights.asDiagonal() * w;
    return ((*kernel) * pw).cwiseProduct(pw.conjugate()).sum().real();
}

struct StepContext {
    const SampledChannel& chan;
    // Correlated-constraint data; null for the plain power constraint.
    const Eigen::MatrixXcd* kernel = nullptr;           // C at Tx nodes
    const Eigen::LLT<Eigen::MatrixXcd>* kernel_llt = nullptr;  // factorization of C
};

WmmseState advance(const WmmseState& state, const StepContext& ctx) {
    const SampledChannel& chan = ctx.chan;
    const Eigen::MatrixXcd& w = state.beamformer;
    if (w.rows() != chan.tx_samples())
        throw std::invalid_argument("wmmse_step: beamformer rows do not match Tx grid");

    const double power = correlated_power(w, chan.tx.weights, ctx.kernel);
    if (!(power > 0.0) || !std::isfinite(power))
        throw std::domain_error("wmmse_step: degenerate beamformer (zero or non-finite transmit power)");

    const double sigma2 = chan.constants.noise_power;
    const double budget = chan.constants.power_budget;
    const double noise_eff = sigma2 / budget * power;

    const Eigen::Index n = w.cols();

    // Q = W^H Phi_T H^H Phi_R H Phi_T W assembled through M_s x N products.
    const Eigen::MatrixXcd x = chan.tx.weights.asDiagonal() * w;
    const Eigen::MatrixXcd field = chan.matrix * x;                       // H Phi_T W at Rx nodes
    const Eigen::MatrixXcd y = chan.matrix.adjoint() * (chan.rx.weights.asDiagonal() * field);
    Eigen::MatrixXcd gram = x.adjoint() * y;
    gram = 0.5 * (gram + gram.adjoint()).eval();

    Eigen::MatrixXcd theta = gram;
    theta.diagonal().array() += noise_eff;
    if (condition_number(theta) > kMaxCondition)
        throw IllConditionedIterate("wmmse_step: Theta is numerically singular at iteration " +
                                        std::to_string(state.iteration),
                                    state.iteration);
    const Eigen::LLT<Eigen::MatrixXcd> theta_llt(theta);
    if (theta_llt.info() != Eigen::Success)
        throw IllConditionedIterate("wmmse_step: Theta factorization failed at iteration " +
                                        std::to_string(state.iteration),
                                    state.iteration);

    const Eigen::MatrixXcd weight =
        Eigen::MatrixXcd::Identity(n, n) + gram / noise_eff;             // U

    // G = Theta^-1 Y^H Phi_T Y Theta^-1 and V = Theta^-1 Q Theta^-1.
    auto sandwich = [&](const Eigen::MatrixXcd& core) {
        const Eigen::MatrixXcd half = theta_llt.solve(core);
        return theta_llt.solve(half.adjoint()).adjoint().eval();
    };
    Eigen::MatrixXcd g_samples;  // sampled g(s_i) rows = Y Theta^-1, kernel path only
    Eigen::MatrixXcd g_mat;      // G, or G_tilde = g^H C^-1 g under a kernel
    if (ctx.kernel == nullptr) {
        g_mat = sandwich(y.adjoint() * (chan.tx.weights.asDiagonal() * y));
    } else {
        g_samples = theta_llt.solve(y.adjoint()).adjoint();
        g_mat = g_samples.adjoint() * ctx.kernel_llt->solve(g_samples);
    }
    g_mat = 0.5 * (g_mat + g_mat.adjoint()).eval();
    const Eigen::MatrixXcd v_mat = sandwich(gram);

    const double trace_uv = (weight * v_mat).trace().real();
    if (!(trace_uv > 0.0) || !std::isfinite(trace_uv))
        throw IllConditionedIterate("wmmse_step: non-positive Tr(UV) at iteration " +
                                        std::to_string(state.iteration),
                                    state.iteration);
    const double epsilon = budget / (sigma2 * trace_uv);

    Eigen::MatrixXcd omega = g_mat * weight;
    omega.diagonal().array() += 1.0 / epsilon;
    if (condition_number(omega) > kMaxCondition)
        throw IllConditionedIterate("wmmse_step: Omega is numerically singular at iteration " +
                                        std::to_string(state.iteration),
                                    state.iteration);

    // Right-division by Omega via LU of Omega^H: A Omega^-1 = (Omega^-H A^H)^H.
    const Eigen::PartialPivLU<Eigen::MatrixXcd> omega_lu(omega.adjoint());
    const Eigen::MatrixXcd u_omega_inv = omega_lu.solve(weight.adjoint()).adjoint();
    const Eigen::MatrixXcd coeff = theta_llt.solve(u_omega_inv);  // Theta^-1 U Omega^-1

    WmmseState next;
    next.iteration = state.iteration + 1;
    next.effective_noise = noise_eff;
    next.gram = gram;
    next.theta = theta;
    next.weight = weight;
    next.omega = omega;
    next.projector = chan.rx.weights.asDiagonal() * field * coeff;
    if (ctx.kernel == nullptr) {
        next.beamformer = chan.matrix.adjoint() * next.projector;
    } else {
        // w(s_i) rows: Phi^-1 C^-1 applied to the sampled g, then U Omega^-1.
        next.beamformer = chan.tx.weights.cwiseInverse().asDiagonal() *
                          ctx.kernel_llt->solve(g_samples) * u_omega_inv;
    }
    next.rate_trace = state.rate_trace;
    next.rate_trace.push_back(log2_det_identity_plus(gram, noise_eff));
    return next;
}

int effective_rank(const Eigen::MatrixXcd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    if (!(top > 0.0)) return 0;
    return static_cast<int>((eig.eigenvalues().array() > kRankFloor * top).count());
}

WmmseSolution run_solver(const SampledChannel& chan, const SolverConfig& config,
                         const Eigen::MatrixXcd* kernel) {
    if (config.max_iterations < 1)
        throw std::invalid_argument("solve: max_iterations must be >= 1");
    if (!(config.rel_increase_threshold > 0.0))
        throw std::invalid_argument("solve: rel_increase_threshold must be > 0");

    const auto start = std::chrono::steady_clock::now();

    Eigen::LLT<Eigen::MatrixXcd> kernel_llt;
    if (kernel != nullptr) {
        const Eigen::Index ms = chan.tx_samples();
        if (kernel->rows() != ms || kernel->cols() != ms)
            throw std::invalid_argument("solve_correlated: kernel must be M_s x M_s at Tx nodes");
        if ((*kernel - kernel->adjoint()).norm() > 1e-10 * kernel->norm())
            throw std::invalid_argument("solve_correlated: kernel must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(*kernel, Eigen::EigenvaluesOnly);
        const double lambda_min = eig.eigenvalues().minCoeff();
        const double lambda_max = eig.eigenvalues().maxCoeff();
        if (!(lambda_max > 0.0) || lambda_min < -1e-12 * lambda_max)
            throw std::invalid_argument("solve_correlated: kernel is not positive definite");
        kernel_llt.compute(*kernel);
        if (kernel_llt.info() != Eigen::Success) {
            // Tikhonov shift for numerically semi-definite kernels.
            Eigen::MatrixXcd shifted = *kernel;
            shifted.diagonal().array() += 1e-12 * kernel->trace().real() / static_cast<double>(ms);
            kernel_llt.compute(shifted);
            if (kernel_llt.info() != Eigen::Success)
                throw std::invalid_argument("solve_correlated: kernel is not positive definite");
        }
    }

    StepContext ctx{chan, kernel, kernel != nullptr ? &kernel_llt : nullptr};

    BeamformerMatrix w0 = init_beamformer(chan, config.streams, config.init, config.seed);
    if (kernel != nullptr) {
        // Initial scaling against the correlated power measure.
        const double p0 = correlated_power(w0.samples, chan.tx.weights, kernel);
        w0.samples *= std::sqrt(chan.constants.power_budget / p0);
    }

    WmmseState state = make_initial_state(w0);
    bool converged = false;
    while (state.iteration < config.max_iterations) {
        state = advance(state, ctx);
        const std::size_t t = state.rate_trace.size();
        if (!config.force_full_iterations && t >= 2) {
            const double prev = state.rate_trace[t - 2];
            const double curr = state.rate_trace[t - 1];
            if (std::abs(prev) > 0.0 && (curr - prev) / std::abs(prev) < config.rel_increase_threshold) {
                converged = true;
                break;
            }
        }
    }

    // Scale to meet the power budget with equality, then evaluate the
    // rate at the true noise power.
    WmmseSolution solution;
    const double power = correlated_power(state.beamformer, chan.tx.weights, kernel);
    const double scale = std::sqrt(chan.constants.power_budget / power);
    solution.beamformer.samples = state.beamformer * scale;
    solution.reconstruction = state.projector * scale;
    solution.reconstruction_available = (kernel == nullptr);

    const Eigen::MatrixXcd x = chan.tx.weights.asDiagonal() * solution.beamformer.samples;
    const Eigen::MatrixXcd field = chan.matrix * x;
    Eigen::MatrixXcd gram = x.adjoint() * (chan.matrix.adjoint() * (chan.rx.weights.asDiagonal() * field));
    gram = 0.5 * (gram + gram.adjoint()).eval();

    solution.report.rate_bits = log2_det_identity_plus(gram, chan.constants.noise_power);
    solution.report.iterations = state.iteration;
    solution.report.rate_trace = state.rate_trace;
    solution.report.max_iter_reached = !converged;
    solution.report.effective_rank = effective_rank(gram);
    solution.report.streams = config.streams;
    solution.report.quadrature_order = chan.tx.order;
    solution.report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return solution;
}

}  // namespace

double transmit_power(const BeamformerMatrix& beamformer, const QuadratureGrid& tx_grid) {
    return weighted_power(beamformer.samples, tx_grid.weights);
}

WmmseState make_initial_state(const BeamformerMatrix& w0) {
    WmmseState state;
    state.beamformer = w0.samples;
    state.iteration = 0;
    return state;
}

WmmseState wmmse_step(const WmmseState& state, const SampledChannel& chan) {
    return advance(state, StepContext{chan});
}

BeamformerMatrix init_beamformer(const SampledChannel& chan, int streams, InitMode mode,
                                 std::uint64_t seed) {
    const Eigen::Index ms = chan.tx_samples();
    if (streams < 1 || streams > ms)
        throw std::invalid_argument("init_beamformer: stream count must lie in [1, M_s]");

    BeamformerMatrix w;
    if (mode == InitMode::random_seeded) {
        ComplexGaussian gauss(seed);
        w.samples = gauss.matrix(ms, streams);
    } else {
        const Eigen::MatrixXcd weighted = chan.rx.weights.cwiseSqrt().asDiagonal() * chan.matrix *
                                          chan.tx.weights.asDiagonal();
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(weighted, Eigen::ComputeThinV);
        w.samples = svd.matrixV().leftCols(streams).conjugate();
    }
    const double power = weighted_power(w.samples, chan.tx.weights);
    w.samples *= std::sqrt(chan.constants.power_budget / power);
    return w;
}

WmmseSolution solve(const SampledChannel& chan, const SolverConfig& config) {
    return run_solver(chan, config, nullptr);
}

WmmseSolution solve_correlated(const SampledChannel& chan, const SolverConfig& config,
                               const Eigen::MatrixXcd& tx_correlation) {
    return run_solver(chan, config, &tx_correlation);
}

Eigen::RowVectorXcd reconstruct_continuous(const WmmseSolution& solution,
                                           const SampledChannel& chan,
                                           const Eigen::Vector3d& point) {
    if (!solution.reconstruction_available)
        throw std::logic_error("reconstruct_continuous: no reconstruction coefficients retained");

    const ApertureGeometry& geom = chan.tx.geometry;
    const Eigen::Vector3d local = geom.rotation().transpose() * (point - geom.center);
    constexpr double plane_tol = 1e-9;
    constexpr double edge_tol = 1e-12;
    if (std::abs(local.z()) > plane_tol ||
        std::abs(local.x()) > 0.5 * geom.len_x + edge_tol ||
        std::abs(local.y()) > 0.5 * geom.len_y + edge_tol)
        throw std::domain_error("reconstruct_continuous: point lies off the Tx aperture");

    return green_row_to_point(chan, point) * solution.reconstruction;
}

}  // namespace capa
