#include <doctest.h>

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "capa/analysis.hpp"
#include "capa/linalg.hpp"
#include "capa/wmmse.hpp"

using namespace capa;

namespace {

PhysicalConstants paper_constants() {
    PhysicalConstants c;
    c.frequency = 2.4e9;
    c.light_speed = 3.0e8;
    c.impedance = 120.0 * M_PI;
    c.noise_power = 5.6e-3;
    c.power_budget = 0.1;  // 100 mA^2
    return c;
}

SampledChannel make_channel(int order, double area = 0.25, double distance = 10.0) {
    const PhysicalConstants constants = paper_constants();
    const ApertureGeometry tx = ApertureGeometry::square(area, Eigen::Vector3d::Zero());
    const ApertureGeometry rx = ApertureGeometry::square(area, Eigen::Vector3d(0, 0, distance));
    const auto& rule = gauss_legendre(order);
    return build_sampled_channel(build_grid(tx, rule), build_grid(rx, rule), constants);
}

}  // namespace

TEST_CASE("seeded init is reproducible and meets the power budget") {
    const SampledChannel chan = make_channel(5);
    const BeamformerMatrix a = init_beamformer(chan, 4, InitMode::random_seeded, 42);
    const BeamformerMatrix b = init_beamformer(chan, 4, InitMode::random_seeded, 42);
    CHECK(a.samples == b.samples);
    CHECK(transmit_power(a, chan.tx) ==
          doctest::Approx(chan.constants.power_budget).epsilon(1e-10));

    const BeamformerMatrix mf = init_beamformer(chan, 4, InitMode::matched_filter);
    CHECK(transmit_power(mf, chan.tx) ==
          doctest::Approx(chan.constants.power_budget).epsilon(1e-10));
}

TEST_CASE("matched-filter init inherits the boresight mirror symmetry") {
    const SampledChannel chan = make_channel(8);
    const BeamformerMatrix w = init_beamformer(chan, 1, InitMode::matched_filter);
    const Eigen::Index n = w.samples.rows();
    Eigen::VectorXcd mirrored(n);
    for (Eigen::Index i = 0; i < n; ++i) mirrored[i] = w.samples(n - 1 - i, 0);
    // The dominant singular direction is unique up to a global phase.
    const std::complex<double> overlap =
        (w.samples.col(0).adjoint() * mirrored)(0, 0) / mirrored.squaredNorm();
    const std::complex<double> phase = overlap / std::abs(overlap);
    CHECK((mirrored * phase - w.samples.col(0)).norm() < 1e-8 * w.samples.col(0).norm());
}

TEST_CASE("too many streams are rejected") {
    const SampledChannel chan = make_channel(3);
    CHECK_THROWS_AS(init_beamformer(chan, 10, InitMode::random_seeded), std::invalid_argument);
    CHECK_THROWS_AS(init_beamformer(chan, 0, InitMode::random_seeded), std::invalid_argument);
}

TEST_CASE("zero beamformer triggers the degenerate-input guard") {
    const SampledChannel chan = make_channel(3);
    BeamformerMatrix w;
    w.samples = Eigen::MatrixXcd::Zero(chan.tx_samples(), 2);
    const WmmseState state = make_initial_state(w);
    CHECK_THROWS_AS(wmmse_step(state, chan), std::domain_error);
}

TEST_CASE("scalar channel reaches its fixed point in one step") {
    const SampledChannel chan = make_channel(1);  // 1x1 channel
    const BeamformerMatrix w0 = init_beamformer(chan, 1, InitMode::random_seeded, 5);
    WmmseState state = make_initial_state(w0);
    state = wmmse_step(state, chan);
    const std::complex<double> first = state.beamformer(0, 0);
    state = wmmse_step(state, chan);
    const std::complex<double> second = state.beamformer(0, 0);
    // Direction is preserved; only the unconstrained magnitude may settle.
    const std::complex<double> ratio = second / first;
    CHECK(std::abs(std::arg(ratio)) < 1e-10);
    const double r1 = state.rate_trace[state.rate_trace.size() - 2];
    const double r2 = state.rate_trace.back();
    CHECK(r2 == doctest::Approx(r1).epsilon(1e-9));
}

TEST_CASE("vanishing noise makes Theta singular and names the iteration") {
    // Duplicated beam columns make Q exactly rank-deficient; with a
    // negligible noise floor Theta is numerically singular.
    SampledChannel chan = make_channel(2);
    chan.constants.noise_power = 1e-280;
    BeamformerMatrix w0 = init_beamformer(chan, 4, InitMode::random_seeded, 3);
    w0.samples.col(1) = w0.samples.col(0);
    const WmmseState state = make_initial_state(w0);
    try {
        (void)wmmse_step(state, chan);
        FAIL("expected IllConditionedIterate");
    } catch (const IllConditionedIterate& e) {
        CHECK(e.iteration == 0);
    }
}

TEST_CASE("rate trace is non-decreasing from a random start") {
    const SampledChannel chan = make_channel(10);
    const BeamformerMatrix w0 = init_beamformer(chan, 8, InitMode::random_seeded, 7);
    WmmseState state = make_initial_state(w0);
    for (int t = 0; t < 40; ++t) state = wmmse_step(state, chan);
    for (std::size_t i = 1; i < state.rate_trace.size(); ++i)
        CHECK(state.rate_trace[i] >= state.rate_trace[i - 1] - 1e-9);
}

TEST_CASE("rate-MMSE identity holds at every iterate") {
    const SampledChannel chan = make_channel(6);
    const BeamformerMatrix w0 = init_beamformer(chan, 3, InitMode::random_seeded, 9);
    WmmseState state = make_initial_state(w0);
    for (int t = 0; t < 5; ++t) {
        state = wmmse_step(state, chan);
        const double via_weight =
            std::log2(std::abs(Eigen::PartialPivLU<Eigen::MatrixXcd>(state.weight).determinant()));
        CHECK(std::abs(via_weight - state.rate_trace.back()) < 1e-9);
    }
}

TEST_CASE("solve meets the power budget with equality and reports the true-noise rate") {
    const SampledChannel chan = make_channel(10);
    SolverConfig cfg;
    cfg.streams = 6;
    const WmmseSolution sol = solve(chan, cfg);

    CHECK(transmit_power(sol.beamformer, chan.tx) ==
          doctest::Approx(chan.constants.power_budget).epsilon(1e-10));
    const double recomputed = achievable_rate(sol.beamformer, chan, chan.constants.noise_power);
    CHECK(sol.report.rate_bits == doctest::Approx(recomputed).epsilon(1e-12));
    CHECK(sol.report.iterations >= 1);
    CHECK(!sol.report.rate_trace.empty());
    CHECK(sol.report.effective_rank >= 1);
}

TEST_CASE("pre-scaling by any positive factor leaves the converged rate unchanged") {
    const SampledChannel chan = make_channel(8);
    SolverConfig cfg;
    cfg.streams = 4;
    const WmmseSolution sol = solve(chan, cfg);

    for (double factor : {0.2, 3.7, 19.0}) {
        BeamformerMatrix scaled;
        scaled.samples = factor * sol.beamformer.samples;
        // Rescaling back to the budget restores the same rate.
        scaled.samples *= std::sqrt(chan.constants.power_budget / transmit_power(scaled, chan.tx));
        const double rate = achievable_rate(scaled, chan, chan.constants.noise_power);
        CHECK(std::abs(rate - sol.report.rate_bits) < 1e-9);
    }
}

TEST_CASE("random and matched-filter starts converge to the same rate") {
    const SampledChannel chan = make_channel(8);
    SolverConfig a;
    a.streams = 3;
    a.init = InitMode::matched_filter;
    a.rel_increase_threshold = 1e-10;
    a.max_iterations = 3000;
    SolverConfig b = a;
    b.init = InitMode::random_seeded;
    b.seed = 2718;
    const double rate_a = solve(chan, a).report.rate_bits;
    const double rate_b = solve(chan, b).report.rate_bits;
    CHECK(rate_a == doctest::Approx(rate_b).epsilon(1e-4));
}

TEST_CASE("factorized solves match explicit-inverse arithmetic") {
    const SampledChannel chan = make_channel(6);
    const BeamformerMatrix w0 = init_beamformer(chan, 3, InitMode::random_seeded, 15);
    WmmseState state = make_initial_state(w0);
    state = wmmse_step(state, chan);
    const WmmseState next = wmmse_step(state, chan);

    // Rebuild W_{t+1} through explicit inverses of the retained blocks.
    const Eigen::MatrixXcd x = chan.tx.weights.asDiagonal() * state.beamformer;
    const Eigen::MatrixXcd y =
        chan.matrix.adjoint() * (chan.rx.weights.asDiagonal() * (chan.matrix * x));
    const Eigen::MatrixXcd explicit_w =
        y * next.theta.inverse() * next.weight * next.omega.inverse();
    CHECK((explicit_w - next.beamformer).norm() < 1e-10 * next.beamformer.norm());
}

TEST_CASE("reconstruction agrees with stored rows at the quadrature nodes") {
    const SampledChannel chan = make_channel(6);
    SolverConfig cfg;
    cfg.streams = 3;
    const WmmseSolution sol = solve(chan, cfg);
    REQUIRE(sol.reconstruction_available);

    for (Eigen::Index j : {0, 7, 17, 35}) {
        const Eigen::RowVectorXcd w_at =
            reconstruct_continuous(sol, chan, chan.tx.points.col(j));
        CHECK((w_at - sol.beamformer.samples.row(j)).norm() <
              1e-8 * sol.beamformer.samples.row(j).norm());
    }
}

TEST_CASE("reconstruction is finite and smooth across the aperture") {
    const SampledChannel chan = make_channel(6);
    SolverConfig cfg;
    cfg.streams = 2;
    const WmmseSolution sol = solve(chan, cfg);

    const double lx = chan.tx.geometry.len_x, ly = chan.tx.geometry.len_y;
    const int grid = 50;
    Eigen::MatrixXcd previous_row;
    double max_neighbor_gap = 0.0;
    Eigen::MatrixXcd values(grid, grid);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const Eigen::Vector3d s(-0.5 * lx + (i + 0.5) * lx / grid,
                                    -0.5 * ly + (j + 0.5) * ly / grid, 0.0);
            const Eigen::RowVectorXcd w_at = reconstruct_continuous(sol, chan, s);
            CHECK(w_at.allFinite());
            values(i, j) = w_at[0];
        }
    const double scale = values.cwiseAbs().maxCoeff();
    for (int i = 0; i + 1 < grid; ++i)
        for (int j = 0; j + 1 < grid; ++j)
            max_neighbor_gap = std::max(
                {max_neighbor_gap, std::abs(values(i + 1, j) - values(i, j)),
                 std::abs(values(i, j + 1) - values(i, j))});
    // Bounded variation between neighboring evaluation cells.
    CHECK(max_neighbor_gap < 0.5 * scale);
}

TEST_CASE("off-aperture reconstruction points are rejected") {
    const SampledChannel chan = make_channel(4);
    SolverConfig cfg;
    cfg.streams = 2;
    const WmmseSolution sol = solve(chan, cfg);
    CHECK_THROWS_AS(reconstruct_continuous(sol, chan, Eigen::Vector3d(0.0, 0.0, 1.0)),
                    std::domain_error);
    CHECK_THROWS_AS(reconstruct_continuous(sol, chan, Eigen::Vector3d(5.0, 0.0, 0.0)),
                    std::domain_error);
}

TEST_CASE("delta kernel reproduces the uncorrelated solver") {
    const SampledChannel chan = make_channel(6);
    SolverConfig cfg;
    cfg.streams = 3;
    const WmmseSolution plain = solve(chan, cfg);

    const Eigen::MatrixXcd delta_kernel =
        chan.tx.weights.cwiseInverse().asDiagonal().toDenseMatrix().cast<std::complex<double>>();
    const WmmseSolution correlated = solve_correlated(chan, cfg, delta_kernel);
    CHECK(std::abs(correlated.report.rate_bits - plain.report.rate_bits) < 1e-6);
    CHECK((correlated.beamformer.samples - plain.beamformer.samples).norm() <
          1e-8 * plain.beamformer.samples.norm());
}

TEST_CASE("uniformly scaled kernel matches the rescaled power budget") {
    SampledChannel chan = make_channel(6);
    SolverConfig cfg;
    cfg.streams = 3;
    const Eigen::MatrixXcd kernel =
        2.0 * chan.tx.weights.cwiseInverse().asDiagonal().toDenseMatrix().cast<std::complex<double>>();
    const WmmseSolution correlated = solve_correlated(chan, cfg, kernel);

    SampledChannel half_power = chan;
    half_power.constants.power_budget *= 0.5;
    const WmmseSolution reference = solve(half_power, cfg);
    CHECK(std::abs(correlated.report.rate_bits - reference.report.rate_bits) < 1e-6);
}

TEST_CASE("adding correlation on top of the delta kernel cannot raise the optimum") {
    // With C = Phi^-1 + R (R PSD) the correlated power of every beamformer
    // dominates its uncorrelated power, so the same budget buys less.
    const SampledChannel chan = make_channel(5);
    SolverConfig cfg;
    cfg.streams = 3;
    cfg.rel_increase_threshold = 1e-9;
    cfg.max_iterations = 1000;
    const double baseline = solve(chan, cfg).report.rate_bits;

    ComplexGaussian gauss(33);
    const Eigen::Index n = chan.tx_samples();
    const Eigen::MatrixXcd delta =
        chan.tx.weights.cwiseInverse().asDiagonal().toDenseMatrix().cast<std::complex<double>>();
    for (int trial = 0; trial < 4; ++trial) {
        const Eigen::MatrixXcd random = gauss.matrix(n, n);
        Eigen::MatrixXcd extra = random * random.adjoint() / static_cast<double>(n);
        extra = 0.5 * (extra + extra.adjoint()).eval();
        const Eigen::MatrixXcd kernel = delta + extra;
        const double rate = solve_correlated(chan, cfg, kernel).report.rate_bits;
        CHECK(rate <= baseline + 1e-6);
    }
}

TEST_CASE("non positive definite kernels are rejected") {
    const SampledChannel chan = make_channel(4);
    SolverConfig cfg;
    cfg.streams = 2;
    Eigen::MatrixXcd indefinite =
        Eigen::MatrixXcd::Identity(chan.tx_samples(), chan.tx_samples());
    indefinite(0, 0) = -1.0;
    CHECK_THROWS_AS(solve_correlated(chan, cfg, indefinite), std::invalid_argument);

    Eigen::MatrixXcd not_hermitian = Eigen::MatrixXcd::Identity(chan.tx_samples(), chan.tx_samples());
    not_hermitian(0, 1) = 5.0;
    CHECK_THROWS_AS(solve_correlated(chan, cfg, not_hermitian), std::invalid_argument);
}

TEST_CASE("rank-deficient streams survive the iteration and show in the rank") {
    // Far separation leaves essentially one spatial mode; asking for many
    // streams must not break the iteration, and the report exposes how many
    // carry energy.
    const SampledChannel chan = make_channel(5, 0.25, 200.0);
    SolverConfig cfg;
    cfg.streams = 8;
    cfg.init = InitMode::random_seeded;
    cfg.seed = 99;
    const WmmseSolution sol = solve(chan, cfg);
    CHECK(sol.report.effective_rank >= 1);
    CHECK(sol.report.effective_rank < 8);
    CHECK(std::isfinite(sol.report.rate_bits));
    for (std::size_t i = 1; i < sol.report.rate_trace.size(); ++i)
        CHECK(sol.report.rate_trace[i] >= sol.report.rate_trace[i - 1] - 1e-9);
}

TEST_CASE("quadrature order convergence at the default setup") {
    // Fixed N = 10 across orders; the converged rate settles to within
    // 1e-3 bits/s/Hz per +2 samples from M = 5 on.
    double previous = -1.0;
    for (int order : {5, 7, 9, 11}) {
        const SampledChannel chan = make_channel(order);
        SolverConfig cfg;
        cfg.streams = 10;
        cfg.quadrature_order = order;
        const double rate = solve(chan, cfg).report.rate_bits;
        if (previous > 0.0) CHECK(std::abs(rate - previous) < 1e-3);
        previous = rate;
    }
}
