#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "capa/config.hpp"
#include "capa/experiments.hpp"

using namespace capa;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string strip_wall_ms(std::string text) {
    static const std::regex pattern(R"("wall_ms": [0-9.e+-]+,?)");
    return std::regex_replace(text, pattern, "");
}

ExperimentConfig small_config(const std::string& out_dir) {
    ExperimentConfig cfg = paper_default_config();
    // M = 10 keeps the oscillatory wavenumber integrands resolved; smaller
    // orders inflate the Fourier-SVD gains with quadrature error.
    cfg.solver.quadrature_order = 10;
    cfg.solver.streams_mode = "explicit";
    cfg.solver.streams = 3;
    cfg.solver.dense_samples_per_axis = 12;
    cfg.output.path = out_dir;
    return cfg;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("run_solve writes per-method reports and an ordered summary") {
    const fs::path dir = fresh_dir("capamimo_test_solve");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse", "fourier_svd", "spda", "dense_optimal"};

    const auto outcomes = run_solve(cfg);
    REQUIRE(outcomes.size() == 4);
    for (const auto& out : outcomes) {
        CHECK(out.ok);
        CHECK(fs::exists(dir / (out.method + ".json")));
    }
    CHECK(fs::exists(dir / "summary.csv"));

    double wmmse = 0.0, fourier = 0.0, spda = 0.0;
    for (const auto& out : outcomes) {
        if (out.method == "wmmse") wmmse = out.rate_bits;
        if (out.method == "fourier_svd") fourier = out.rate_bits;
        if (out.method == "spda") spda = out.rate_bits;
    }
    CHECK(wmmse >= fourier - 1e-6);
    CHECK(fourier >= spda - 1e-6);
}

TEST_CASE("repeated seeded solves emit identical reports modulo wall time") {
    const fs::path dir_a = fresh_dir("capamimo_test_det_a");
    const fs::path dir_b = fresh_dir("capamimo_test_det_b");
    ExperimentConfig cfg = small_config(dir_a.string());
    cfg.methods = {"wmmse"};
    cfg.solver.init = "random";
    cfg.solver.seed = 7;

    run_solve(cfg);
    cfg.output.path = dir_b.string();
    run_solve(cfg);

    std::string a = read_file(dir_a / "wmmse.json");
    std::string b = read_file(dir_b / "wmmse.json");
    // The config echo embeds the differing output paths.
    a = std::regex_replace(a, std::regex(dir_a.filename().string()), "X");
    b = std::regex_replace(b, std::regex(dir_b.filename().string()), "X");
    CHECK(strip_wall_ms(a) == strip_wall_ms(b));
}

TEST_CASE("power sweep rates increase monotonically for every method") {
    const fs::path dir = fresh_dir("capamimo_test_sweep_power");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse", "spda"};
    SweepConfig sweep;
    sweep.variable = "power";
    sweep.from = 10.0;
    sweep.to = 1000.0;
    sweep.steps = 3;
    sweep.log_scale = true;
    cfg.sweep = sweep;

    const auto rows = run_sweep(cfg, 2);
    REQUIRE(rows.size() == 6);
    CHECK(fs::exists(dir / "sweep.csv"));
    for (const auto& method : {"wmmse", "spda"}) {
        double previous = -1.0;
        for (const auto& row : rows) {
            if (row.outcome.method != method) continue;
            REQUIRE(row.outcome.ok);
            CHECK(row.outcome.rate_bits > previous);
            previous = row.outcome.rate_bits;
        }
    }
}

TEST_CASE("distance sweep rates decrease for wmmse") {
    const fs::path dir = fresh_dir("capamimo_test_sweep_distance");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse"};
    SweepConfig sweep;
    sweep.variable = "distance";
    sweep.from = 2.0;
    sweep.to = 50.0;
    sweep.steps = 4;
    cfg.sweep = sweep;

    const auto rows = run_sweep(cfg, 1);
    double previous = 1e9;
    for (const auto& row : rows) {
        REQUIRE(row.outcome.ok);
        CHECK(row.outcome.rate_bits < previous);
        previous = row.outcome.rate_bits;
    }
}

TEST_CASE("failed sweep points are recorded and the sweep continues") {
    const fs::path dir = fresh_dir("capamimo_test_sweep_fail");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"fourier_svd"};
    SweepConfig sweep;
    sweep.variable = "spacing";  // first spacing is below the element edge
    sweep.from = 0.01;
    sweep.to = 0.5;
    sweep.steps = 3;
    cfg.sweep = sweep;

    const auto rows = run_sweep(cfg, 1);
    REQUIRE(rows.size() == 3);
    CHECK(!rows.front().outcome.ok);
    CHECK(!rows.front().outcome.error.empty());
    CHECK(rows.back().outcome.ok);

    const std::string csv = read_file(dir / "sweep.csv");
    CHECK(csv.find("error") != std::string::npos);
}

TEST_CASE("frequency sweep rates increase for wmmse") {
    const fs::path dir = fresh_dir("capamimo_test_sweep_freq");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse"};
    cfg.solver.streams_mode = "auto-fourier";
    SweepConfig sweep;
    sweep.variable = "frequency";
    sweep.from = 2.4e9;
    sweep.to = 5e9;
    sweep.steps = 3;
    cfg.sweep = sweep;

    const auto rows = run_sweep(cfg, 1);
    double previous = -1.0;
    for (const auto& row : rows) {
        REQUIRE(row.outcome.ok);
        CHECK(row.outcome.rate_bits > previous);
        previous = row.outcome.rate_bits;
    }
}

TEST_CASE("aperture sweep rates increase for wmmse") {
    const fs::path dir = fresh_dir("capamimo_test_sweep_aperture");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse"};
    cfg.solver.streams_mode = "auto-fourier";
    SweepConfig sweep;
    sweep.variable = "aperture";
    sweep.from = 0.1;
    sweep.to = 0.5;
    sweep.steps = 4;
    cfg.sweep = sweep;

    const auto rows = run_sweep(cfg, 1);
    double previous = -1.0;
    for (const auto& row : rows) {
        REQUIRE(row.outcome.ok);
        CHECK(row.outcome.rate_bits > previous);
        previous = row.outcome.rate_bits;
    }
}

TEST_CASE("multi-stream gain over a single stream shrinks with distance") {
    const fs::path dir = fresh_dir("capamimo_test_stream_gap");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse"};

    auto rate_at = [&](double distance, int streams) {
        ExperimentConfig point = cfg;
        point.rx.center = {0.0, 0.0, distance};
        point.solver.streams = streams;
        return execute_methods(point).front().rate_bits;
    };
    const double near_gap = rate_at(2.0, 8) - rate_at(2.0, 1);
    const double far_gap = rate_at(50.0, 8) - rate_at(50.0, 1);
    CHECK(near_gap > 5.0 * std::max(far_gap, 1e-9));
    CHECK(near_gap > 1.0);
}

TEST_CASE("spacing sweep evaluates the metasurface pipeline") {
    const fs::path dir = fresh_dir("capamimo_test_sweep_spacing");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse", "fourier_svd"};
    SweepConfig sweep;
    sweep.variable = "spacing";  // in wavelengths
    sweep.from = 0.1;
    sweep.to = 0.5;
    sweep.steps = 2;
    cfg.sweep = sweep;

    const auto rows = run_sweep(cfg, 1);
    REQUIRE(rows.size() == 4);
    for (const auto& row : rows) {
        REQUIRE(row.outcome.ok);
        CHECK(row.outcome.rate_bits > 0.0);
    }
}

TEST_CASE("contiguously tiled metasurface recovers the continuous rate") {
    // Element edge = spacing = 0.05 wavelengths: the sampled beamformer on
    // the full tiling matches both the continuous solution and the discrete
    // optimum.
    const fs::path dir = fresh_dir("capamimo_test_meta_tile");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.tx.len_x = cfg.tx.len_y = 0.2;
    cfg.rx.len_x = cfg.rx.len_y = 0.2;
    cfg.methods = {"wmmse", "fourier_svd"};

    const double continuous = execute_methods(cfg).front().rate_bits;

    SweepConfig sweep;
    sweep.variable = "spacing";
    sweep.from = 0.05;
    sweep.to = 0.05;
    sweep.steps = 1;
    cfg.sweep = sweep;
    const auto rows = run_sweep(cfg, 1);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        REQUIRE(row.outcome.ok);
        CHECK(row.outcome.rate_bits == doctest::Approx(continuous).epsilon(0.01));
    }
}

TEST_CASE("dof curve is positive and non-increasing in F") {
    const fs::path dir = fresh_dir("capamimo_test_dof");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.solver.quadrature_order = 8;
    cfg.dof.f_ratio_from = 1.0;
    cfg.dof.f_ratio_to = 50.0;
    cfg.dof.steps = 4;

    const auto rows = run_dof(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows.front().f_ratio == doctest::Approx(1.0));
    CHECK(rows.back().f_ratio == doctest::Approx(50.0));
    int previous = 1 << 20;
    for (const auto& row : rows) {
        CHECK(row.dof_quadrature >= 1);
        CHECK(row.dof_quadrature <= previous);
        previous = row.dof_quadrature;
        CHECK(row.dof_closed_form > 0.0);
    }
    CHECK(fs::exists(dir / "dof.csv"));
}

TEST_CASE("correlation grid is square and diagonally dominated") {
    const fs::path dir = fresh_dir("capamimo_test_corr");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.solver.streams = 3;

    const Eigen::MatrixXd xi = run_correlate(cfg);
    REQUIRE(xi.rows() == 3);
    REQUIRE(xi.cols() == 3);
    CHECK(fs::exists(dir / "correlation.csv"));
    for (int n = 0; n < 3; ++n) {
        CHECK(xi(n, n) > 0.0);
        for (int m = 0; m < 3; ++m)
            if (m != n) CHECK(xi(n, m) < xi(n, n));
    }
}

TEST_CASE("rotating the receive aperture by pi/4 costs rate") {
    const fs::path dir = fresh_dir("capamimo_test_mismatch");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse"};
    const double aligned = execute_methods(cfg).front().rate_bits;
    cfg.rx.phi = M_PI / 4.0;  // tilts the aperture plane and its polarization
    const double tilted = execute_methods(cfg).front().rate_bits;
    CHECK(tilted < aligned);
}

TEST_CASE("bench time scales with the forced iteration count") {
    const fs::path dir = fresh_dir("capamimo_test_bench_iters");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse", "fourier_svd"};
    cfg.solver.streams = 10;
    cfg.bench.frequencies_ghz = {2.4};
    cfg.bench.apertures_m2 = {0.25};
    cfg.bench.repeats = 3;

    auto wmmse_ms = [&](int iterations) {
        cfg.bench.iterations = iterations;
        for (const auto& row : run_bench(cfg))
            if (row.method == "wmmse") return row.wall_ms;
        return -1.0;
    };
    const double slow = wmmse_ms(400);
    const double fast = wmmse_ms(40);
    CHECK(slow > 3.0 * fast);  // ~10x work, loose bound for scheduler noise
}

TEST_CASE("repeated bench cells are stable") {
    // The stability contract assumes cells in the tool's operating regime
    // (hundreds of milliseconds); tiny workloads only measure the scheduler.
    const fs::path dir = fresh_dir("capamimo_test_bench_cv");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse", "fourier_svd"};
    cfg.solver.streams = 10;
    cfg.bench.frequencies_ghz = {2.4};
    cfg.bench.apertures_m2 = {0.25};
    cfg.bench.repeats = 5;
    cfg.bench.iterations = 1000;

    std::vector<double> samples;
    run_bench(cfg);  // warm-up
    for (int i = 0; i < 5; ++i) {
        for (const auto& row : run_bench(cfg))
            if (row.method == "wmmse") samples.push_back(row.wall_ms);
    }
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= samples.size();
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= samples.size();
    CHECK(std::sqrt(var) / mean < 0.2);
}

TEST_CASE("bench emits one row per cell and method") {
    const fs::path dir = fresh_dir("capamimo_test_bench");
    ExperimentConfig cfg = small_config(dir.string());
    cfg.methods = {"wmmse", "fourier_svd"};
    cfg.bench.frequencies_ghz = {2.4};
    cfg.bench.apertures_m2 = {0.2};
    cfg.bench.repeats = 2;
    cfg.bench.iterations = 5;

    const auto rows = run_bench(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.wall_ms > 0.0);
        CHECK(row.repeats == 2);
    }
    CHECK(fs::exists(dir / "bench.csv"));

    ExperimentConfig missing = cfg;
    missing.methods = {"wmmse"};
    CHECK_THROWS_AS(run_bench(missing), ConfigError);
}
