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

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capa/config.hpp"
#include "capa/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
    std::vector<std::string> methods;
    std::optional<std::uint64_t> seed;
    std::optional<int> quadrature_order;
    std::optional<std::string> streams;
    std::optional<double> power;
    std::optional<double> frequency;
    std::optional<double> distance;
    std::optional<double> aperture;
    std::optional<double> threshold;
    std::optional<int> max_iterations;
    std::optional<std::string> init;
    std::optional<std::string> output;
    std::optional<std::string> format;
    std::optional<int> repeats;
    std::optional<int> iterations;
    bool include_channel_build = false;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--method", ov.methods, "Methods to run (replaces the config list)");
    cmd->add_option("--seed", ov.seed, "Solver RNG seed");
    cmd->add_option("-M,--quadrature-order", ov.quadrature_order, "Gauss-Legendre order M");
    cmd->add_option("-N,--streams", ov.streams, "Stream count N, or auto-fourier / auto-dof");
    cmd->add_option("--power", ov.power, "Transmit power budget P_T in mA^2");
    cmd->add_option("--frequency", ov.frequency, "Carrier frequency in Hz");
    cmd->add_option("--distance", ov.distance, "Tx-Rx separation in meters");
    cmd->add_option("--aperture", ov.aperture, "Square aperture area (both sides) in m^2");
    cmd->add_option("--threshold", ov.threshold, "Fractional rate-increase stopping threshold");
    cmd->add_option("--max-iter", ov.max_iterations, "Maximum WMMSE iterations");
    cmd->add_option("--init", ov.init, "Beamformer init: matched-filter or random");
    cmd->add_option("-o,--output", ov.output, "Output directory");
    cmd->add_option("--format", ov.format, "Output format: csv or json");
}

capa::ExperimentConfig make_config(const std::string& config_path, const Overrides& ov) {
    capa::ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = capa::load_config_file(config_path);
    } else if (const char* env = std::getenv("CAPAMIMO_CONFIG"); env != nullptr && env[0] != '\0') {
        cfg = capa::load_config_file(env);
    } else {
        cfg = capa::paper_default_config();
    }

    if (!ov.methods.empty()) cfg.methods = ov.methods;
    if (ov.seed) cfg.solver.seed = *ov.seed;
    if (ov.quadrature_order) cfg.solver.quadrature_order = *ov.quadrature_order;
    if (ov.streams) {
        if (*ov.streams == "auto-fourier" || *ov.streams == "auto-dof") {
            cfg.solver.streams_mode = *ov.streams;
        } else {
            try {
                cfg.solver.streams = std::stoi(*ov.streams);
            } catch (...) {
                throw capa::ConfigError("solver.N: expected an integer, auto-fourier or auto-dof");
            }
            cfg.solver.streams_mode = "explicit";
        }
    }
    if (ov.power) cfg.constants.power_mA2 = *ov.power;
    if (ov.frequency) cfg.constants.frequency = *ov.frequency;
    if (ov.distance) {
        cfg.rx.center = {0.0, 0.0, *ov.distance};
    }
    if (ov.aperture) {
        if (!(*ov.aperture > 0.0)) throw capa::ConfigError("tx.A: aperture area must be > 0");
        const double edge = std::sqrt(*ov.aperture);
        cfg.tx.len_x = cfg.tx.len_y = edge;
        cfg.rx.len_x = cfg.rx.len_y = edge;
    }
    if (ov.threshold) cfg.solver.threshold = *ov.threshold;
    if (ov.max_iterations) cfg.solver.max_iterations = *ov.max_iterations;
    if (ov.init) cfg.solver.init = *ov.init;
    if (ov.output) cfg.output.path = *ov.output;
    if (ov.format) cfg.output.format = *ov.format;
    if (ov.repeats) cfg.bench.repeats = *ov.repeats;
    if (ov.iterations) cfg.bench.iterations = *ov.iterations;
    if (ov.include_channel_build) cfg.bench.include_channel_build = true;

    capa::validate_config(cfg);
    return cfg;
}

int report_outcomes(const std::vector<capa::MethodOutcome>& outcomes) {
    bool any_failed = false;
    for (const auto& out : outcomes) {
        if (out.ok) {
            std::printf("%-14s rate %.4f bits/s/Hz  iters %d  wall %.1f ms\n", out.method.c_str(),
                        out.rate_bits, out.iterations, out.wall_ms);
        } else {
            std::printf("%-14s FAILED: %s\n", out.method.c_str(), out.error.c_str());
            any_failed = true;
        }
    }
    return any_failed ? kExitNumeric : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capamimo: WMMSE and baseline beamforming solvers for continuous-aperture MIMO"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path,
                   "Config file (JSON); defaults to $CAPAMIMO_CONFIG or built-in paper defaults");

    Overrides ov;
    int jobs = 0;

    CLI::App* solve_cmd = app.add_subcommand("solve", "Run the configured methods on one setup");
    add_override_flags(solve_cmd, ov);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep a variable and tabulate rates");
    add_override_flags(sweep_cmd, ov);
    sweep_cmd->add_option("-j,--jobs", jobs, "Worker threads (default: hardware cores)");
    std::string sweep_variable;
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_steps = 0;
    bool sweep_log = false;
    sweep_cmd->add_option("--variable", sweep_variable,
                          "power | aperture | distance | frequency | spacing");
    sweep_cmd->add_option("--from", sweep_from, "Sweep start value");
    sweep_cmd->add_option("--to", sweep_to, "Sweep end value");
    sweep_cmd->add_option("--steps", sweep_steps, "Number of sweep points");
    sweep_cmd->add_flag("--log", sweep_log, "Logarithmic spacing");

    CLI::App* dof_cmd = app.add_subcommand("dof", "Degrees-of-freedom curve versus F = D^2/A_R");
    add_override_flags(dof_cmd, ov);
    double dof_from = 0.0, dof_to = 0.0, dof_threshold = 0.0;
    int dof_steps = 0;
    dof_cmd->add_option("--f-from", dof_from, "F range start");
    dof_cmd->add_option("--f-to", dof_to, "F range end");
    dof_cmd->add_option("--steps", dof_steps, "Number of F points");
    dof_cmd->add_option("--threshold-db", dof_threshold, "Singular-value threshold in dB");

    CLI::App* correlate_cmd =
        app.add_subcommand("correlate", "Stream-correlation grid of the WMMSE solution");
    add_override_flags(correlate_cmd, ov);

    CLI::App* bench_cmd = app.add_subcommand("bench", "CPU-time benchmark over the frequency x aperture grid");
    add_override_flags(bench_cmd, ov);
    bench_cmd->add_option("--repeats", ov.repeats, "Repetitions per cell (median reported)");
    bench_cmd->add_option("--iterations", ov.iterations, "Forced WMMSE iteration count");
    bench_cmd->add_flag("--include-channel-build", ov.include_channel_build,
                        "Time H construction in every method");

    CLI::App* validate_cmd = app.add_subcommand("validate-config", "Parse and validate the config");

    CLI11_PARSE(app, argc, argv);

    try {
        capa::ExperimentConfig cfg = make_config(config_path, ov);

        if (sweep_cmd->parsed()) {
            if (!sweep_variable.empty()) {
                capa::SweepConfig sweep;
                sweep.variable = sweep_variable;
                sweep.from = sweep_from;
                sweep.to = sweep_to;
                sweep.steps = sweep_steps;
                sweep.log_scale = sweep_log;
                cfg.sweep = sweep;
                capa::validate_config(cfg);
            }
            const auto rows = capa::run_sweep(cfg, jobs);
            int failed = 0;
            for (const auto& row : rows) failed += row.outcome.ok ? 0 : 1;
            std::printf("sweep: %zu rows (%d failed) -> %s/sweep.%s\n", rows.size(), failed,
                        cfg.output.path.c_str(), cfg.output.format.c_str());
            return kExitOk;
        }
        if (dof_cmd->parsed()) {
            if (dof_from > 0.0) cfg.dof.f_ratio_from = dof_from;
            if (dof_to > 0.0) cfg.dof.f_ratio_to = dof_to;
            if (dof_steps > 0) cfg.dof.steps = dof_steps;
            if (dof_threshold > 0.0) cfg.dof.threshold_db = dof_threshold;
            capa::validate_config(cfg);
            const auto rows = capa::run_dof(cfg);
            for (const auto& row : rows)
                std::printf("F %8.2f  D %7.3f m  DoF %2d  (closed form %.3f)\n", row.f_ratio,
                            row.distance, row.dof_quadrature, row.dof_closed_form);
            return kExitOk;
        }
        if (correlate_cmd->parsed()) {
            const Eigen::MatrixXd xi = capa::run_correlate(cfg);
            std::printf("correlate: %ldx%ld grid -> %s/correlation.csv\n",
                        static_cast<long>(xi.rows()), static_cast<long>(xi.cols()),
                        cfg.output.path.c_str());
            return kExitOk;
        }
        if (bench_cmd->parsed()) {
            const auto rows = capa::run_bench(cfg);
            for (const auto& row : rows)
                std::printf("%.1f GHz  %.2f m^2  %-14s %10.2f ms\n", row.frequency_ghz,
                            row.aperture_m2, row.method.c_str(), row.wall_ms);
            return kExitOk;
        }
        if (validate_cmd->parsed()) {
            std::cout << capa::serialize_config(cfg) << "\n";
            return kExitOk;
        }
        // solve
        return report_outcomes(capa::run_solve(cfg));
    } catch (const capa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
