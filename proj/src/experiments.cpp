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

#include "capa/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

#include "capa/analysis.hpp"
#include "capa/baselines.hpp"
#include "capa/linalg.hpp"
#include "capa/wmmse.hpp"

namespace capa {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

int quadrature_order_for(const ExperimentConfig& cfg, const std::string& method) {
    auto it = cfg.solver.order_overrides.find(method);
    return it != cfg.solver.order_overrides.end() ? it->second : cfg.solver.quadrature_order;
}

InitMode init_mode(const ExperimentConfig& cfg) {
    return cfg.solver.init == "random" ? InitMode::random_seeded : InitMode::matched_filter;
}

// Stream count per method: explicit N is capped by the method's dimension;
// auto-fourier keeps the per-method multiplexing maximum; auto-dof uses the
// numeric DoF estimate for the continuous methods.
struct StreamPlan {
    int continuous = 0;  // wmmse / fourier_svd / dense_optimal
    int spda = 0;
};

StreamPlan resolve_streams(const ExperimentConfig& cfg) {
    const ApertureGeometry tx = cfg.tx.to_geometry();
    const ApertureGeometry rx = cfg.rx.to_geometry();
    const PhysicalConstants constants = cfg.constants.to_physical();
    const WavenumberTruncation trunc = wavenumber_truncation(tx, rx, constants);
    const double d = 0.5 * constants.wavelength();
    const int spda_tx = static_cast<int>(std::ceil(tx.len_x / d)) *
                        static_cast<int>(std::ceil(tx.len_y / d));
    const int spda_rx = static_cast<int>(std::ceil(rx.len_x / d)) *
                        static_cast<int>(std::ceil(rx.len_y / d));

    StreamPlan plan;
    plan.spda = std::min(spda_tx, spda_rx);
    if (cfg.solver.streams_mode == "explicit") {
        plan.continuous = cfg.solver.streams;
        plan.spda = std::min(plan.spda, cfg.solver.streams);
    } else if (cfg.solver.streams_mode == "auto-dof") {
        plan.continuous = std::max(
            1, dof_estimate(tx, rx, constants, cfg.solver.quadrature_order,
                            cfg.solver.dof_threshold_db));
    } else {
        plan.continuous = std::min(trunc.tx_modes(), trunc.rx_modes());
    }
    return plan;
}

SolverConfig solver_config(const ExperimentConfig& cfg, int streams, int order) {
    SolverConfig sc;
    sc.max_iterations = cfg.solver.max_iterations;
    sc.rel_increase_threshold = cfg.solver.threshold;
    sc.init = init_mode(cfg);
    sc.streams = streams;
    sc.quadrature_order = order;
    sc.seed = cfg.solver.seed;
    return sc;
}

MethodOutcome outcome_from_report(const std::string& method, const SolveReport& report) {
    MethodOutcome out;
    out.method = method;
    out.ok = true;
    out.rate_bits = report.rate_bits;
    out.iterations = report.iterations;
    out.wall_ms = report.wall_ms;
    out.effective_rank = report.effective_rank;
    out.streams = report.streams;
    out.quadrature_order = report.quadrature_order;
    out.rate_trace = report.rate_trace;
    return out;
}

MethodOutcome outcome_from_svd(const std::string& method, const SvdBeamformingResult& result,
                               double wall_ms, int order) {
    MethodOutcome out;
    out.method = method;
    out.ok = true;
    out.rate_bits = result.rate_bits;
    out.iterations = 0;
    out.wall_ms = wall_ms;
    out.effective_rank = static_cast<int>((result.powers.array() > 0.0).count());
    out.streams = static_cast<int>(result.powers.size());
    out.quadrature_order = order;
    return out;
}

// Metasurface evaluation of the continuous WMMSE beamformer: sample w(s) at
// the element centers, scale to the power budget, rate on the element channel.
MethodOutcome wmmse_on_metasurface(const ExperimentConfig& cfg, double spacing_wavelengths) {
    const ApertureGeometry tx = cfg.tx.to_geometry();
    const ApertureGeometry rx = cfg.rx.to_geometry();
    const PhysicalConstants constants = cfg.constants.to_physical();
    const double lambda = constants.wavelength();
    const double edge = cfg.solver.metasurface_element_edge * lambda;
    const double spacing = spacing_wavelengths * lambda;

    const int order = quadrature_order_for(cfg, "wmmse");
    const GaussLegendreRule& rule = gauss_legendre(order);
    const SampledChannel chan =
        build_sampled_channel(build_grid(tx, rule), build_grid(rx, rule), constants);
    const StreamPlan plan = resolve_streams(cfg);
    const int streams = cfg.solver.streams_mode == "explicit"
                            ? cfg.solver.streams
                            : std::min<int>(plan.continuous, static_cast<int>(chan.tx_samples()));

    const auto start = std::chrono::steady_clock::now();
    const WmmseSolution solution = solve(chan, solver_config(cfg, streams, order));
    const DiscreteArrayChannel meta =
        sample_metasurface_channel(tx, rx, constants, spacing, edge * edge);

    Eigen::MatrixXcd sampled(meta.tx_elements(), streams);
    const double amp = std::sqrt(meta.element_aperture);
    for (Eigen::Index j = 0; j < meta.tx_elements(); ++j)
        sampled.row(j) = amp * reconstruct_continuous(solution, chan, meta.tx_positions.col(j));
    const double power = sampled.squaredNorm();
    sampled *= std::sqrt(constants.power_budget / power);

    const Eigen::MatrixXcd through = meta.matrix * sampled;
    Eigen::MatrixXcd gram = through.adjoint() * through;
    gram = 0.5 * (gram + gram.adjoint()).eval();

    MethodOutcome out;
    out.method = "wmmse";
    out.ok = true;
    out.rate_bits = log2_det_identity_plus(gram, constants.noise_power);
    out.iterations = solution.report.iterations;
    out.wall_ms = elapsed_ms(start);
    out.effective_rank = solution.report.effective_rank;
    out.streams = streams;
    out.quadrature_order = order;
    return out;
}

MethodOutcome run_method(const ExperimentConfig& cfg, const std::string& method,
                         double metasurface_spacing_wavelengths = 0.0) {
    const bool on_metasurface = metasurface_spacing_wavelengths > 0.0;
    const ApertureGeometry tx = cfg.tx.to_geometry();
    const ApertureGeometry rx = cfg.rx.to_geometry();
    const PhysicalConstants constants = cfg.constants.to_physical();
    const StreamPlan plan = resolve_streams(cfg);
    const int order = quadrature_order_for(cfg, method);

    if (method == "wmmse") {
        if (on_metasurface) return wmmse_on_metasurface(cfg, metasurface_spacing_wavelengths);
        const GaussLegendreRule& rule = gauss_legendre(order);
        const SampledChannel chan =
            build_sampled_channel(build_grid(tx, rule), build_grid(rx, rule), constants);
        // Auto modes cap at the representable sample count; an explicit N is
        // passed through so the solver's own precondition governs.
        const int streams = cfg.solver.streams_mode == "explicit"
                                ? cfg.solver.streams
                                : std::min<int>(plan.continuous, static_cast<int>(chan.tx_samples()));
        const WmmseSolution solution = solve(chan, solver_config(cfg, streams, order));
        return outcome_from_report(method, solution.report);
    }

    if (method == "fourier_svd" || method == "spda") {
        // On a spacing sweep both discrete baselines reduce to SVD plus
        // water-filling on the metasurface element channel.
        if (on_metasurface || method == "spda") {
            const auto start = std::chrono::steady_clock::now();
            DiscreteArrayChannel dchan;
            if (on_metasurface) {
                const double lambda = constants.wavelength();
                const double edge = cfg.solver.metasurface_element_edge * lambda;
                dchan = sample_metasurface_channel(
                    tx, rx, constants, metasurface_spacing_wavelengths * lambda, edge * edge);
            } else {
                dchan = build_spda_channel(tx, rx, constants);
            }
            int streams = static_cast<int>(std::min(dchan.tx_elements(), dchan.rx_elements()));
            if (cfg.solver.streams_mode == "explicit")
                streams = cfg.solver.streams;
            else if (on_metasurface)
                streams = std::min(streams, plan.continuous);  // wavenumber multiplexing cap
            const SvdBeamformingResult result = spda_svd_solve(dchan, streams, constants);
            MethodOutcome out = outcome_from_svd(method, result, elapsed_ms(start), order);
            return out;
        }
        const GaussLegendreRule& rule = gauss_legendre(order);
        const SampledChannel chan =
            build_sampled_channel(build_grid(tx, rule), build_grid(rx, rule), constants);
        const auto start = std::chrono::steady_clock::now();
        const WavenumberChannel wchan = build_wavenumber_channel(chan);
        const int modes = std::min(wchan.truncation.tx_modes(), wchan.truncation.rx_modes());
        const int streams = cfg.solver.streams_mode == "explicit" ? cfg.solver.streams
                                                                  : std::min(plan.continuous, modes);
        const SvdBeamformingResult result = fourier_svd_solve(wchan, streams, constants);
        return outcome_from_svd(method, result, elapsed_ms(start), order);
    }

    if (method == "dense_optimal") {
        const auto start = std::chrono::steady_clock::now();
        int samples = cfg.solver.dense_samples_per_axis;
        if (samples <= 0)
            samples = std::max(dense_default_samples(tx, constants),
                               dense_default_samples(rx, constants));
        const int modes = samples * samples;
        const int streams = cfg.solver.streams_mode == "explicit" ? cfg.solver.streams
                                                                  : std::min(plan.continuous, modes);
        DenseOptimalOptions options;
        options.verify = cfg.solver.dense_verify;
        const SvdBeamformingResult result =
            dense_optimal_solve(tx, rx, constants, samples, streams, options);
        return outcome_from_svd(method, result, elapsed_ms(start), order);
    }

    throw ConfigError("methods: unknown method '" + method + "'");
}

MethodOutcome guarded_method(const ExperimentConfig& cfg, const std::string& method,
                             double metasurface_spacing_wavelengths = 0.0) {
    try {
        return run_method(cfg, method, metasurface_spacing_wavelengths);
    } catch (const std::exception& e) {
        MethodOutcome out;
        out.method = method;
        out.ok = false;
        out.error = e.what();
        return out;
    }
}

Json outcome_to_json(const MethodOutcome& out, const ExperimentConfig& cfg) {
    Json j;
    j["method"] = out.method;
    j["status"] = out.ok ? "ok" : "error";
    if (!out.ok) j["error"] = out.error;
    j["rate_bits"] = out.rate_bits;
    j["iterations"] = out.iterations;
    j["rate_trace"] = out.rate_trace;
    j["effective_rank"] = out.effective_rank;
    j["streams"] = out.streams;
    j["quadrature_order"] = out.quadrature_order;
    j["wall_ms"] = out.wall_ms;
    j["config"] = Json::parse(serialize_config(cfg));
    return j;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int t = 0; t < jobs; ++t)
        workers.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& w : workers) w.join();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        quoted += c;
        if (c == '"') quoted += '"';
    }
    quoted += '"';
    return quoted;
}

std::vector<double> sweep_values(const SweepConfig& sweep) {
    std::vector<double> values;
    values.reserve(sweep.steps);
    if (sweep.steps == 1) {
        values.push_back(sweep.from);
        return values;
    }
    for (int i = 0; i < sweep.steps; ++i) {
        const double t = static_cast<double>(i) / (sweep.steps - 1);
        if (sweep.log_scale)
            values.push_back(sweep.from * std::pow(sweep.to / sweep.from, t));
        else
            values.push_back(sweep.from + t * (sweep.to - sweep.from));
    }
    return values;
}

std::vector<MethodOutcome> execute_methods(const ExperimentConfig& cfg) {
    std::vector<MethodOutcome> outcomes;
    outcomes.reserve(cfg.methods.size());
    for (const auto& method : cfg.methods) outcomes.push_back(guarded_method(cfg, method));
    return outcomes;
}

std::vector<MethodOutcome> run_solve(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.output.path);
    fs::create_directories(dir);

    std::vector<MethodOutcome> outcomes = execute_methods(cfg);
    for (const auto& out : outcomes)
        write_text(dir / (out.method + ".json"), outcome_to_json(out, cfg).dump(2) + "\n");

    std::string csv = "method,rate_bits,iters,wall_ms,status\n";
    for (const auto& out : outcomes) {
        csv += csv_escape(out.method) + "," + format_number(out.rate_bits) + "," +
               std::to_string(out.iterations) + "," + format_number(out.wall_ms) + "," +
               (out.ok ? "ok" : csv_escape("error: " + out.error)) + "\n";
    }
    write_text(dir / "summary.csv", csv);
    return outcomes;
}

namespace {

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& variable,
                                   double value) {
    ExperimentConfig cfg = base;
    if (variable == "power") {
        cfg.constants.power_mA2 = value;
    } else if (variable == "aperture") {
        const double edge = std::sqrt(value);  // value is the aperture area, Tx = Rx
        cfg.tx.len_x = cfg.tx.len_y = edge;
        cfg.rx.len_x = cfg.rx.len_y = edge;
    } else if (variable == "distance") {
        Eigen::Vector3d dir(base.rx.center[0], base.rx.center[1], base.rx.center[2]);
        if (dir.norm() == 0.0) dir = Eigen::Vector3d::UnitZ();
        dir.normalize();
        cfg.rx.center = {dir.x() * value, dir.y() * value, dir.z() * value};
    } else if (variable == "frequency") {
        cfg.constants.frequency = value;  // Hz
    }
    // "spacing" leaves the configuration untouched; it parameterizes the
    // metasurface evaluation instead.
    return cfg;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int jobs) {
    if (!cfg.sweep) throw ConfigError("sweep: block required for the sweep command");
    const std::string variable = cfg.sweep->variable;
    const std::vector<double> values = sweep_values(*cfg.sweep);

    const int methods = static_cast<int>(cfg.methods.size());
    const int total = static_cast<int>(values.size()) * methods;
    std::vector<SweepRow> rows(total);
    parallel_for(total, jobs, [&](int idx) {
        const int vi = idx / methods;
        const int mi = idx % methods;
        const double value = values[vi];
        const ExperimentConfig point = apply_sweep_value(cfg, variable, value);
        SweepRow row;
        row.sweep_var = variable;
        row.value = value;
        row.outcome = guarded_method(point, cfg.methods[mi],
                                     variable == "spacing" ? value : 0.0);
        rows[idx] = std::move(row);
    });

    const fs::path dir(cfg.output.path);
    fs::create_directories(dir);
    if (cfg.output.format == "json") {
        Json arr = Json::array();
        for (const auto& row : rows) {
            Json j;
            j["sweep_var"] = row.sweep_var;
            j["value"] = row.value;
            j["method"] = row.outcome.method;
            j["rate_bits"] = row.outcome.rate_bits;
            j["iters"] = row.outcome.iterations;
            j["wall_ms"] = row.outcome.wall_ms;
            j["status"] = row.outcome.ok ? "ok" : ("error: " + row.outcome.error);
            arr.push_back(j);
        }
        write_text(dir / "sweep.json", arr.dump(2) + "\n");
    } else {
        std::string csv = "sweep_var,value,method,rate_bits,iters,wall_ms,status\n";
        for (const auto& row : rows) {
            csv += csv_escape(row.sweep_var) + "," + format_number(row.value) + "," +
                   csv_escape(row.outcome.method) + "," + format_number(row.outcome.rate_bits) +
                   "," + std::to_string(row.outcome.iterations) + "," +
                   format_number(row.outcome.wall_ms) + "," +
                   (row.outcome.ok ? "ok" : csv_escape("error: " + row.outcome.error)) + "\n";
        }
        write_text(dir / "sweep.csv", csv);
    }
    return rows;
}

std::vector<BenchRow> run_bench(const ExperimentConfig& cfg) {
    bool has_wmmse = false, has_fourier = false;
    for (const auto& m : cfg.methods) {
        has_wmmse |= (m == "wmmse");
        has_fourier |= (m == "fourier_svd");
    }
    if (!has_wmmse || !has_fourier)
        throw ConfigError("methods: bench requires both wmmse and fourier_svd");

    std::vector<BenchRow> rows;
    for (double f_ghz : cfg.bench.frequencies_ghz) {
        for (double aperture : cfg.bench.apertures_m2) {
            ExperimentConfig point = cfg;
            point.constants.frequency = f_ghz * 1e9;
            const double edge = std::sqrt(aperture);
            point.tx.len_x = point.tx.len_y = edge;
            point.rx.len_x = point.rx.len_y = edge;

            const ApertureGeometry tx = point.tx.to_geometry();
            const ApertureGeometry rx = point.rx.to_geometry();
            const PhysicalConstants constants = point.constants.to_physical();
            const GaussLegendreRule& rule = gauss_legendre(point.solver.quadrature_order);
            const QuadratureGrid tx_grid = build_grid(tx, rule);
            const QuadratureGrid rx_grid = build_grid(rx, rule);
            SampledChannel chan = build_sampled_channel(tx_grid, rx_grid, constants);

            const int streams = point.solver.streams_mode == "explicit" ? point.solver.streams : 10;

            for (const auto& method : point.methods) {
                std::vector<double> times;
                times.reserve(cfg.bench.repeats);
                for (int rep = 0; rep < cfg.bench.repeats; ++rep) {
                    const auto start = std::chrono::steady_clock::now();
                    if (cfg.bench.include_channel_build)
                        chan = build_sampled_channel(tx_grid, rx_grid, constants);
                    if (method == "wmmse") {
                        SolverConfig sc = solver_config(point, streams, point.solver.quadrature_order);
                        sc.max_iterations = cfg.bench.iterations;
                        sc.force_full_iterations = true;
                        (void)solve(chan, sc);
                    } else if (method == "fourier_svd") {
                        const WavenumberChannel wchan = build_wavenumber_channel(chan);
                        const int n = std::min(
                            streams, std::min(wchan.truncation.tx_modes(), wchan.truncation.rx_modes()));
                        (void)fourier_svd_solve(wchan, n, constants);
                    } else if (method == "spda") {
                        const DiscreteArrayChannel dchan = build_spda_channel(tx, rx, constants);
                        const int n = std::min(
                            streams,
                            static_cast<int>(std::min(dchan.tx_elements(), dchan.rx_elements())));
                        (void)spda_svd_solve(dchan, n, constants);
                    } else if (method == "dense_optimal") {
                        int samples = point.solver.dense_samples_per_axis;
                        if (samples <= 0)
                            samples = std::max(dense_default_samples(tx, constants),
                                               dense_default_samples(rx, constants));
                        (void)dense_optimal_solve(tx, rx, constants, samples,
                                                  std::min(streams, samples * samples));
                    }
                    times.push_back(elapsed_ms(start));
                }
                std::sort(times.begin(), times.end());
                BenchRow row;
                row.frequency_ghz = f_ghz;
                row.aperture_m2 = aperture;
                row.method = method;
                row.repeats = cfg.bench.repeats;
                row.wall_ms = times[times.size() / 2];
                if (times.size() % 2 == 0)
                    row.wall_ms = 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
                rows.push_back(row);
            }
        }
    }

    const fs::path dir(cfg.output.path);
    fs::create_directories(dir);
    std::string csv = "frequency_ghz,aperture_m2,method,wall_ms,repeats\n";
    for (const auto& row : rows)
        csv += format_number(row.frequency_ghz) + "," + format_number(row.aperture_m2) + "," +
               csv_escape(row.method) + "," + format_number(row.wall_ms) + "," +
               std::to_string(row.repeats) + "\n";
    write_text(dir / "bench.csv", csv);
    return rows;
}

std::vector<DofRow> run_dof(const ExperimentConfig& cfg) {
    const ApertureGeometry tx = cfg.tx.to_geometry();
    const PhysicalConstants constants = cfg.constants.to_physical();
    std::vector<DofRow> rows;
    rows.reserve(cfg.dof.steps);
    for (int i = 0; i < cfg.dof.steps; ++i) {
        const double t = cfg.dof.steps == 1 ? 0.0 : static_cast<double>(i) / (cfg.dof.steps - 1);
        const double f_ratio =
            cfg.dof.f_ratio_from * std::pow(cfg.dof.f_ratio_to / cfg.dof.f_ratio_from, t);
        ApertureGeometry rx = cfg.rx.to_geometry();
        const double distance = std::sqrt(f_ratio * rx.area());
        rx.center = Eigen::Vector3d(0.0, 0.0, distance);

        DofRow row;
        row.f_ratio = f_ratio;
        row.distance = distance;
        row.dof_quadrature = dof_estimate(tx, rx, constants, cfg.solver.quadrature_order,
                                          cfg.dof.threshold_db);
        row.dof_closed_form = dof_closed_form(tx, rx, constants, distance);
        rows.push_back(row);
    }

    const fs::path dir(cfg.output.path);
    fs::create_directories(dir);
    std::string csv = "f_ratio,distance_m,dof_quadrature,dof_closed_form\n";
    for (const auto& row : rows)
        csv += format_number(row.f_ratio) + "," + format_number(row.distance) + "," +
               std::to_string(row.dof_quadrature) + "," + format_number(row.dof_closed_form) + "\n";
    write_text(dir / "dof.csv", csv);
    return rows;
}

Eigen::MatrixXd run_correlate(const ExperimentConfig& cfg) {
    const ApertureGeometry tx = cfg.tx.to_geometry();
    const ApertureGeometry rx = cfg.rx.to_geometry();
    const PhysicalConstants constants = cfg.constants.to_physical();
    const int order = quadrature_order_for(cfg, "wmmse");
    const GaussLegendreRule& rule = gauss_legendre(order);
    const SampledChannel chan =
        build_sampled_channel(build_grid(tx, rule), build_grid(rx, rule), constants);
    const StreamPlan plan = resolve_streams(cfg);
    const int streams = std::min<int>(plan.continuous, static_cast<int>(chan.tx_samples()));

    const WmmseSolution solution = solve(chan, solver_config(cfg, streams, order));
    const CorrelationMap map =
        stream_correlation(solution.beamformer, chan, chan.constants.noise_power);

    const fs::path dir(cfg.output.path);
    fs::create_directories(dir);
    std::string csv;
    for (Eigen::Index i = 0; i < map.xi.rows(); ++i) {
        for (Eigen::Index j = 0; j < map.xi.cols(); ++j) {
            if (j > 0) csv += ",";
            csv += format_number(map.xi(i, j));
        }
        csv += "\n";
    }
    write_text(dir / "correlation.csv", csv);
    return map.xi;
}

}  // namespace capa
