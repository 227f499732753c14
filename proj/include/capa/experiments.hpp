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

#ifndef CAPA_EXPERIMENTS_HPP
#define CAPA_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "capa/config.hpp"

namespace capa {

/// One method evaluated on one configuration point.
struct MethodOutcome {
    std::string method;
    bool ok = false;
    std::string error;
    double rate_bits = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
    int effective_rank = 0;
    int streams = 0;
    int quadrature_order = 0;
    std::vector<double> rate_trace;  // WMMSE only
};

/// Runs every configured method on the given configuration. Method failures
/// are captured in the outcome, not thrown.
std::vector<MethodOutcome> execute_methods(const ExperimentConfig& config);

/// RFC-4180 CSV field quoting.
std::string csv_escape(const std::string& field);

/// Writes one JSON report per method plus a combined summary.csv under
/// config.output.path (created if missing). Returns the outcomes. Throws on
/// I/O failure; method-level numeric failures are recorded in the reports.
std::vector<MethodOutcome> run_solve(const ExperimentConfig& config);

struct SweepRow {
    std::string sweep_var;
    double value = 0.0;
    MethodOutcome outcome;
};

/// Sweeps the configured variable over [from, to] and evaluates every method
/// at each point; failed points get a status entry and the sweep continues.
/// Writes sweep.csv (or sweep.json) under the output path.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, int jobs = 0);

struct BenchRow {
    double frequency_ghz = 0.0;
    double aperture_m2 = 0.0;
    std::string method;
    double wall_ms = 0.0;  // median over repeats
    int repeats = 0;
};

/// Table-style CPU-time benchmark over the configured frequency x aperture
/// grid, single-threaded, with the WMMSE iteration count pinned. By default
/// the timed region excludes H construction for WMMSE/SPDA/dense and
/// includes the wavenumber-channel construction for Fourier-SVD.
std::vector<BenchRow> run_bench(const ExperimentConfig& config);

struct DofRow {
    double f_ratio = 0.0;  // F = D^2 / A_R
    double distance = 0.0;
    int dof_quadrature = 0;
    double dof_closed_form = 0.0;
};

/// DoF-versus-F curve using the Gauss-Legendre estimate with the far-field
/// closed form reported alongside. Writes dof.csv.
std::vector<DofRow> run_dof(const ExperimentConfig& config);

/// Solves WMMSE on the configuration and writes the stream-correlation grid
/// xi (N x N) as correlation.csv. Returns the grid.
Eigen::MatrixXd run_correlate(const ExperimentConfig& config);

/// Sweep values including both endpoints, linear or logarithmic.
std::vector<double> sweep_values(const SweepConfig& sweep);

}  // namespace capa

#endif  // CAPA_EXPERIMENTS_HPP
