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

#ifndef CAPA_CONFIG_HPP
#define CAPA_CONFIG_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "capa/channel.hpp"

namespace capa {

/// Invalid or inconsistent experiment configuration; the message names the
/// offending field path (e.g. "tx.L_x"). Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct GeometryConfig {
    double len_x = 0.0;
    double len_y = 0.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double alpha = 0.0;
    double beta = 0.0;
    double phi = 0.0;
    std::array<double, 3> polarization{0.0, 1.0, 0.0};

    ApertureGeometry to_geometry() const;
};

/// Config-facing constants block. The transmit budget field P_T follows the
/// evaluation setup's milliampere-squared convention; to_physical() converts
/// it to the solver's SI scalar.
struct ConstantsConfig {
    double frequency = 2.4e9;         // Hz
    double light_speed = 3.0e8;       // m/s
    double impedance = 120.0 * M_PI;  // ohm
    double noise_power = 5.6e-3;      // V^2/m^2
    double power_mA2 = 100.0;         // P_T in mA^2

    PhysicalConstants to_physical() const;
};

struct SolverBlock {
    int quadrature_order = 10;   // M
    int streams = 0;             // explicit N when > 0
    std::string streams_mode = "auto-fourier";  // auto-fourier | auto-dof | explicit
    double threshold = 1e-6;
    int max_iterations = 100;
    std::uint64_t seed = 42;
    std::string init = "matched-filter";  // or "random"
    std::map<std::string, int> order_overrides;  // per-method M
    int dense_samples_per_axis = 0;  // 0 = auto
    bool dense_verify = false;       // doubling check inside dense_optimal
    double dof_threshold_db = 10.0;
    double metasurface_element_edge = 0.05;  // element edge length in wavelengths
};

struct SweepConfig {
    std::string variable;  // power | aperture | distance | frequency | spacing
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
    bool log_scale = false;
};

struct DofCurveConfig {
    double f_ratio_from = 1.0;  // F = D^2 / A_R
    double f_ratio_to = 100.0;
    int steps = 10;
    double threshold_db = 10.0;
};

struct BenchConfig {
    std::vector<double> frequencies_ghz{2.4, 5.0, 7.8};
    std::vector<double> apertures_m2{0.2, 0.3, 0.4};
    int repeats = 1;
    int iterations = 100;  // forced WMMSE iteration count
    bool include_channel_build = false;
};

struct OutputConfig {
    std::string format = "csv";  // csv | json
    std::string path = "out";
};

struct ExperimentConfig {
    ConstantsConfig constants;
    GeometryConfig tx;
    GeometryConfig rx;
    std::vector<std::string> methods{"wmmse", "fourier_svd", "spda", "dense_optimal"};
    SolverBlock solver;
    std::optional<SweepConfig> sweep;
    DofCurveConfig dof;
    BenchConfig bench;
    OutputConfig output;
};

/// The simulation setup used throughout the evaluation section: 0.25 m^2
/// square apertures 10 m apart on boresight, 2.4 GHz, P_T = 100, noise
/// 5.6e-3, M = 10.
ExperimentConfig paper_default_config();

/// Parses and validates a JSON config; unknown keys are rejected and error
/// messages carry the field path. Missing fields fall back to the defaults.
ExperimentConfig parse_config(const std::string& text);

/// Reads, parses and validates a config file.
ExperimentConfig load_config_file(const std::string& path);

std::string serialize_config(const ExperimentConfig& config);

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b);

/// Post-parse consistency checks (also run by parse_config).
void validate_config(const ExperimentConfig& config);

}  // namespace capa

#endif  // CAPA_CONFIG_HPP
