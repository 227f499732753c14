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

#include "capa/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace capa {

using Json = nlohmann::ordered_json;

PhysicalConstants ConstantsConfig::to_physical() const {
    PhysicalConstants c;
    c.frequency = frequency;
    c.light_speed = light_speed;
    c.impedance = impedance;
    c.noise_power = noise_power;
    c.power_budget = power_mA2 * 1e-3;
    return c;
}

ApertureGeometry GeometryConfig::to_geometry() const {
    ApertureGeometry g;
    g.len_x = len_x;
    g.len_y = len_y;
    g.center = Eigen::Vector3d(center[0], center[1], center[2]);
    g.alpha = alpha;
    g.beta = beta;
    g.phi = phi;
    g.local_polarization = Eigen::Vector3d(polarization[0], polarization[1], polarization[2]);
    return g;
}

ExperimentConfig paper_default_config() {
    ExperimentConfig cfg;
    cfg.constants.frequency = 2.4e9;
    cfg.constants.light_speed = 3.0e8;
    cfg.constants.impedance = 120.0 * M_PI;
    cfg.constants.noise_power = 5.6e-3;
    cfg.constants.power_mA2 = 100.0;
    cfg.tx.len_x = cfg.tx.len_y = 0.5;
    cfg.rx.len_x = cfg.rx.len_y = 0.5;
    cfg.rx.center = {0.0, 0.0, 10.0};
    return cfg;
}

namespace {

const std::set<std::string> kKnownMethods{"wmmse", "fourier_svd", "spda", "dense_optimal"};
const std::set<std::string> kSweepVariables{"power", "aperture", "distance", "frequency", "spacing"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void check_known_keys(const Json& obj, const std::string& path,
                      const std::set<std::string>& known) {
    for (const auto& item : obj.items())
        if (!known.count(item.key())) fail(path + "." + item.key(), "unknown field");
}

double require_number(const Json& obj, const std::string& path, const std::string& key,
                      double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

int require_int(const Json& obj, const std::string& path, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<int>();
}

std::array<double, 3> require_vec3(const Json& obj, const std::string& path, const std::string& key,
                                   std::array<double, 3> fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj[key];
    if (!v.is_array() || v.size() != 3) fail(path + "." + key, "expected an array of 3 numbers");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) fail(path + "." + key, "expected an array of 3 numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

GeometryConfig parse_geometry(const Json& obj, const std::string& path, GeometryConfig base) {
    check_known_keys(obj, path, {"A", "L_x", "L_y", "center", "alpha", "beta", "phi", "polarization"});
    if (obj.contains("A")) {
        const double area = require_number(obj, path, "A", 0.0);
        if (!(area > 0.0)) fail(path + ".A", "aperture area must be > 0");
        base.len_x = base.len_y = std::sqrt(area);
    }
    base.len_x = require_number(obj, path, "L_x", base.len_x);
    base.len_y = require_number(obj, path, "L_y", base.len_y);
    base.center = require_vec3(obj, path, "center", base.center);
    base.alpha = require_number(obj, path, "alpha", base.alpha);
    base.beta = require_number(obj, path, "beta", base.beta);
    base.phi = require_number(obj, path, "phi", base.phi);
    base.polarization = require_vec3(obj, path, "polarization", base.polarization);
    return base;
}

Json geometry_to_json(const GeometryConfig& g) {
    Json obj;
    obj["L_x"] = g.len_x;
    obj["L_y"] = g.len_y;
    obj["center"] = g.center;
    obj["alpha"] = g.alpha;
    obj["beta"] = g.beta;
    obj["phi"] = g.phi;
    obj["polarization"] = g.polarization;
    return obj;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
    if (!(cfg.constants.frequency > 0.0)) fail("constants.f", "must be > 0");
    if (!(cfg.constants.light_speed > 0.0)) fail("constants.c", "must be > 0");
    if (!(cfg.constants.impedance > 0.0)) fail("constants.eta", "must be > 0");
    if (!(cfg.constants.noise_power > 0.0)) fail("constants.sigma2", "must be > 0");
    if (!(cfg.constants.power_mA2 > 0.0)) fail("constants.P_T", "must be > 0");

    auto check_geometry = [](const GeometryConfig& g, const std::string& path) {
        if (!(g.len_x > 0.0)) fail(path + ".L_x", "must be > 0");
        if (!(g.len_y > 0.0)) fail(path + ".L_y", "must be > 0");
        const double norm = std::sqrt(g.polarization[0] * g.polarization[0] +
                                      g.polarization[1] * g.polarization[1] +
                                      g.polarization[2] * g.polarization[2]);
        if (!(norm > 0.0)) fail(path + ".polarization", "must be nonzero");
    };
    check_geometry(cfg.tx, "tx");
    check_geometry(cfg.rx, "rx");

    if (cfg.methods.empty()) fail("methods", "must list at least one method");
    for (const auto& m : cfg.methods)
        if (!kKnownMethods.count(m)) fail("methods", "unknown method '" + m + "'");

    if (cfg.solver.quadrature_order < 1) fail("solver.M", "must be >= 1");
    if (cfg.solver.streams_mode == "explicit") {
        if (cfg.solver.streams < 1) fail("solver.N", "must be >= 1");
    } else if (cfg.solver.streams_mode != "auto-fourier" && cfg.solver.streams_mode != "auto-dof") {
        fail("solver.N", "expected an integer, \"auto-fourier\" or \"auto-dof\"");
    }
    if (!(cfg.solver.threshold > 0.0)) fail("solver.threshold", "must be > 0");
    if (cfg.solver.max_iterations < 1) fail("solver.max_iter", "must be >= 1");
    if (cfg.solver.init != "matched-filter" && cfg.solver.init != "random")
        fail("solver.init", "expected \"matched-filter\" or \"random\"");
    for (const auto& [method, order] : cfg.solver.order_overrides) {
        if (!kKnownMethods.count(method)) fail("solver.M_overrides", "unknown method '" + method + "'");
        if (order < 1) fail("solver.M_overrides." + method, "must be >= 1");
    }
    if (cfg.solver.dense_samples_per_axis < 0) fail("solver.dense_samples_per_axis", "must be >= 0");
    if (!(cfg.solver.dof_threshold_db > 0.0)) fail("solver.dof_threshold_db", "must be > 0");
    if (!(cfg.solver.metasurface_element_edge > 0.0))
        fail("solver.metasurface_element_edge", "must be > 0");

    if (cfg.sweep) {
        if (!kSweepVariables.count(cfg.sweep->variable))
            fail("sweep.variable", "unknown sweep variable '" + cfg.sweep->variable + "'");
        if (cfg.sweep->steps < 1) fail("sweep.steps", "must be >= 1");
        if (!(cfg.sweep->from > 0.0) || !(cfg.sweep->to > 0.0))
            fail("sweep.range", "sweep endpoints must be > 0");
        if (cfg.sweep->log_scale && !(cfg.sweep->from < cfg.sweep->to))
            fail("sweep.range", "log-scale sweep requires from < to");
    }

    if (cfg.dof.steps < 1) fail("dof.steps", "must be >= 1");
    if (!(cfg.dof.f_ratio_from > 0.0) || !(cfg.dof.f_ratio_to >= cfg.dof.f_ratio_from))
        fail("dof.range", "requires 0 < from <= to");
    if (!(cfg.dof.threshold_db > 0.0)) fail("dof.threshold_db", "must be > 0");

    if (cfg.bench.repeats < 1) fail("bench.repeats", "must be >= 1");
    if (cfg.bench.iterations < 1) fail("bench.iterations", "must be >= 1");
    if (cfg.bench.frequencies_ghz.empty()) fail("bench.frequencies_ghz", "must be nonempty");
    if (cfg.bench.apertures_m2.empty()) fail("bench.apertures_m2", "must be nonempty");

    if (cfg.output.format != "csv" && cfg.output.format != "json")
        fail("output.format", "expected \"csv\" or \"json\"");
    if (cfg.output.path.empty()) fail("output.path", "must be nonempty");
}

ExperimentConfig parse_config(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
    check_known_keys(root, "config",
                     {"constants", "tx", "rx", "methods", "solver", "sweep", "dof", "bench", "output"});

    ExperimentConfig cfg = paper_default_config();

    if (root.contains("constants")) {
        const Json& c = root["constants"];
        check_known_keys(c, "constants", {"f", "c", "eta", "sigma2", "P_T"});
        cfg.constants.frequency = require_number(c, "constants", "f", cfg.constants.frequency);
        cfg.constants.light_speed = require_number(c, "constants", "c", cfg.constants.light_speed);
        cfg.constants.impedance = require_number(c, "constants", "eta", cfg.constants.impedance);
        cfg.constants.noise_power = require_number(c, "constants", "sigma2", cfg.constants.noise_power);
        cfg.constants.power_mA2 = require_number(c, "constants", "P_T", cfg.constants.power_mA2);
    }
    if (root.contains("tx")) cfg.tx = parse_geometry(root["tx"], "tx", cfg.tx);
    if (root.contains("rx")) cfg.rx = parse_geometry(root["rx"], "rx", cfg.rx);

    if (root.contains("methods")) {
        if (!root["methods"].is_array()) fail("methods", "expected an array of method names");
        cfg.methods.clear();
        for (const auto& m : root["methods"]) {
            if (!m.is_string()) fail("methods", "expected an array of method names");
            cfg.methods.push_back(m.get<std::string>());
        }
    }

    if (root.contains("solver")) {
        const Json& s = root["solver"];
        check_known_keys(s, "solver",
                         {"M", "N", "threshold", "max_iter", "seed", "init", "M_overrides",
                          "dense_samples_per_axis", "dense_verify", "dof_threshold_db",
                          "metasurface_element_edge"});
        cfg.solver.quadrature_order = require_int(s, "solver", "M", cfg.solver.quadrature_order);
        if (s.contains("N")) {
            if (s["N"].is_number_integer()) {
                cfg.solver.streams = s["N"].get<int>();
                cfg.solver.streams_mode = "explicit";
            } else if (s["N"].is_string()) {
                cfg.solver.streams_mode = s["N"].get<std::string>();
            } else {
                fail("solver.N", "expected an integer, \"auto-fourier\" or \"auto-dof\"");
            }
        }
        cfg.solver.threshold = require_number(s, "solver", "threshold", cfg.solver.threshold);
        cfg.solver.max_iterations = require_int(s, "solver", "max_iter", cfg.solver.max_iterations);
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer())
                fail("solver.seed", "expected a nonnegative integer");
            cfg.solver.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("init")) {
            if (!s["init"].is_string()) fail("solver.init", "expected a string");
            cfg.solver.init = s["init"].get<std::string>();
        }
        if (s.contains("M_overrides")) {
            if (!s["M_overrides"].is_object()) fail("solver.M_overrides", "expected an object");
            for (const auto& item : s["M_overrides"].items()) {
                if (!item.value().is_number_integer())
                    fail("solver.M_overrides." + item.key(), "expected an integer");
                cfg.solver.order_overrides[item.key()] = item.value().get<int>();
            }
        }
        cfg.solver.dense_samples_per_axis =
            require_int(s, "solver", "dense_samples_per_axis", cfg.solver.dense_samples_per_axis);
        if (s.contains("dense_verify")) {
            if (!s["dense_verify"].is_boolean()) fail("solver.dense_verify", "expected a boolean");
            cfg.solver.dense_verify = s["dense_verify"].get<bool>();
        }
        cfg.solver.dof_threshold_db =
            require_number(s, "solver", "dof_threshold_db", cfg.solver.dof_threshold_db);
        cfg.solver.metasurface_element_edge = require_number(
            s, "solver", "metasurface_element_edge", cfg.solver.metasurface_element_edge);
    }

    if (root.contains("sweep")) {
        const Json& s = root["sweep"];
        check_known_keys(s, "sweep", {"variable", "from", "to", "steps", "log_scale"});
        SweepConfig sweep;
        if (!s.contains("variable") || !s["variable"].is_string())
            fail("sweep.variable", "required string field");
        sweep.variable = s["variable"].get<std::string>();
        sweep.from = require_number(s, "sweep", "from", 0.0);
        sweep.to = require_number(s, "sweep", "to", 0.0);
        sweep.steps = require_int(s, "sweep", "steps", 0);
        if (s.contains("log_scale")) {
            if (!s["log_scale"].is_boolean()) fail("sweep.log_scale", "expected a boolean");
            sweep.log_scale = s["log_scale"].get<bool>();
        }
        cfg.sweep = sweep;
    }

    if (root.contains("dof")) {
        const Json& d = root["dof"];
        check_known_keys(d, "dof", {"f_ratio_from", "f_ratio_to", "steps", "threshold_db"});
        cfg.dof.f_ratio_from = require_number(d, "dof", "f_ratio_from", cfg.dof.f_ratio_from);
        cfg.dof.f_ratio_to = require_number(d, "dof", "f_ratio_to", cfg.dof.f_ratio_to);
        cfg.dof.steps = require_int(d, "dof", "steps", cfg.dof.steps);
        cfg.dof.threshold_db = require_number(d, "dof", "threshold_db", cfg.dof.threshold_db);
    }

    if (root.contains("bench")) {
        const Json& b = root["bench"];
        check_known_keys(b, "bench",
                         {"frequencies_ghz", "apertures_m2", "repeats", "iterations",
                          "include_channel_build"});
        auto read_list = [&](const char* key, std::vector<double>& dst) {
            if (!b.contains(key)) return;
            if (!b[key].is_array()) fail(std::string("bench.") + key, "expected an array of numbers");
            dst.clear();
            for (const auto& v : b[key]) {
                if (!v.is_number()) fail(std::string("bench.") + key, "expected an array of numbers");
                dst.push_back(v.get<double>());
            }
        };
        read_list("frequencies_ghz", cfg.bench.frequencies_ghz);
        read_list("apertures_m2", cfg.bench.apertures_m2);
        cfg.bench.repeats = require_int(b, "bench", "repeats", cfg.bench.repeats);
        cfg.bench.iterations = require_int(b, "bench", "iterations", cfg.bench.iterations);
        if (b.contains("include_channel_build")) {
            if (!b["include_channel_build"].is_boolean())
                fail("bench.include_channel_build", "expected a boolean");
            cfg.bench.include_channel_build = b["include_channel_build"].get<bool>();
        }
    }

    if (root.contains("output")) {
        const Json& o = root["output"];
        check_known_keys(o, "output", {"format", "path"});
        if (o.contains("format")) {
            if (!o["format"].is_string()) fail("output.format", "expected a string");
            cfg.output.format = o["format"].get<std::string>();
        }
        if (o.contains("path")) {
            if (!o["path"].is_string()) fail("output.path", "expected a string");
            cfg.output.path = o["path"].get<std::string>();
        }
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    Json root;
    root["constants"] = {{"f", cfg.constants.frequency},
                         {"c", cfg.constants.light_speed},
                         {"eta", cfg.constants.impedance},
                         {"sigma2", cfg.constants.noise_power},
                         {"P_T", cfg.constants.power_mA2}};
    root["tx"] = geometry_to_json(cfg.tx);
    root["rx"] = geometry_to_json(cfg.rx);
    root["methods"] = cfg.methods;

    Json solver;
    solver["M"] = cfg.solver.quadrature_order;
    if (cfg.solver.streams_mode == "explicit")
        solver["N"] = cfg.solver.streams;
    else
        solver["N"] = cfg.solver.streams_mode;
    solver["threshold"] = cfg.solver.threshold;
    solver["max_iter"] = cfg.solver.max_iterations;
    solver["seed"] = cfg.solver.seed;
    solver["init"] = cfg.solver.init;
    if (!cfg.solver.order_overrides.empty()) {
        Json overrides;
        for (const auto& [k, v] : cfg.solver.order_overrides) overrides[k] = v;
        solver["M_overrides"] = overrides;
    }
    solver["dense_samples_per_axis"] = cfg.solver.dense_samples_per_axis;
    solver["dense_verify"] = cfg.solver.dense_verify;
    solver["dof_threshold_db"] = cfg.solver.dof_threshold_db;
    solver["metasurface_element_edge"] = cfg.solver.metasurface_element_edge;
    root["solver"] = solver;

    if (cfg.sweep) {
        root["sweep"] = {{"variable", cfg.sweep->variable},
                         {"from", cfg.sweep->from},
                         {"to", cfg.sweep->to},
                         {"steps", cfg.sweep->steps},
                         {"log_scale", cfg.sweep->log_scale}};
    }
    root["dof"] = {{"f_ratio_from", cfg.dof.f_ratio_from},
                   {"f_ratio_to", cfg.dof.f_ratio_to},
                   {"steps", cfg.dof.steps},
                   {"threshold_db", cfg.dof.threshold_db}};
    root["bench"] = {{"frequencies_ghz", cfg.bench.frequencies_ghz},
                     {"apertures_m2", cfg.bench.apertures_m2},
                     {"repeats", cfg.bench.repeats},
                     {"iterations", cfg.bench.iterations},
                     {"include_channel_build", cfg.bench.include_channel_build}};
    root["output"] = {{"format", cfg.output.format}, {"path", cfg.output.path}};
    return root.dump(2);
}

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
    return Json::parse(serialize_config(a)) == Json::parse(serialize_config(b));
}

}  // namespace capa
