#include <doctest.h>

#include <string>

#include "capa/config.hpp"
#include "capa/experiments.hpp"

using namespace capa;

TEST_CASE("empty object parses to the paper defaults") {
    const ExperimentConfig cfg = parse_config("{}");
    CHECK(config_equal(cfg, paper_default_config()));
    CHECK(cfg.constants.frequency == 2.4e9);
    CHECK(cfg.constants.power_mA2 == 100.0);
    CHECK(cfg.constants.to_physical().power_budget == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(cfg.constants.noise_power == 5.6e-3);
    CHECK(cfg.tx.len_x == 0.5);
    CHECK(cfg.rx.center[2] == 10.0);
    CHECK(cfg.solver.quadrature_order == 10);
    CHECK(cfg.solver.streams_mode == "auto-fourier");
}

TEST_CASE("config round-trips through serialization") {
    const std::string text = R"({
        "constants": {"f": 5e9, "P_T": 42.5},
        "tx": {"A": 0.4, "alpha": 0.2},
        "rx": {"L_x": 0.3, "L_y": 0.6, "center": [0.1, -0.2, 7.0], "phi": 0.785},
        "methods": ["wmmse", "spda"],
        "solver": {"M": 8, "N": 6, "seed": 9, "init": "random",
                   "M_overrides": {"fourier_svd": 14}},
        "sweep": {"variable": "power", "from": 10, "to": 1000, "steps": 5, "log_scale": true},
        "output": {"format": "json", "path": "results"}
    })";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.constants.frequency == 5e9);
    CHECK(cfg.tx.len_x == doctest::Approx(std::sqrt(0.4)));
    CHECK(cfg.solver.streams == 6);
    CHECK(cfg.solver.streams_mode == "explicit");
    CHECK(cfg.solver.order_overrides.at("fourier_svd") == 14);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->log_scale);

    const ExperimentConfig reparsed = parse_config(serialize_config(cfg));
    CHECK(config_equal(cfg, reparsed));
}

TEST_CASE("validation errors carry field paths") {
    auto message_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message_of(R"({"tx": {"L_x": -0.5}})").find("tx.L_x") != std::string::npos);
    CHECK(message_of(R"({"constants": {"sigma2": 0}})").find("constants.sigma2") !=
          std::string::npos);
    CHECK(message_of(R"({"methods": ["magic"]})").find("methods") != std::string::npos);
    CHECK(message_of(R"({"solver": {"N": "auto-magic"}})").find("solver.N") != std::string::npos);
    CHECK(message_of(R"({"sweep": {"variable": "volume", "from": 1, "to": 2, "steps": 2}})")
              .find("sweep.variable") != std::string::npos);
    CHECK(message_of(R"({"bogus": 1})").find("bogus") != std::string::npos);
    CHECK(message_of("not json at all").find("invalid JSON") != std::string::npos);
}

TEST_CASE("auto stream modes are accepted") {
    CHECK(parse_config(R"({"solver": {"N": "auto-dof"}})").solver.streams_mode == "auto-dof");
    CHECK(parse_config(R"({"solver": {"N": 4}})").solver.streams == 4);
    CHECK_THROWS_AS(parse_config(R"({"solver": {"N": 0}})"), ConfigError);
}

TEST_CASE("csv fields are RFC-4180 quoted") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("sweep values cover both endpoints") {
    SweepConfig sweep;
    sweep.variable = "power";
    sweep.from = 10.0;
    sweep.to = 1000.0;
    sweep.steps = 5;
    sweep.log_scale = true;
    const auto values = sweep_values(sweep);
    REQUIRE(values.size() == 5);
    CHECK(values.front() == doctest::Approx(10.0));
    CHECK(values[2] == doctest::Approx(100.0));
    CHECK(values.back() == doctest::Approx(1000.0));

    sweep.log_scale = false;
    sweep.steps = 3;
    const auto linear = sweep_values(sweep);
    CHECK(linear[1] == doctest::Approx(505.0));
}
