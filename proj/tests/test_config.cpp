#include <catch2/catch_amalgamated.hpp>

#include "healfem/config.hpp"

using namespace healfem;
using Catch::Approx;

TEST_CASE("empty config gives the baseline table", "[config]") {
    const ExperimentConfig cfg = parse_config("");
    CHECK(cfg.params.D_g == 0.0035);
    CHECK(cfg.params.D_f == 0.0008);
    CHECK(cfg.params.D_m == 0.0008);
    CHECK(cfg.params.lambda_g == 0.2);
    CHECK(cfg.params.lambda_f == 0.025);
    CHECK(cfg.params.p_g_f == 0.2);
    CHECK(cfg.params.p_f == 5.0);
    CHECK(cfg.params.p_e == 5.0);
    CHECK(cfg.params.alpha_f == 0.015);
    CHECK(cfg.params.alpha_e == 0.05);
    CHECK(cfg.params.e_c == 0.1);
    CHECK(cfg.params.w_g == 1.0);
    CHECK(cfg.params.adhesion.S_max[0][0] == 0.2);
    CHECK(cfg.params.adhesion.S_max[1][2] == 1.0);
    CHECK(cfg.params.adhesion.mu_f == 0.08);
    CHECK(cfg.params.adhesion.R == 0.1);
    CHECK(cfg.params.adhesion.sigma == 0.04);
    CHECK(cfg.params.dt == 0.2);
    CHECK(cfg.params.t_end == 100.0);
    CHECK(cfg.domain.lo.x == -1.0);
    CHECK(cfg.domain.hi.y == 1.0);
}

TEST_CASE("config rejects bad input", "[config]") {
    CHECK_THROWS_AS(parse_config("dt = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("dt = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("banana = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("params.banana = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("dt = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("dt = 0.2x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("stray tokens without equals\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("variant = upside-down\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("threads = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("domain = 1 2 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("params.R = -0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sweep.scale.banana = 2\n"), ConfigError);
}

TEST_CASE("overrides and echo round-trip", "[config]") {
    const std::string text =
        "params.D_g = 0.35\n"
        "n = 8\n"
        "dt = 0.05\n"
        "snapshot_times = 0 3 10\n"
        "sweep.n = 4 8 16\n"
        "sweep.dt = 10 1 0.1\n"
        "sweep.scale.D_g = 1 100\n"
        "variant = original\n"
        "# comment line\n"
        "seed = 99\n";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.params.D_g == 0.35);
    CHECK(cfg.n == 8);
    CHECK(cfg.variant == SchemeVariant::original);
    CHECK(cfg.snapshot_times == std::vector<double>{0.0, 3.0, 10.0});
    CHECK(cfg.sweep_n == std::vector<int>{4, 8, 16});
    CHECK(cfg.seed == 99);
    REQUIRE(cfg.sweep_scale.size() == 1);
    CHECK(cfg.sweep_scale[0].first == "D_g");

    const std::string echo = echo_config(cfg);
    CHECK(echo.find("params.D_g = 0.35") != std::string::npos);

    const ExperimentConfig cfg2 = parse_config(echo);
    CHECK(cfg2.params.D_g == cfg.params.D_g);
    CHECK(cfg2.n == cfg.n);
    CHECK(cfg2.params.dt == cfg.params.dt);
    CHECK(cfg2.variant == cfg.variant);
    CHECK(cfg2.snapshot_times == cfg.snapshot_times);
    CHECK(cfg2.sweep_n == cfg.sweep_n);
    CHECK(cfg2.sweep_dt == cfg.sweep_dt);
    CHECK(cfg2.seed == cfg.seed);
    CHECK(echo_config(cfg2) == echo);
}
