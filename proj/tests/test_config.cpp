#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "stw/config.hpp"

using namespace stw;

namespace {

std::string minimal_config() {
    return R"({
        "model": {"nu": 1.0, "b": 2.0, "a": 0.25},
        "grid": {"L": 40.0, "n": 1601},
        "noise": {"K": 64, "sigma": 1e-4, "r": 2.0},
        "run": {"epsilon": 0.01, "m": 100.0, "T": 5.0, "dt": 1e-3, "q_exp": 0.1}
    })";
}

bool message_contains(const std::string& text, const char* needle) {
    return text.find(needle) != std::string::npos;
}

template <typename Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError& err) {
        return err.what();
    }
    return "";
}

} // namespace

TEST_CASE("a minimal config parses with defaults filled in") {
    const auto cfg = parse_config(minimal_config());
    CHECK(cfg.nu == 1.0);
    CHECK(cfg.a == 0.25);
    CHECK(cfg.n == 1601);
    CHECK(cfg.K == 64);
    CHECK(cfg.n_paths == 32);
    CHECK(cfg.cadence == 100);
    CHECK(cfg.maintain_projection);
    CHECK(cfg.wave_speed() == doctest::Approx(0.5));
}

TEST_CASE("validation errors name the offending field path") {
    CHECK(message_contains(
        thrown_message([] {
            parse_config(R"({"model": {}, "noise": {}, "run": {}})");
        }),
        "grid.L"));
    CHECK(message_contains(thrown_message([] {
                               auto cfg = parse_config(minimal_config());
                               cfg.r = 1.0;
                               cfg.validate();
                           }),
                           "noise.r"));
    CHECK(message_contains(thrown_message([] {
                               auto cfg = parse_config(minimal_config());
                               cfg.n = 1600;
                               cfg.validate();
                           }),
                           "grid.n"));
    CHECK(message_contains(thrown_message([] {
                               auto cfg = parse_config(minimal_config());
                               cfg.dt = -1.0;
                               cfg.validate();
                           }),
                           "run.dt"));
    CHECK(message_contains(thrown_message([] {
                               auto cfg = parse_config(minimal_config());
                               cfg.L = 21.0; // |c| T + 20 = 22.5
                               cfg.validate();
                           }),
                           "grid.L"));
    CHECK(message_contains(thrown_message([] { parse_config("not json"); }),
                           "JSON"));
}

TEST_CASE("domain truncation accounts for the wave displacement") {
    auto cfg = parse_config(minimal_config());
    cfg.L = 23.0;
    cfg.n = 921;
    CHECK_NOTHROW(cfg.validate()); // needs 22.5
    cfg.T = 10.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError); // needs 25
}

TEST_CASE("config hash is stable and sensitive") {
    const auto cfg = parse_config(minimal_config());
    auto other = cfg;
    CHECK(cfg.hash() == other.hash());
    other.sigma = 2e-4;
    CHECK(cfg.hash() != other.hash());
    other = cfg;
    other.master_seed = 2;
    CHECK(cfg.hash() != other.hash());
}

TEST_CASE("eta builders produce boundary-compatible shapes") {
    auto cfg = parse_config(minimal_config());
    const auto grid = cfg.make_grid();
    CHECK(cfg.make_eta(grid).empty()); // kind = none

    cfg.eta = {"bump", 0.5, 1.0, 2.0, 1};
    auto bump = cfg.make_eta(grid);
    REQUIRE(bump.size() == grid.size());
    CHECK(bump.front() == 0.0);
    CHECK(bump.back() == 0.0);
    CHECK(bump[grid.center_index()] > 0.0);

    cfg.eta = {"mode", 1.0, 0.0, 1.0, 2};
    auto mode = cfg.make_eta(grid);
    CHECK(mode.front() == 0.0);
    CHECK(std::abs(mode[grid.center_index()]) < 1e-12); // sin(k pi) node

    cfg.eta.kind = "sawtooth";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("factories reproduce the configured objects") {
    auto cfg = parse_config(minimal_config());
    cfg.L = 20.0;
    cfg.n = 401;
    cfg.T = 0.5;
    const auto profile = cfg.make_profile();
    CHECK(profile.c() == doctest::Approx(0.5));
    const auto noise = cfg.make_noise();
    CHECK(noise.K() == cfg.K);
    const auto params = cfg.make_params(profile.grid());
    CHECK(params.dt == cfg.dt);
    CHECK_NOTHROW(params.validate(profile.grid()));
}

TEST_CASE("sweep epsilons must decrease strictly") {
    auto cfg = parse_config(minimal_config());
    cfg.epsilons = {0.02, 0.01, 0.005};
    CHECK_NOTHROW(cfg.validate());
    cfg.epsilons = {0.01, 0.02};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
