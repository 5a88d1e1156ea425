#ifndef STW_CONFIG_HPP
#define STW_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stw/dynamics.hpp"
#include "stw/grid.hpp"
#include "stw/noise.hpp"
#include "stw/profile.hpp"
#include "stw/reaction.hpp"

namespace stw {

/// Invalid or inconsistent experiment configuration; the message names the
/// offending field path (e.g. "grid.L").
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape of the initial perturbation eta.
struct EtaSpec {
    std::string kind = "none";  ///< none | bump | mode
    double amplitude = 0.0;
    double center = 0.0;  ///< bump position
    double width = 1.0;   ///< bump width
    std::size_t k = 1;    ///< mode number (1-based)
};

/// Full experiment description, loaded from one JSON file. Validation is
/// strict and reports field paths; a validated config maps directly onto
/// the numerical objects via the make_* helpers.
struct ExperimentConfig {
    // model
    double nu = 1.0, b = 2.0, a = 0.25;
    bool solve_bvp = false;  ///< force the BVP solver over the closed form

    // grid
    double L = 40.0;
    std::size_t n = 1601;

    // noise
    std::size_t K = 64;
    double sigma = 1e-4;
    double r = 2.0;

    // run
    double epsilon = 0.01, m = 100.0, T = 5.0, dt = 1e-3, q_exp = 0.1;
    EtaSpec eta;

    // sweep
    std::vector<double> epsilons;
    std::vector<double> ms;
    std::size_t n_paths = 32;
    std::uint64_t master_seed = 1;

    // outputs
    std::size_t cadence = 100;
    std::string directory = ".";
    bool store_fields = true;
    bool maintain_projection = true;

    /// Closed-form wave speed implied by the model section.
    double wave_speed() const;

    /// Checks all invariants; throws ConfigError naming the field path.
    void validate() const;

    /// Canonical key=value rendering: stable across field ordering in the
    /// source file, used for hashing and embedded in every output.
    std::string canonical() const;

    /// FNV-1a hash of the canonical rendering.
    std::uint64_t hash() const;

    SpatialGrid make_grid() const;
    ReactionFunction make_reaction() const;
    WaveProfile make_profile() const;
    NoiseModel make_noise() const;
    GridVector make_eta(const SpatialGrid& grid) const;
    ModelParams make_params(const SpatialGrid& grid) const;
    RunOptions make_run_options() const;
};

/// Parses a JSON document (text) into a validated config.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses the file at path.
ExperimentConfig load_config(const std::string& path);

} // namespace stw

#endif
