#include "stw/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stw {

namespace {

using nlohmann::json;

double get_number(const json& section, const std::string& path, const char* key,
                  double fallback, bool required = false) {
    if (!section.contains(key)) {
        if (required) throw ConfigError("missing field: " + path + "." + key);
        return fallback;
    }
    const auto& v = section.at(key);
    if (!v.is_number())
        throw ConfigError("expected a number at " + path + "." + key);
    return v.get<double>();
}

std::size_t get_index(const json& section, const std::string& path, const char* key,
                      std::size_t fallback) {
    if (!section.contains(key)) return fallback;
    const auto& v = section.at(key);
    if (!v.is_number_unsigned())
        throw ConfigError("expected a non-negative integer at " + path + "." + key);
    return v.get<std::size_t>();
}

bool get_flag(const json& section, const std::string& path, const char* key,
              bool fallback) {
    if (!section.contains(key)) return fallback;
    const auto& v = section.at(key);
    if (!v.is_boolean())
        throw ConfigError("expected a boolean at " + path + "." + key);
    return v.get<bool>();
}

const json& require_section(const json& root, const char* name, const char* hint) {
    if (!root.contains(name))
        throw ConfigError(std::string("missing section: ") + name + " (expected " +
                          hint + ")");
    if (!root.at(name).is_object())
        throw ConfigError(std::string("expected an object at ") + name);
    return root.at(name);
}

} // namespace

double ExperimentConfig::wave_speed() const {
    return std::sqrt(2.0 * nu * b) * (0.5 - a);
}

void ExperimentConfig::validate() const {
    if (!(nu > 0.0)) throw ConfigError("model.nu must be positive");
    if (!(b > 0.0)) throw ConfigError("model.b must be positive");
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("model.a must lie in (0, 1)");
    if (!(L > 0.0)) throw ConfigError("grid.L must be positive");
    if (n < 3 || n % 2 == 0) throw ConfigError("grid.n must be odd and >= 3");
    if (K == 0) throw ConfigError("noise.K must be positive");
    if (K > n - 2)
        throw ConfigError("noise.K must be <= grid.n - 2 for mode orthogonality");
    if (sigma < 0.0) throw ConfigError("noise.sigma must be non-negative");
    if (r < 2.0) throw ConfigError("noise.r must be >= 2 for H1 regularity");
    if (epsilon < 0.0) throw ConfigError("run.epsilon must be non-negative");
    if (!(m > 0.0)) throw ConfigError("run.m must be positive");
    if (!(T > 0.0)) throw ConfigError("run.T must be positive");
    if (!(dt > 0.0)) throw ConfigError("run.dt must be positive");
    if (dt > T) throw ConfigError("run.dt must not exceed run.T");
    if (q_exp < 0.0 || q_exp > 1.0)
        throw ConfigError("run.q_exp must lie in [0, 1]");
    const double needed = std::abs(wave_speed()) * T + 20.0;
    if (L < needed) {
        std::ostringstream os;
        os << "grid.L must be >= |c| T + 20 = " << needed
           << " to keep truncation error negligible over run.T";
        throw ConfigError(os.str());
    }
    for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
        if (!(epsilons[i] > epsilons[i + 1]))
            throw ConfigError("sweep.epsilons must be strictly decreasing");
    for (double e : epsilons)
        if (!(e > 0.0)) throw ConfigError("sweep.epsilons must be positive");
    for (double mm : ms)
        if (!(mm > 0.0)) throw ConfigError("sweep.ms must be positive");
    if (n_paths == 0) throw ConfigError("sweep.n_paths must be positive");
    if (cadence == 0) throw ConfigError("outputs.cadence must be positive");
    if (eta.kind != "none" && eta.kind != "bump" && eta.kind != "mode")
        throw ConfigError("run.eta.kind must be one of none | bump | mode");
    if (eta.kind == "mode" && (eta.k == 0 || eta.k > K))
        throw ConfigError("run.eta.k must lie in [1, noise.K]");
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "model.nu=" << nu << ";model.b=" << b << ";model.a=" << a
       << ";model.solve_bvp=" << solve_bvp << ";grid.L=" << L << ";grid.n=" << n
       << ";noise.K=" << K << ";noise.sigma=" << sigma << ";noise.r=" << r
       << ";run.epsilon=" << epsilon << ";run.m=" << m << ";run.T=" << T
       << ";run.dt=" << dt << ";run.q_exp=" << q_exp << ";run.eta.kind=" << eta.kind
       << ";run.eta.amplitude=" << eta.amplitude << ";run.eta.center=" << eta.center
       << ";run.eta.width=" << eta.width << ";run.eta.k=" << eta.k
       << ";sweep.epsilons=";
    for (double e : epsilons) os << e << ",";
    os << ";sweep.ms=";
    for (double mm : ms) os << mm << ",";
    os << ";sweep.n_paths=" << n_paths << ";sweep.master_seed=" << master_seed
       << ";outputs.cadence=" << cadence << ";outputs.store_fields=" << store_fields
       << ";outputs.maintain_projection=" << maintain_projection;
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SpatialGrid ExperimentConfig::make_grid() const { return SpatialGrid(L, n); }

ReactionFunction ExperimentConfig::make_reaction() const { return nagumo(a); }

WaveProfile ExperimentConfig::make_profile() const {
    const SpatialGrid grid = make_grid();
    if (solve_bvp) return solve_profile_bvp(make_reaction(), nu, b, grid);
    return nagumo_profile(nu, b, a, grid);
}

NoiseModel ExperimentConfig::make_noise() const {
    return build_noise(make_grid(), K, sigma, r);
}

GridVector ExperimentConfig::make_eta(const SpatialGrid& grid) const {
    GridVector h;
    if (eta.kind == "none" || eta.amplitude == 0.0) return h;
    h.assign(grid.size(), 0.0);
    if (eta.kind == "bump") {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double z = (grid.x(i) - eta.center) / eta.width;
            h[i] = eta.amplitude * std::exp(-z * z);
        }
    } else { // mode
        const double L_half = grid.half_width();
        const double freq = static_cast<double>(eta.k) * M_PI / (2.0 * L_half);
        for (std::size_t i = 0; i < grid.size(); ++i)
            h[i] = eta.amplitude * std::sin(freq * (grid.x(i) + L_half)) /
                   std::sqrt(L_half);
    }
    h.front() = 0.0;
    h.back() = 0.0;
    return h;
}

ModelParams ExperimentConfig::make_params(const SpatialGrid& grid) const {
    ModelParams p;
    p.epsilon = epsilon;
    p.m = m;
    p.T = T;
    p.dt = dt;
    p.q_exp = q_exp;
    p.eta = make_eta(grid);
    return p;
}

RunOptions ExperimentConfig::make_run_options() const {
    RunOptions o;
    o.n_outputs = cadence;
    o.store_fields = store_fields;
    o.maintain_projection = maintain_projection;
    return o;
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");

    ExperimentConfig cfg;
    const json& model = require_section(root, "model", "model.nu, model.b, model.a");
    cfg.nu = get_number(model, "model", "nu", cfg.nu);
    cfg.b = get_number(model, "model", "b", cfg.b);
    cfg.a = get_number(model, "model", "a", cfg.a);
    cfg.solve_bvp = get_flag(model, "model", "solve_bvp", cfg.solve_bvp);

    const json& grid = require_section(root, "grid", "grid.L, grid.n");
    cfg.L = get_number(grid, "grid", "L", cfg.L, true);
    cfg.n = get_index(grid, "grid", "n", cfg.n);

    const json& noise = require_section(root, "noise", "noise.K, noise.sigma, noise.r");
    cfg.K = get_index(noise, "noise", "K", cfg.K);
    cfg.sigma = get_number(noise, "noise", "sigma", cfg.sigma);
    cfg.r = get_number(noise, "noise", "r", cfg.r);

    const json& run = require_section(root, "run", "run.epsilon, run.T, run.dt");
    cfg.epsilon = get_number(run, "run", "epsilon", cfg.epsilon);
    cfg.m = get_number(run, "run", "m", cfg.m);
    cfg.T = get_number(run, "run", "T", cfg.T);
    cfg.dt = get_number(run, "run", "dt", cfg.dt);
    cfg.q_exp = get_number(run, "run", "q_exp", cfg.q_exp);
    if (run.contains("eta")) {
        const json& eta = run.at("eta");
        if (!eta.is_object()) throw ConfigError("expected an object at run.eta");
        if (eta.contains("kind")) {
            if (!eta.at("kind").is_string())
                throw ConfigError("expected a string at run.eta.kind");
            cfg.eta.kind = eta.at("kind").get<std::string>();
        }
        cfg.eta.amplitude = get_number(eta, "run.eta", "amplitude", cfg.eta.amplitude);
        cfg.eta.center = get_number(eta, "run.eta", "center", cfg.eta.center);
        cfg.eta.width = get_number(eta, "run.eta", "width", cfg.eta.width);
        cfg.eta.k = get_index(eta, "run.eta", "k", cfg.eta.k);
    }

    if (root.contains("sweep")) {
        const json& sweep = require_section(root, "sweep", "sweep.epsilons");
        if (sweep.contains("epsilons")) {
            if (!sweep.at("epsilons").is_array())
                throw ConfigError("expected an array at sweep.epsilons");
            cfg.epsilons = sweep.at("epsilons").get<std::vector<double>>();
        }
        if (sweep.contains("ms")) {
            if (!sweep.at("ms").is_array())
                throw ConfigError("expected an array at sweep.ms");
            cfg.ms = sweep.at("ms").get<std::vector<double>>();
        }
        cfg.n_paths = get_index(sweep, "sweep", "n_paths", cfg.n_paths);
        if (sweep.contains("master_seed")) {
            if (!sweep.at("master_seed").is_number_unsigned())
                throw ConfigError("expected a non-negative integer at sweep.master_seed");
            cfg.master_seed = sweep.at("master_seed").get<std::uint64_t>();
        }
    }

    if (root.contains("outputs")) {
        const json& outputs = require_section(root, "outputs", "outputs.cadence");
        cfg.cadence = get_index(outputs, "outputs", "cadence", cfg.cadence);
        if (outputs.contains("directory")) {
            if (!outputs.at("directory").is_string())
                throw ConfigError("expected a string at outputs.directory");
            cfg.directory = outputs.at("directory").get<std::string>();
        }
        cfg.store_fields = get_flag(outputs, "outputs", "store_fields", cfg.store_fields);
        cfg.maintain_projection =
            get_flag(outputs, "outputs", "maintain_projection", cfg.maintain_projection);
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace stw
