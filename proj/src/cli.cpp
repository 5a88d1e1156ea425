#include "stw/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "stw/analysis.hpp"
#include "stw/config.hpp"
#include "stw/dynamics.hpp"
#include "stw/rng.hpp"
#include "stw/tridiag.hpp"

namespace stw {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hash_string(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

/// Kernel identity residuals on a grid with n_points nodes at the config's
/// half-width.
std::pair<double, double> kernel_residuals(const ExperimentConfig& cfg,
                                           std::size_t n_points) {
    SpatialGrid g(cfg.L, n_points);
    WaveProfile profile = cfg.solve_bvp
                              ? solve_profile_bvp(cfg.make_reaction(), cfg.nu, cfg.b, g)
                              : nagumo_profile(cfg.nu, cfg.b, cfg.a, g);
    return kernel_identity_residuals(profile, cfg.make_reaction());
}

GridVector random_orthogonal_state(const SpatialGrid& g, std::uint64_t seed,
                                   std::uint64_t index) {
    GridVector h(g.size(), 0.0);
    const double L = g.half_width();
    for (std::uint64_t k = 1; k <= 10; ++k) {
        const double coef = rng::standard_normal(seed, index, k, 0);
        const double freq = static_cast<double>(k) * M_PI / (2.0 * L);
        for (std::size_t i = 0; i < g.size(); ++i)
            h[i] += coef * std::sin(freq * (g.x(i) + L));
    }
    h.front() = 0.0;
    h.back() = 0.0;
    return h;
}

json stopping_to_json(const StoppingFlags& s) {
    return json{{"stopped_q", s.stopped_q}, {"stopped_m", s.stopped_m},
                {"stopped_inf", s.stopped_inf}, {"t_q", s.t_q},
                {"t_m", s.t_m}, {"t_inf", s.t_inf}};
}

std::string snapshots_csv(const ExperimentConfig& cfg, const PathTrajectory& traj,
                          std::uint64_t seed) {
    std::ostringstream os;
    os.precision(17);
    os << "# config_hash=" << hash_string(cfg.hash()) << " seed=" << seed << "\n";
    os << "t,Cm,c0m,C0m,C0,u_h1w,u_rho\n";
    for (const auto& s : traj.snapshots)
        os << s.t << "," << s.Cm << "," << s.c0m << "," << s.C0m << "," << s.C0
           << "," << s.u_h1w << "," << s.u_rho << "\n";
    return os.str();
}

int cmd_profile(const ExperimentConfig& cfg, const fs::path& out_dir) {
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const auto gap = spectral_gap(profile, f);
    const auto [res_l, res_adj] = kernel_residuals(cfg, cfg.n);

    std::ostringstream csv;
    csv.precision(17);
    csv << "# config_hash=" << hash_string(cfg.hash()) << "\n";
    csv << "# c=" << profile.c() << "\n";
    profile.export_csv(csv);
    write_text(out_dir / "profile.csv", csv.str());

    json report{{"config_hash", hash_string(cfg.hash())},
                {"c", profile.c()},
                {"Z", profile.Z()},
                {"gamma_minus", profile.gamma_minus()},
                {"gamma_plus", profile.gamma_plus()},
                {"kernel_residual_rho", res_l},
                {"adjoint_residual_l2", res_adj},
                {"kappa_hat", gap.kappa_hat},
                {"kernel_rayleigh", gap.kernel_rayleigh},
                {"rho_constant", profile.c() == 0.0}};
    write_text(out_dir / "profile.json", report.dump(2) + "\n");
    std::cout << "profile written to " << out_dir.string() << " (c=" << profile.c()
              << ", kappa_hat=" << gap.kappa_hat << ")\n";
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, std::uint64_t seed,
                 const fs::path& out_dir) {
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const NoiseModel noise = cfg.make_noise();
    const ModelParams params = cfg.make_params(profile.grid());
    PathRunner runner(profile, f, noise, params, cfg.make_run_options());

    json summary{{"config_hash", hash_string(cfg.hash())}, {"seed", seed}};
    try {
        const auto traj = runner.run({cfg.master_seed, seed});
        write_text(out_dir / "snapshots.csv", snapshots_csv(cfg, traj, seed));
        double sup_u = 0.0;
        for (const auto& s : traj.snapshots) sup_u = std::max(sup_u, s.u_h1w);
        summary["sup_u_h1w"] = sup_u;
        summary["energy_sup"] = traj.energy_sup;
        summary["energy_int"] = traj.energy_int;
        summary["stopping"] = stopping_to_json(traj.stopping);
        summary["blow_up"] = false;
        write_text(out_dir / "summary.json", summary.dump(2) + "\n");
        std::cout << "simulated " << traj.snapshots.size() << " snapshots, sup||u||="
                  << sup_u << "\n";
        return 0;
    } catch (const BlowUpError& err) {
        summary["blow_up"] = true;
        summary["blow_up_step"] = err.step;
        summary["error"] = err.what();
        write_text(out_dir / "summary.json", summary.dump(2) + "\n");
        std::cerr << "blow-up at step " << err.step << ": " << err.what() << "\n";
        return 3;
    }
}

json sweep_report_to_json(const ExperimentConfig& cfg, const ScalingReport& report) {
    return json{{"config_hash", hash_string(cfg.hash())},
                {"master_seed", cfg.master_seed},
                {"epsilons", report.epsilons},
                {"residual_norms", report.residual_norms},
                {"stop_fractions", report.stop_fractions},
                {"path_slopes", report.path_slopes},
                {"slope_median", report.slope_median},
                {"slope_iqr", report.slope_iqr},
                {"q_exp", report.q_exp},
                {"theory_slope", 2.0 - 2.0 * report.q_exp}};
}

int cmd_sweep(const ExperimentConfig& cfg, std::size_t n_paths, unsigned threads,
              const fs::path& out_dir) {
    if (cfg.epsilons.size() < 3)
        throw ConfigError("sweep.epsilons must list at least 3 values");
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const NoiseModel noise = cfg.make_noise();
    const ModelParams base = cfg.make_params(profile.grid());
    const auto report = scaling_study(profile, f, noise, base, cfg.epsilons, n_paths,
                                      cfg.master_seed, false, threads);
    write_text(out_dir / "sweep.json", sweep_report_to_json(cfg, report).dump(2) + "\n");

    std::ostringstream csv;
    csv.precision(17);
    csv << "# config_hash=" << hash_string(cfg.hash()) << "\n";
    csv << "epsilon,path,residual_norm,stop_fraction\n";
    for (std::size_t e = 0; e < report.epsilons.size(); ++e)
        for (std::size_t p = 0; p < n_paths; ++p)
            csv << report.epsilons[e] << "," << p << ","
                << report.residual_norms[e][p] << "," << report.stop_fractions[e]
                << "\n";
    write_text(out_dir / "sweep.csv", csv.str());
    std::cout << "sweep slope median " << report.slope_median << " over "
              << n_paths << " paths\n";
    return 0;
}

// ---- verify claims ------------------------------------------------------

json verify_speed(const ExperimentConfig& cfg) {
    const WaveProfile profile = cfg.make_profile();
    const double measured =
        measure_front_speed(profile, cfg.make_reaction(), cfg.T, cfg.dt);
    const double rel = std::abs(measured - profile.c()) /
                       std::max(std::abs(profile.c()), 1e-12);
    return json{{"statement", "level-set front speed matches the travelling-wave speed"},
                {"measured_speed", measured},
                {"expected_speed", profile.c()},
                {"relative_error", rel},
                {"threshold", 0.01},
                {"passed", rel <= 0.01}};
}

json verify_kernel(const ExperimentConfig& cfg) {
    const auto coarse = kernel_residuals(cfg, cfg.n);
    const auto fine = kernel_residuals(cfg, 2 * cfg.n - 1);
    const double ratio_l = coarse.first / fine.first;
    const double ratio_adj = coarse.second / fine.second;
    const bool ok = ratio_l >= 3.2 && ratio_l <= 4.8 && ratio_adj >= 3.2 &&
                    ratio_adj <= 4.8;
    return json{{"statement", "discrete kernel identities converge at second order"},
                {"residual_coarse", {coarse.first, coarse.second}},
                {"residual_fine", {fine.first, fine.second}},
                {"ratios", {ratio_l, ratio_adj}},
                {"threshold", "ratios in [3.2, 4.8]"},
                {"passed", ok}};
}

json verify_contraction(const ExperimentConfig& cfg, std::uint64_t seed) {
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const auto gap = spectral_gap(profile, f);
    bool all = gap.gap_positive;
    double worst_rate = 1e300;
    for (std::uint64_t j = 0; j < 10; ++j) {
        const auto init = random_orthogonal_state(profile.grid(), seed, j);
        const auto rep =
            contraction_check(profile, f, gap.kappa_hat, init, cfg.T, cfg.dt);
        all = all && rep.passed;
        worst_rate = std::min(worst_rate, rep.fitted_rate);
    }
    return json{{"statement", "projected linearized flow contracts at the spectral gap"},
                {"kappa_hat", gap.kappa_hat},
                {"kernel_rayleigh", gap.kernel_rayleigh},
                {"worst_fitted_rate", worst_rate},
                {"threshold", "norms below 1.05 exp(-kappa t) for 10 random states"},
                {"passed", all}};
}

json verify_scaling(const ExperimentConfig& cfg, std::size_t n_paths,
                    unsigned threads) {
    if (cfg.epsilons.size() < 3)
        throw ConfigError("sweep.epsilons must list at least 3 values");
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const NoiseModel noise = cfg.make_noise();
    const ModelParams base = cfg.make_params(profile.grid());
    const auto report = scaling_study(profile, f, noise, base, cfg.epsilons, n_paths,
                                      cfg.master_seed, false, threads);
    const double target = 1.6;
    bool stops_ok = true;
    for (std::size_t e = 0; e + 1 < report.stop_fractions.size(); ++e)
        if (report.stop_fractions[e + 1] > report.stop_fractions[e] + 1e-12)
            stops_ok = false;
    const bool ok = report.slope_median >= target && stops_ok &&
                    report.stop_fractions.back() <= 0.05;
    json out = sweep_report_to_json(cfg, report);
    out["statement"] = "decomposition residual scales super-linearly in epsilon";
    out["threshold"] = target;
    out["passed"] = ok;
    return out;
}

json verify_variance(const ExperimentConfig& cfg, std::size_t n_paths,
                     unsigned threads) {
    const WaveProfile profile = cfg.make_profile();
    const NoiseModel noise = cfg.make_noise();
    json out{{"statement", "phase variance grows linearly at the covariance rate"}};
    if (n_paths < 16) {
        out["verdict"] = "insufficient statistical power";
        out["n_paths"] = n_paths;
        out["passed"] = false;
        return out;
    }
    const auto rep = variance_law(profile, noise, cfg.T, cfg.dt, n_paths,
                                  cfg.master_seed, 50, threads);
    const double dev = std::abs(rep.fitted_slope - rep.static_slope);
    out["fitted_slope"] = rep.fitted_slope;
    out["slope_se"] = rep.slope_se;
    out["static_slope"] = rep.static_slope;
    out["max_gap_exact_static"] = rep.max_gap_exact_static;
    out["n_paths"] = n_paths;
    out["threshold"] = "within 3 standard errors";
    out["passed"] = dev <= 3.0 * rep.slope_se;
    return out;
}

json verify_moment(const ExperimentConfig& cfg, std::size_t n_paths,
                   unsigned threads) {
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const NoiseModel noise = cfg.make_noise();
    const auto gap = spectral_gap(profile, f);
    const auto eta = cfg.make_eta(profile.grid());
    const auto rep =
        second_moment_bound(profile, f, noise, gap.kappa_hat, eta, cfg.T, cfg.dt,
                            n_paths, cfg.master_seed, 50, threads);
    return json{{"statement", "frozen-frame second moment obeys the semigroup bound"},
                {"kappa_hat", gap.kappa_hat},
                {"hs_weighted", rep.hs_weighted},
                {"final_mean_sq", rep.mean_sq_norm.back()},
                {"final_bound", rep.bound.back()},
                {"first_violation_t", rep.first_violation_t},
                {"passed", rep.passed}};
}

json verify_ortho(const ExperimentConfig& cfg, std::uint64_t seed) {
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const NoiseModel noise = cfg.make_noise();
    const ModelParams params = cfg.make_params(profile.grid());
    RunOptions opts = cfg.make_run_options();
    opts.store_fields = true;
    PathRunner runner(profile, f, noise, params, opts);
    const auto traj = runner.run({cfg.master_seed, seed});
    const double worst = orthogonality_check(traj, profile);
    return json{{"statement", "fluctuation stays orthogonal to the moving kernel"},
                {"max_ratio", worst},
                {"maintain_projection", cfg.maintain_projection},
                {"threshold", 1e-8},
                {"passed", worst <= 1e-8}};
}

json verify_minimise(const ExperimentConfig& cfg, std::uint64_t seed) {
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const NoiseModel noise = cfg.make_noise();
    const ModelParams params = cfg.make_params(profile.grid());
    RunOptions opts = cfg.make_run_options();
    opts.store_fields = true;
    PathRunner runner(profile, f, noise, params, opts);
    const auto traj = runner.run({cfg.master_seed, seed});
    const auto res = minimisation_check(traj, profile, params, cfg.T / 2.0);
    const double rel =
        std::abs(res.second_deriv_over_eps2 - res.reference_second) /
        res.reference_second;
    return json{{"statement", "fitted phase is a local minimum of the weighted distance"},
                {"first_deriv_over_eps2", res.first_deriv_over_eps2},
                {"second_deriv_over_eps2", res.second_deriv_over_eps2},
                {"reference_second", res.reference_second},
                {"relative_error", rel},
                {"threshold", 0.1},
                {"passed", rel <= 0.1}};
}

json verify_relaxation(const ExperimentConfig& cfg, std::uint64_t seed) {
    const WaveProfile profile = cfg.make_profile();
    const ReactionFunction f = cfg.make_reaction();
    const NoiseModel noise = cfg.make_noise();
    std::vector<double> ms = cfg.ms;
    if (ms.empty()) ms = {1.0, 10.0, 100.0, 1000.0};
    const double delta = 0.5;

    RunOptions opts = cfg.make_run_options();
    opts.store_fields = false;
    std::vector<double> gaps;
    double sup_c0 = 0.0;
    for (double mm : ms) {
        ModelParams params = cfg.make_params(profile.grid());
        params.m = mm;
        PathRunner runner(profile, f, noise, params, opts);
        const auto traj = runner.run({cfg.master_seed, seed});
        double gap = 0.0;
        for (const auto& s : traj.snapshots) {
            if (s.t < delta) continue;
            gap = std::max(gap, std::abs(s.C0m - s.C0));
            sup_c0 = std::max(sup_c0, std::abs(s.C0));
        }
        gaps.push_back(gap);
    }
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
        if (!(gaps[i + 1] < gaps[i])) decreasing = false;
    const bool small = sup_c0 > 0.0 && gaps.back() <= 0.05 * sup_c0;
    return json{{"statement", "finite-rate phase converges to the immediate phase"},
                {"ms", ms},
                {"gaps", gaps},
                {"sup_C0", sup_c0},
                {"threshold", "strictly decreasing, final below 5% of sup |C0|"},
                {"passed", decreasing && small}};
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& claim,
               std::uint64_t seed, std::size_t n_paths, unsigned threads,
               const fs::path& out_dir) {
    json verdict;
    if (claim == "speed") verdict = verify_speed(cfg);
    else if (claim == "kernel") verdict = verify_kernel(cfg);
    else if (claim == "contraction") verdict = verify_contraction(cfg, seed);
    else if (claim == "scaling") verdict = verify_scaling(cfg, n_paths, threads);
    else if (claim == "variance") verdict = verify_variance(cfg, n_paths, threads);
    else if (claim == "moment") verdict = verify_moment(cfg, n_paths, threads);
    else if (claim == "ortho") verdict = verify_ortho(cfg, seed);
    else if (claim == "minimise") verdict = verify_minimise(cfg, seed);
    else if (claim == "relaxation") verdict = verify_relaxation(cfg, seed);
    else throw ConfigError("unknown claim: " + claim);

    verdict["claim"] = claim;
    verdict["config_hash"] = hash_string(cfg.hash());
    verdict["seed"] = seed;

    const fs::path file = out_dir / ("verify_" + claim + ".json");
    if (fs::exists(file)) {
        // never silently compare or overwrite a verdict from another setup
        std::ifstream in(file);
        json previous;
        try {
            in >> previous;
        } catch (...) {
            previous = json::object();
        }
        if (previous.contains("config_hash") &&
            previous["config_hash"] != verdict["config_hash"])
            throw ConfigError("existing " + file.string() +
                              " was produced by a different config hash; refusing");
    }
    write_text(file, verdict.dump(2) + "\n");
    const bool passed = verdict.value("passed", false);
    std::cout << "claim " << claim << ": " << (passed ? "pass" : "fail") << "\n";
    return passed ? 0 : 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"numerical laboratory for stochastic bistable travelling waves"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", claim;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    unsigned threads = 0;

    auto* p_profile = app.add_subcommand("profile", "construct the travelling wave");
    auto* p_simulate = app.add_subcommand("simulate", "run one stochastic path");
    auto* p_sweep = app.add_subcommand("sweep", "epsilon sweep of the residual");
    auto* p_verify = app.add_subcommand("verify", "check one quantitative claim");
    for (auto* sub : {p_profile, p_simulate, p_sweep, p_verify}) {
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
    }
    p_simulate->add_option("--seed", seed, "path index under the master seed");
    p_verify->add_option("--seed", seed, "path index under the master seed");
    p_sweep->add_option("--paths", n_paths, "Monte Carlo paths");
    p_verify->add_option("--paths", n_paths, "Monte Carlo paths");
    p_verify->add_option("--claim", claim, "claim name")->required();

    try {
        std::vector<const char*> argv{"wavelab"};
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()),
                  const_cast<char**>(argv.data()));
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        const ExperimentConfig cfg = load_config(config_path);
        if (n_paths == 0) n_paths = cfg.n_paths;
        if (p_profile->parsed()) return cmd_profile(cfg, out_dir);
        if (p_simulate->parsed()) return cmd_simulate(cfg, seed, out_dir);
        if (p_sweep->parsed()) return cmd_sweep(cfg, n_paths, threads, out_dir);
        return cmd_verify(cfg, claim, seed, n_paths, threads, out_dir);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const BlowUpError& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 3;
    } catch (const WindowError& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 3;
    } catch (const DomainError& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 3;
    } catch (const SolverError& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    }
}

} // namespace stw
