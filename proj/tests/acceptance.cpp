// Acceptance suite: one quantitative check per numbered criterion, one
// pass/fail line each. Exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "stw/analysis.hpp"
#include "stw/cli.hpp"
#include "stw/config.hpp"
#include "stw/dynamics.hpp"
#include "stw/rng.hpp"

using namespace stw;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const char* name, bool passed, const std::string& detail) {
    std::cout << "criterion " << number << " (" << name << "): "
              << (passed ? "PASS" : "FAIL") << " -- " << detail << std::endl;
    if (!passed) ++failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

GridVector bump(const SpatialGrid& g, double amp, double center, double width) {
    GridVector h(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double z = (g.x(i) - center) / width;
        h[i] = amp * std::exp(-z * z);
    }
    h.front() = 0.0;
    h.back() = 0.0;
    return h;
}

GridVector random_orthogonal_state(const SpatialGrid& g, std::uint64_t index) {
    GridVector h(g.size(), 0.0);
    const double L = g.half_width();
    for (std::uint64_t k = 1; k <= 10; ++k) {
        const double coef = rng::standard_normal(2026, index, k, 0);
        const double freq = static_cast<double>(k) * M_PI / (2.0 * L);
        for (std::size_t i = 0; i < g.size(); ++i)
            h[i] += coef * std::sin(freq * (g.x(i) + L));
    }
    h.front() = 0.0;
    h.back() = 0.0;
    return h;
}

void criterion_1() {
    SpatialGrid grid(40.0, 1601);
    const auto profile = nagumo_profile(1.0, 2.0, 0.25, grid);
    const double measured = measure_front_speed(profile, nagumo(0.25), 10.0, 1e-3);
    const double rel = std::abs(measured - 0.5) / 0.5;
    report(1, "wave speed", rel <= 0.01,
           "measured=" + fmt(measured) + " expected=0.5 rel_err=" + fmt(rel));
}

void criterion_2() {
    const ReactionFunction f = nagumo(0.25);
    const auto coarse =
        kernel_identity_residuals(nagumo_profile(1.0, 2.0, 0.25, {40.0, 801}), f);
    const auto fine =
        kernel_identity_residuals(nagumo_profile(1.0, 2.0, 0.25, {40.0, 1601}), f);
    const double r1 = coarse.first / fine.first;
    const double r2 = coarse.second / fine.second;
    const bool ok = r1 >= 3.2 && r1 <= 4.8 && r2 >= 3.2 && r2 <= 4.8;
    report(2, "kernel residuals", ok,
           "dx-halving ratios " + fmt(r1) + ", " + fmt(r2) + " target [3.2, 4.8]");
}

void criterion_3() {
    SpatialGrid grid(40.0, 1601);
    const ReactionFunction f = nagumo(0.25);
    const auto profile = nagumo_profile(1.0, 2.0, 0.25, grid);
    const auto gap = spectral_gap(profile, f);
    bool ok = gap.gap_positive;
    double worst_rate = 1e300;
    for (std::uint64_t j = 0; j < 10; ++j) {
        const auto rep = contraction_check(profile, f, gap.kappa_hat,
                                           random_orthogonal_state(grid, j), 10.0,
                                           1e-3);
        ok = ok && rep.passed;
        worst_rate = std::min(worst_rate, rep.fitted_rate);
    }
    report(3, "spectral gap / contraction", ok,
           "kappa_hat=" + fmt(gap.kappa_hat) + " worst fitted rate=" +
               fmt(worst_rate) + " over 10 states");
}

// shared between criteria 4 and 6
struct SweepSetup {
    SpatialGrid grid{24.0, 1921};
    ReactionFunction f = nagumo(0.25);
    WaveProfile profile = nagumo_profile(1.0, 2.0, 0.25, grid);
    NoiseModel noise = build_noise(grid, 64, 2e-4, 2.0);
    std::vector<double> epsilons{0.02, 0.01, 0.005, 0.0025};
    ModelParams base;
    SweepSetup() {
        base.m = 100.0;
        base.T = 5.0;
        base.dt = 5e-4;
        base.q_exp = 0.1;
    }
};

double criterion_4(SweepSetup& s) {
    const auto rep =
        scaling_study(s.profile, s.f, s.noise, s.base, s.epsilons, 32, 42);
    bool stops_ok = true;
    for (std::size_t e = 0; e + 1 < rep.stop_fractions.size(); ++e)
        if (rep.stop_fractions[e + 1] > rep.stop_fractions[e] + 1e-12)
            stops_ok = false;
    const bool ok = rep.slope_median >= 1.6 && stops_ok &&
                    rep.stop_fractions.back() <= 0.05;
    report(4, "residual scaling", ok,
           "median slope=" + fmt(rep.slope_median) + " (target >= 1.6), final stop fraction=" +
               fmt(rep.stop_fractions.back()));
    return rep.slope_median;
}

void criterion_5() {
    SpatialGrid grid(24.0, 961);
    const ReactionFunction f = nagumo(0.25);
    const auto profile = nagumo_profile(1.0, 2.0, 0.25, grid);
    const auto noise = build_noise(grid, 64, 2e-4, 2.0);
    RunOptions opts;
    opts.store_fields = false;
    std::vector<double> gaps;
    double sup_c0 = 0.0;
    for (double m : {1.0, 10.0, 100.0, 1000.0}) {
        ModelParams params;
        params.epsilon = 0.01;
        params.m = m;
        params.T = 5.0;
        params.dt = 5e-4;
        PathRunner runner(profile, f, noise, params, opts);
        const auto traj = runner.run({42, 0});
        double gap = 0.0;
        for (const auto& snap : traj.snapshots) {
            if (snap.t < 0.5) continue;
            gap = std::max(gap, std::abs(snap.C0m - snap.C0));
            sup_c0 = std::max(sup_c0, std::abs(snap.C0));
        }
        gaps.push_back(gap);
    }
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
        if (!(gaps[i + 1] < gaps[i])) decreasing = false;
    const bool small = sup_c0 > 0.0 && gaps.back() <= 0.05 * sup_c0;
    report(5, "phase relaxation", decreasing && small,
           "gaps " + fmt(gaps[0]) + " > " + fmt(gaps[1]) + " > " + fmt(gaps[2]) +
               " > " + fmt(gaps[3]) + ", final/sup|C0|=" +
               fmt(gaps.back() / sup_c0));
}

void criterion_6(SweepSetup& s, double finite_m_slope) {
    ModelParams base = s.base;
    base.m = 1000.0;
    const auto rep =
        scaling_study(s.profile, s.f, s.noise, base, s.epsilons, 32, 42, true);
    const double diff = std::abs(rep.slope_median - finite_m_slope);
    report(6, "limit decomposition", diff <= 0.1,
           "immediate slope=" + fmt(rep.slope_median) + " finite-m slope=" +
               fmt(finite_m_slope) + " |diff|=" + fmt(diff));
}

void criterion_7() {
    SpatialGrid grid(20.0, 801);
    const auto profile = nagumo_profile(1.0, 2.0, 0.5, grid); // standing wave
    const auto noise = build_noise(grid, 64, 0.1, 2.0);
    const auto rep = variance_law(profile, noise, 5.0, 1e-3, 500, 7);
    const double dev = std::abs(rep.fitted_slope - rep.static_slope);
    report(7, "variance law", dev <= 3.0 * rep.slope_se,
           "slope=" + fmt(rep.fitted_slope) + " predicted=" + fmt(rep.static_slope) +
               " deviation=" + fmt(dev) + " (3 SE = " + fmt(3.0 * rep.slope_se) + ")");
}

void criterion_8() {
    SpatialGrid grid(20.0, 801);
    const ReactionFunction f = nagumo(0.25);
    const auto profile = nagumo_profile(1.0, 2.0, 0.25, grid);
    const auto noise = build_noise(grid, 64, 0.1, 2.0);
    const auto gap = spectral_gap(profile, f);
    const auto eta = bump(grid, 0.05, 5.0, 2.0);
    const auto rep =
        second_moment_bound(profile, f, noise, gap.kappa_hat, eta, 10.0, 2e-3, 500, 17);
    report(8, "second-moment bound", rep.passed,
           "final mean=" + fmt(rep.mean_sq_norm.back()) + " bound=" +
               fmt(rep.bound.back()) +
               (rep.passed ? "" : " first violation t=" + fmt(rep.first_violation_t)));
}

void criterion_9() {
    SpatialGrid grid(24.0, 961);
    const ReactionFunction f = nagumo(0.25);
    const auto profile = nagumo_profile(1.0, 2.0, 0.25, grid);
    const auto noise = build_noise(grid, 64, 2e-4, 2.0);

    ModelParams params;
    params.epsilon = 0.01;
    params.T = 2.0;
    params.dt = 1e-3;
    RunOptions opts;
    opts.n_outputs = 20;
    PathRunner maintained(profile, f, noise, params, opts);
    const double kept = orthogonality_check(maintained.run({42, 0}), profile);

    // deterministic drift study: no noise, nonzero initial shape, no upkeep
    const auto quiet = build_noise(grid, 64, 0.0, 2.0);
    ModelParams det = params;
    det.eta = bump(grid, 0.5, 0.0, 2.0);
    RunOptions drift_opts = opts;
    drift_opts.maintain_projection = false;
    auto drift_at = [&](double dt) {
        ModelParams p = det;
        p.dt = dt;
        PathRunner runner(profile, f, quiet, p, drift_opts);
        return orthogonality_check(runner.run({42, 0}), profile);
    };
    const double coarse = drift_at(2e-3), fine = drift_at(1e-3);
    const double ratio = coarse / fine;
    const bool ok = kept <= 1e-8 && ratio >= 1.5 && ratio <= 3.0;
    report(9, "orthogonality", ok,
           "maintained max ratio=" + fmt(kept) + " (<= 1e-8), dt-halving drift ratio=" +
               fmt(ratio) + " target [1.5, 3]");
}

void criterion_10() {
    SpatialGrid grid(24.0, 961);
    const ReactionFunction f = nagumo(0.25);
    const auto profile = nagumo_profile(1.0, 2.0, 0.25, grid);
    const auto noise = build_noise(grid, 64, 2e-4, 2.0);
    RunOptions opts;
    std::vector<double> firsts;
    double second_rel = 1e300;
    for (double eps : {0.02, 0.01, 0.005}) {
        ModelParams params;
        params.epsilon = eps;
        params.T = 5.0;
        params.dt = 1e-3;
        PathRunner runner(profile, f, noise, params, opts);
        const auto traj = runner.run({42, 0});
        const auto res = minimisation_check(traj, profile, params, 2.5);
        firsts.push_back(std::abs(res.first_deriv_over_eps2));
        if (eps == 0.005)
            second_rel = std::abs(res.second_deriv_over_eps2 - res.reference_second) /
                         res.reference_second;
    }
    const bool monotone = firsts[1] < firsts[0] && firsts[2] < firsts[1];
    const bool ok = monotone && second_rel <= 0.1;
    report(10, "minimisation", ok,
           "|d/da|/eps^2 " + fmt(firsts[0]) + " > " + fmt(firsts[1]) + " > " +
               fmt(firsts[2]) + ", curvature rel err=" + fmt(second_rel) +
               " (<= 0.1)");
}

void criterion_11() {
    const fs::path dir = fs::temp_directory_path() / "wavelab_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << R"({
        "model": {"nu": 1.0, "b": 2.0, "a": 0.25},
        "grid": {"L": 22.0, "n": 441},
        "noise": {"K": 32, "sigma": 1e-4, "r": 2.0},
        "run": {"epsilon": 0.01, "m": 100.0, "T": 2.0, "dt": 1e-3, "q_exp": 0.1},
        "outputs": {"cadence": 20}
    })";
    auto run_once = [&](const char* sub) {
        const fs::path out = dir / sub;
        const int code = run_cli({"verify", "--config", cfg.string(), "--claim",
                                  "kernel", "--out", out.string()});
        std::ostringstream os;
        os << std::ifstream(out / "verify_kernel.json").rdbuf();
        return std::make_pair(code, os.str());
    };
    const auto first = run_once("a");
    const auto second = run_once("b");
    const bool ok = first.first == 0 && second.first == 0 &&
                    !first.second.empty() && first.second == second.second;
    fs::remove_all(dir);
    report(11, "determinism", ok,
           ok ? "repeated verify reports are byte-identical"
              : "reports differ or verification failed");
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    SweepSetup sweep;
    const double slope4 = criterion_4(sweep);
    criterion_5();
    criterion_6(sweep, slope4);
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    return failures == 0 ? 0 : 1;
}
