#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stw/dynamics.hpp"

using namespace stw;

namespace {

struct Lab {
    SpatialGrid grid;
    WaveProfile profile;
    ReactionFunction f;

    explicit Lab(double L = 20.0, std::size_t n = 401, double a = 0.25)
        : grid(L, n), profile(nagumo_profile(1.0, 2.0, a, grid)), f(nagumo(a)) {}
};

GridVector bump(const SpatialGrid& g, double amp, double width = 4.0) {
    GridVector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = amp * std::exp(-g.x(i) * g.x(i) / width);
    out.front() = 0.0;
    out.back() = 0.0;
    return out;
}

} // namespace

TEST_CASE("flat trajectory: no noise, no perturbation") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    ModelParams p;
    p.epsilon = 0.0;
    p.T = 1.0;
    p.dt = 1e-2;
    PathRunner runner(lab.profile, lab.f, noise, p);
    const auto traj = runner.run({1, 0});
    for (const auto& snap : traj.snapshots) {
        CHECK(snap.u_h1w == 0.0);
        CHECK(snap.Cm == 0.0);
        CHECK(snap.c0m == 0.0);
        CHECK(snap.C0 == 0.0);
        for (double v : snap.u0m) CHECK(v == 0.0);
        for (double v : snap.u0) CHECK(v == 0.0);
    }
    CHECK(traj.energy_sup == 0.0);
    CHECK_FALSE(traj.stopping.any());
}

TEST_CASE("determinism: same seed gives bit-identical trajectories") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.1, 2.0);
    ModelParams p;
    p.epsilon = 0.01;
    p.T = 0.5;
    p.dt = 1e-3;
    PathRunner runner(lab.profile, lab.f, noise, p);
    const auto t1 = runner.run({77, 3});
    const auto t2 = runner.run({77, 3});
    REQUIRE(t1.snapshots.size() == t2.snapshots.size());
    for (std::size_t i = 0; i < t1.snapshots.size(); ++i) {
        CHECK(t1.snapshots[i].u_h1w == t2.snapshots[i].u_h1w);
        CHECK(t1.snapshots[i].C0 == t2.snapshots[i].C0);
        CHECK(t1.snapshots[i].Cm == t2.snapshots[i].Cm);
        for (std::size_t k = 0; k < t1.snapshots[i].u.size(); ++k)
            CHECK(t1.snapshots[i].u[k] == t2.snapshots[i].u[k]);
    }
    const auto t3 = runner.run({77, 4});
    CHECK(t1.snapshots.back().C0 != t3.snapshots.back().C0);
}

TEST_CASE("phase ODE: aligned state is a fixed point; linear response") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    ModelParams p;
    p.epsilon = 0.0;
    p.T = 1.0;
    p.dt = 1e-3;
    p.m = 1.0;
    PathRunner runner(lab.profile, lab.f, noise, p);

    auto s = runner.initial_state();
    const auto fr = lab.profile.frame(0.0);
    GridVector aligned(lab.grid.size(), 0.0);
    runner.step_phase_ode(s, fr, aligned);
    CHECK(s.Cm == 0.0);

    // v = vhat(.+delta): B(0,0) ~ delta, so one step moves Cm by ~ m dt delta
    const double delta = 1e-3;
    GridVector shifted(lab.grid.size());
    for (std::size_t i = 0; i < lab.grid.size(); ++i)
        shifted[i] = lab.profile.vhat_at(lab.grid.x(i) + delta) - fr.vhat[i];
    s = runner.initial_state();
    runner.step_phase_ode(s, fr, shifted);
    CHECK(s.Cm == doctest::Approx(p.dt * delta).epsilon(0.02));
}

TEST_CASE("phase ODE relaxes to the alignment shift") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    const double delta = 0.2;
    ModelParams p;
    p.epsilon = 1.0; // u = eta exactly; sigma = 0 keeps the path deterministic
    p.m = 10.0;
    p.T = 5.0;
    p.dt = 1e-3;
    p.eta.resize(lab.grid.size());
    for (std::size_t i = 0; i < lab.grid.size(); ++i)
        p.eta[i] = lab.profile.vhat_at(lab.grid.x(i) + delta) -
                   lab.profile.vhat_at(lab.grid.x(i));
    PathRunner runner(lab.profile, lab.f, noise, p);
    const auto traj = runner.run({5, 0});
    CHECK(std::abs(traj.snapshots.back().Cm - delta) <= 1e-3);
}

TEST_CASE("OU speed: zero-noise decay is exact, trapezoid integral accurate") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    ModelParams p;
    p.epsilon = 0.01;
    p.m = 4.0;
    p.T = 2.0;
    p.dt = 1e-3;
    p.eta = bump(lab.grid, 0.5);
    PathRunner runner(lab.profile, lab.f, noise, p);
    const double c0 = p.m * inner_dx(lab.grid, p.eta, lab.profile.psi());
    const auto traj = runner.run({3, 1});
    for (const auto& snap : traj.snapshots) {
        CHECK(snap.c0m == doctest::Approx(c0 * std::exp(-p.m * snap.t)).epsilon(1e-10));
        const double exact_C0m = (c0 / p.m) * (1.0 - std::exp(-p.m * snap.t));
        CHECK(snap.C0m == doctest::Approx(exact_C0m).epsilon(1e-5));
    }
}

TEST_CASE("large m*dt: OU increments approach the immediate phase increments") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.5, 2.0);
    ModelParams p;
    p.epsilon = 0.01;
    p.m = 1e6;
    p.T = 0.05;
    p.dt = 1e-3;
    PathRunner runner(lab.profile, lab.f, noise, p);
    const auto traj = runner.run({11, 2});
    const auto& last = traj.snapshots.back();
    // with eta = 0, C0 = sum <Psi, dW>; C0m should be close for huge m
    CHECK(last.C0m == doctest::Approx(last.C0).epsilon(0.05));
}

TEST_CASE("OU stationary variance matches m <Psi,Q Psi>/2") {
    Lab lab(20.0, 401, 0.5); // c = 0: static Psi pairing
    const auto noise = build_noise(lab.grid, 16, 0.5, 2.0);
    ModelParams p;
    p.epsilon = 0.01;
    p.m = 10.0;
    p.T = 200.0;
    p.dt = 1e-2;
    PathRunner runner(lab.profile, lab.f, noise, p);
    RunOptions opts;
    opts.store_fields = false;
    opts.n_outputs = 20000; // every step
    PathRunner dense(lab.profile, lab.f, noise, p, opts);
    const auto traj = dense.run({123, 0});
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (const auto& snap : traj.snapshots) {
        if (snap.t < 2.0) continue; // discard transient
        ++count;
        const double d = snap.c0m - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (snap.c0m - mean);
    }
    const double var = m2 / static_cast<double>(count - 1);
    const double predicted = p.m * noise.covariance_quadratic_form(lab.profile.psi()) / 2.0;
    // time-correlated samples: generous tolerance
    CHECK(var == doctest::Approx(predicted).epsilon(0.25));
}

TEST_CASE("discrete identity linking u0m, u0 and the phase gap") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.1, 2.0);
    ModelParams p;
    p.epsilon = 0.01;
    p.m = 10.0;
    p.T = 1.0;
    p.dt = 1e-3;
    p.eta = bump(lab.grid, 0.3);
    PathRunner runner(lab.profile, lab.f, noise, p);
    WeightedNormKit kit(lab.profile);
    const auto traj = runner.run({31, 0});
    for (const auto& snap : traj.snapshots) {
        if (snap.t == 0.0) continue;
        const auto fr = lab.profile.frame(lab.profile.c() * snap.t);
        GridVector gap(lab.grid.size());
        for (std::size_t i = 0; i < gap.size(); ++i)
            gap[i] = snap.u0m[i] - snap.u0[i] - fr.vhat_x[i] * (snap.C0 - snap.C0m);
        const double err = kit.norm_h1_one_plus_rho(gap, fr.rho);
        const double scale = kit.norm_h1_one_plus_rho(snap.u0m, fr.rho);
        CHECK(err <= 0.05 * std::max(scale, 1.0));
    }
}

TEST_CASE("u0 stays orthogonal to the kernel direction with maintenance on") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.1, 2.0);
    ModelParams p;
    p.epsilon = 0.01;
    p.m = 10.0;
    p.T = 1.0;
    p.dt = 1e-3;
    p.eta = bump(lab.grid, 0.3);
    PathRunner runner(lab.profile, lab.f, noise, p);
    WeightedNormKit kit(lab.profile);
    const auto traj = runner.run({32, 0});
    for (const auto& snap : traj.snapshots) {
        const auto fr = lab.profile.frame(lab.profile.c() * snap.t);
        const double pairing =
            inner_weighted(lab.grid, snap.u0, fr.vhat_x, fr.rho);
        const double scale = kit.norm_rho(snap.u0, fr.rho);
        if (scale > 0.0) CHECK(std::abs(pairing) / scale <= 1e-10);
    }
}

TEST_CASE("stopping flags and hit times") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    ModelParams p;
    p.epsilon = 0.01;
    p.q_exp = 0.0; // threshold epsilon^1 = 0.01 for the norm, 1 for phases
    p.T = 1.0;
    p.dt = 1e-2;
    PathRunner runner(lab.profile, lab.f, noise, p);

    auto s = runner.initial_state();
    s.t = 0.3;
    s.u = bump(lab.grid, 0.5); // norm far above 0.01
    s.C0m = 2.0;
    s.C0 = 0.5;
    const auto fr = lab.profile.frame(lab.profile.c() * s.t);
    runner.check_stopping(s, fr);
    CHECK(s.stopping.stopped_q);
    CHECK(s.stopping.t_q == 0.3);
    CHECK(s.stopping.stopped_m);
    CHECK_FALSE(s.stopping.stopped_inf);

    // quiescent state never stops
    auto s2 = runner.initial_state();
    s2.t = 0.3;
    s2.u = bump(lab.grid, 1e-4);
    runner.check_stopping(s2, fr);
    CHECK_FALSE(s2.stopping.any());
}

TEST_CASE("blow-up raises with step context") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    ModelParams p;
    p.epsilon = 1.0;
    p.m = 1e-6; // keep the phase ODE quiet so the field overflow hits first
    p.T = 100.0;
    p.dt = 10.0; // wildly unstable explicit reaction step
    p.eta = bump(lab.grid, 1e80);
    PathRunner runner(lab.profile, lab.f, noise, p);
    CHECK_THROWS_AS(runner.run({1, 1}), BlowUpError);
}

TEST_CASE("window violation surfaces when the front outruns the domain") {
    Lab lab(12.0, 241);
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    ModelParams p;
    p.epsilon = 0.0;
    p.T = 14.0; // c T = 7 > L/2 = 6
    p.dt = 1e-2;
    PathRunner runner(lab.profile, lab.f, noise, p);
    CHECK_THROWS_AS(runner.run({1, 1}), WindowError);
}

TEST_CASE("speed diagnostic: aligned deterministic path stays at zero") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    ModelParams p;
    p.epsilon = 0.0;
    p.T = 2.0;
    p.dt = 1e-3;
    RunOptions opts;
    opts.speed_diagnostic = true;
    PathRunner runner(lab.profile, lab.f, noise, p, opts);
    const auto traj = runner.run({8, 0});
    for (const auto& sample : traj.speed) {
        CHECK(std::abs(sample.cm) <= 1e-12);
        CHECK(std::abs(sample.discrepancy) <= 1e-12);
    }
}

TEST_CASE("speed diagnostic discrepancy shrinks ~linearly in dt") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.0, 2.0);
    double disc[2];
    int j = 0;
    for (double dt : {2e-3, 1e-3}) {
        ModelParams p;
        p.epsilon = 1.0; // deterministic (sigma = 0), eta-driven
        p.m = 5.0;
        p.T = 1.0;
        p.dt = dt;
        p.eta = bump(lab.grid, 0.2);
        RunOptions opts;
        opts.speed_diagnostic = true;
        opts.store_fields = false;
        PathRunner runner(lab.profile, lab.f, noise, p, opts);
        const auto traj = runner.run({9, 0});
        double worst = 0.0;
        for (const auto& sample : traj.speed)
            worst = std::max(worst, std::abs(sample.discrepancy));
        disc[j++] = worst;
    }
    CHECK(disc[0] / disc[1] == doctest::Approx(2.0).epsilon(0.5));
}

TEST_CASE("energy diagnostics accumulate and stay finite") {
    Lab lab;
    const auto noise = build_noise(lab.grid, 16, 0.2, 2.0);
    ModelParams p;
    p.epsilon = 0.05;
    p.T = 1.0;
    p.dt = 1e-3;
    PathRunner runner(lab.profile, lab.f, noise, p);
    const auto traj = runner.run({21, 5});
    CHECK(traj.energy_sup > 0.0);
    CHECK(traj.energy_int > 0.0);
    CHECK(std::isfinite(traj.energy_sup));
    CHECK(std::isfinite(traj.energy_int));
}
