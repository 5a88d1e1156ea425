#include "stw/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace stw {

std::size_t ModelParams::n_steps() const {
    return static_cast<std::size_t>(std::llround(T / dt));
}

void ModelParams::validate(const SpatialGrid& grid) const {
    if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("params: T, dt must be positive");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("params: epsilon must be nonnegative");
    if (!(m > 0.0)) throw std::invalid_argument("params: m must be positive");
    if (!(q_exp >= 0.0 && q_exp <= 1.0)) throw std::invalid_argument("params: q must be in [0,1]");
    if (!eta.empty() && eta.size() != grid.size())
        throw std::invalid_argument("params: eta does not match the grid");
    if (n_steps() == 0) throw std::invalid_argument("params: T/dt rounds to zero steps");
}

PathRunner::PathRunner(const WaveProfile& profile, const ReactionFunction& f,
                       const NoiseModel& noise, ModelParams params, RunOptions opts)
    : profile_(&profile), f_(f), noise_(&noise), params_(std::move(params)),
      opts_(opts), norms_(profile) {
    if (!noise.grid().same_as(profile.grid()))
        throw std::invalid_argument("PathRunner: noise and profile grids differ");
    params_.validate(profile.grid());
    const SpatialGrid& g = profile.grid();
    const double r = profile.nu() * params_.dt / (g.dx() * g.dx());
    implicit_solver_ = TridiagSolver(g.size() - 2, -r, 1.0 + 2.0 * r, -r);
}

PathState PathRunner::initial_state() const {
    const SpatialGrid& g = profile_->grid();
    PathState s;
    s.u.assign(g.size(), 0.0);
    s.u0m.assign(g.size(), 0.0);
    s.u0.assign(g.size(), 0.0);
    if (!params_.eta.empty()) {
        s.u0m = params_.eta;
        s.u0 = params_.eta;
        for (std::size_t i = 0; i < g.size(); ++i)
            s.u[i] = params_.epsilon * params_.eta[i];
        s.c0m = params_.m * inner_dx(g, params_.eta, profile_->psi());
        // The immediate-relaxation phase absorbs the kernel component of eta
        // instantly, so C0(0) vhat_x + u0(0) = eta holds at quadrature level.
        s.C0 = inner_dx(g, params_.eta, profile_->psi());
    }
    const ShiftedFrame fr0 = profile_->frame(0.0);
    project_out_kernel(s.u0, fr0);
    const double e0 = norms_.norm_one_plus_rho(s.u, fr0.rho);
    s.energy_sup = e0 * e0;
    return s;
}

void PathRunner::step_full_spde(PathState& s, const ShiftedFrame& fr,
                                const GridVector& dw, std::size_t step) const {
    const SpatialGrid& g = profile_->grid();
    const std::size_t n = g.size();
    const double dt = params_.dt, b = profile_->b(), eps = params_.epsilon;
    GridVector rhs(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double vh = fr.vhat[i];
        rhs[i - 1] = s.u[i] + dt * b * (f_.f(s.u[i] + vh) - f_.f(vh)) + eps * dw[i];
    }
    implicit_solver_.solve(rhs);
    s.u.front() = 0.0;
    s.u.back() = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!std::isfinite(rhs[i - 1]))
            throw BlowUpError("full SPDE produced non-finite values", step);
        s.u[i] = rhs[i - 1];
    }
}

double PathRunner::phase_drift(double t, double C, const GridVector& v) const {
    const double shift = profile_->c() * t + C;
    profile_->require_in_window(shift);
    const SpatialGrid& g = profile_->grid();
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i) + shift;
        const double term =
            (v[i] - profile_->vhat_at(x)) * profile_->psi_at(x) * g.quad_weight(i);
        const double y = term - comp;
        const double tt = acc + y;
        comp = (tt - acc) - y;
        acc = tt;
    }
    return acc;
}

void PathRunner::step_phase_ode(PathState& s, const ShiftedFrame& fr,
                                const GridVector& u_frozen) const {
    const SpatialGrid& g = profile_->grid();
    GridVector v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = u_frozen[i] + fr.vhat[i];

    const double m = params_.m, dt = params_.dt;
    const auto n_sub = static_cast<std::size_t>(std::ceil(10.0 * m * dt));
    const double dt_sub = dt / static_cast<double>(std::max<std::size_t>(n_sub, 1));
    double C = s.Cm;
    for (std::size_t j = 0; j < std::max<std::size_t>(n_sub, 1); ++j)
        C += dt_sub * m * phase_drift(s.t, C, v);
    s.Cm = C;
}

void PathRunner::step_ou_speed(PathState& s, double psi_pairing) const {
    const double m = params_.m, dt = params_.dt;
    const double decay = std::exp(-m * dt);
    const double next = decay * s.c0m + (1.0 - decay) * psi_pairing / dt;
    s.C0m += 0.5 * dt * (s.c0m + next);
    s.c0m = next;
}

void PathRunner::step_immediate_phase(PathState& s, double psi_pairing) const {
    s.C0 += psi_pairing;
}

void PathRunner::project_out_kernel(GridVector& h, const ShiftedFrame& fr) const {
    const SpatialGrid& g = profile_->grid();
    const double num = inner_weighted(g, h, fr.vhat_x, fr.rho);
    const double den = inner_weighted(g, fr.vhat_x, fr.vhat_x, fr.rho);
    const double coeff = num / den;
    for (std::size_t i = 0; i < g.size(); ++i) h[i] -= coeff * fr.vhat_x[i];
}

void PathRunner::step_linearized(PathState& s, const ShiftedFrame& fr,
                                 const ShiftedFrame& fr_next, const GridVector& dw,
                                 double C0m_left, double C0_left,
                                 std::size_t step) const {
    const SpatialGrid& g = profile_->grid();
    const std::size_t n = g.size();
    const double dt = params_.dt, b = profile_->b();

    // u0m: the combined field u0m + C0m vhat_x follows the same discrete
    // one-step map as the full equation; the phase-coupling forcing
    // -c0m vhat_x is realized by splitting off the updated phase, which
    // keeps the transport of the kernel direction consistent to O(dt^2)
    // per step instead of O(dt).
    GridVector rhs(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double w = s.u0m[i] + C0m_left * fr.vhat_x[i];
        rhs[i - 1] = w + dt * b * f_.f1(fr.vhat[i]) * w + dw[i];
    }
    implicit_solver_.solve(rhs);
    s.u0m.front() = 0.0;
    s.u0m.back() = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!std::isfinite(rhs[i - 1]))
            throw BlowUpError("linearized field u0m non-finite", step);
        s.u0m[i] = rhs[i - 1] - s.C0m * fr_next.vhat_x[i];
    }

    // u0: same transport-consistent stepping; the immediate phase jump
    // removes the kernel part of the noise, and projection maintenance
    // transfers any residual kernel content into C0 so the decomposition
    // C0 vhat_x + u0 is preserved exactly.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double w = s.u0[i] + C0_left * fr.vhat_x[i];
        rhs[i - 1] = w + dt * b * f_.f1(fr.vhat[i]) * w + dw[i];
    }
    implicit_solver_.solve(rhs);
    s.u0.front() = 0.0;
    s.u0.back() = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!std::isfinite(rhs[i - 1]))
            throw BlowUpError("linearized field u0 non-finite", step);
        s.u0[i] = rhs[i - 1] - s.C0 * fr_next.vhat_x[i];
    }
    if (opts_.maintain_projection) {
        const double num = inner_weighted(g, s.u0, fr_next.vhat_x, fr_next.rho);
        const double den =
            inner_weighted(g, fr_next.vhat_x, fr_next.vhat_x, fr_next.rho);
        const double coeff = num / den;
        for (std::size_t i = 0; i < n; ++i) s.u0[i] -= coeff * fr_next.vhat_x[i];
        s.C0 += coeff;
    }
}

void PathRunner::check_stopping(PathState& s, const ShiftedFrame& fr_next) const {
    const double eps = params_.epsilon;
    if (eps == 0.0) return; // thresholds are meaningful only for eps > 0
    const double q = params_.q_exp;
    if (!s.stopping.stopped_q) {
        const double nq = norms_.norm_h1_one_plus_rho(s.u, fr_next.rho);
        if (nq >= std::pow(eps, 1.0 - q)) {
            s.stopping.stopped_q = true;
            s.stopping.t_q = s.t;
        }
    }
    const double cap = std::pow(eps, -q);
    if (!s.stopping.stopped_m && std::abs(s.C0m) >= cap) {
        s.stopping.stopped_m = true;
        s.stopping.t_m = s.t;
    }
    if (!s.stopping.stopped_inf && std::abs(s.C0) >= cap) {
        s.stopping.stopped_inf = true;
        s.stopping.t_inf = s.t;
    }
}

double PathRunner::adapted_speed(const PathState& s) const {
    const SpatialGrid& g = profile_->grid();
    const double ct = profile_->c() * s.t;
    const double gamma = ct + s.Cm;
    profile_->require_in_window(gamma);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        const double um = s.u[i] + profile_->vhat_at(x + ct) - profile_->vhat_at(x + gamma);
        acc += um * profile_->psi_at(x + gamma) * g.quad_weight(i);
    }
    return params_.m * acc;
}

PathTrajectory PathRunner::run(PathSeed seed) const {
    const SpatialGrid& g = profile_->grid();
    const std::size_t N = params_.n_steps();
    const double dt = params_.dt, c = profile_->c();
    const std::size_t stride = std::max<std::size_t>(1, N / std::max<std::size_t>(1, opts_.n_outputs));

    PathState state = initial_state();
    IncrementStream stream = sample_increments(*noise_, N, dt, seed);

    PathTrajectory traj;
    traj.seed = seed;
    traj.snapshots.reserve(opts_.n_outputs + 2);

    ShiftedFrame fr = profile_->frame(0.0);

    auto record = [&](const ShiftedFrame& at) {
        Snapshot snap;
        snap.t = state.t;
        snap.Cm = state.Cm;
        snap.c0m = state.c0m;
        snap.C0m = state.C0m;
        snap.C0 = state.C0;
        snap.u_h1w = norms_.norm_h1_one_plus_rho(state.u, at.rho);
        snap.u_rho = norms_.norm_rho(state.u, at.rho);
        if (opts_.store_fields) {
            snap.u = state.u;
            snap.u0m = state.u0m;
            snap.u0 = state.u0;
        }
        traj.snapshots.push_back(std::move(snap));
    };

    double cm0 = 0.0, speed_accum = 0.0;
    if (opts_.speed_diagnostic) cm0 = adapted_speed(state);
    if (opts_.with_initial_snapshot) {
        record(fr);
        if (opts_.speed_diagnostic)
            traj.speed.push_back({0.0, cm0, 0.0, 0.0});
    }

    GridVector u_prev(g.size());
    for (std::size_t n = 0; n < N; ++n) {
        const GridVector& dw = stream.at(n).w;

        if (opts_.speed_diagnostic) {
            // left-endpoint accumulation of the speed SDE's right side
            const double gamma = c * state.t + state.Cm;
            profile_->require_in_window(gamma);
            const double m = params_.m, b = profile_->b(), eps = params_.epsilon;
            double cm = 0.0, psix_pair = 0.0, rem_pair = 0.0, noise_pair = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double x = g.x(i);
                const double vg = profile_->vhat_at(x + gamma);
                const double um = state.u[i] + fr.vhat[i] - vg;
                const double psi = profile_->psi_at(x + gamma);
                const double w = g.quad_weight(i);
                cm += um * psi * w;
                psix_pair += um * profile_->psi_x_at(x + gamma) * w;
                rem_pair += (b * (f_.f(um + vg) - f_.f(vg)) - b * f_.f1(vg) * um) * psi * w;
                noise_pair += psi * dw[i] * w;
            }
            cm *= m;
            speed_accum += dt * m * (-cm + cm * psix_pair + rem_pair) +
                           eps * m * noise_pair;
        }

        u_prev = state.u;
        const double C0m_prev = state.C0m;
        const double C0_prev = state.C0;

        step_full_spde(state, fr, dw, n);
        step_phase_ode(state, fr, u_prev);
        const double pairing = inner_dx(g, fr.psi, dw);
        step_ou_speed(state, pairing);
        step_immediate_phase(state, pairing);

        ShiftedFrame fr_next = profile_->frame(c * static_cast<double>(n + 1) * dt);
        step_linearized(state, fr, fr_next, dw, C0m_prev, C0_prev, n);
        state.t = static_cast<double>(n + 1) * dt;

        const double e1 = norms_.norm_one_plus_rho(state.u, fr_next.rho);
        const double h1 = norms_.norm_h1_one_plus_rho(state.u, fr_next.rho);
        state.energy_sup = std::max(state.energy_sup, e1 * e1);
        state.energy_int += dt * h1 * h1;

        check_stopping(state, fr_next);

        if ((n + 1) % stride == 0 || n + 1 == N) {
            record(fr_next);
            if (opts_.speed_diagnostic) {
                const double cm_now = adapted_speed(state);
                traj.speed.push_back(
                    {state.t, cm_now, speed_accum, cm_now - cm0 - speed_accum});
            }
        }
        fr = std::move(fr_next);
    }

    traj.stopping = state.stopping;
    traj.energy_sup = state.energy_sup;
    traj.energy_int = state.energy_int;
    return traj;
}

} // namespace stw
