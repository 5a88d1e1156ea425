#include "stw/profile.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "stw/interp.hpp"
#include "stw/tridiag.hpp"

namespace stw {

namespace {

// Overflow-safe logistic. The complement 1-s is computed directly so the
// product s(1-s) keeps full relative precision in both tails (a literal
// 1.0 - s rounds to zero once s is within eps of 1).
struct Logistic {
    double s, om; // om = 1 - s
};

Logistic logistic(double t) {
    const double e = std::exp(-std::abs(t));
    const double small = e / (1.0 + e), big = 1.0 / (1.0 + e);
    return t >= 0.0 ? Logistic{big, small} : Logistic{small, big};
}

double sigmoid(double t) { return logistic(t).s; }

} // namespace

std::array<double, 2> decay_rates(double nu, double b, double c,
                                  const ReactionFunction& f) {
    const double d0 = f.f1(0.0), d1 = f.f1(1.0);
    if (!(d0 < 0.0) || !(d1 < 0.0))
        throw std::invalid_argument("decay_rates: rest states must be stable (f'(0), f'(1) < 0)");
    const double h = c / (2.0 * nu);
    const double gm = h - std::sqrt(h * h - (b / nu) * d0);
    const double gp = h + std::sqrt(h * h - (b / nu) * d1);
    return {gm, gp};
}

void WaveProfile::finalize_adjoint() {
    const std::size_t n = grid_.size();
    const double cn = c_ / nu_;
    GridVector integrand(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        integrand[i] = std::exp(-cn * grid_.x(i)) * vhat_x_[i] * vhat_x_[i];
        if (!std::isfinite(integrand[i]))
            throw DomainError("adjoint normalizer: weighted tail integrand overflows; "
                              "half-width too small for these parameters");
        peak = std::max(peak, integrand[i]);
    }
    const double tail = std::max(integrand.front(), integrand.back());
    if (!(peak > 0.0) || tail > 1e-6 * peak)
        throw DomainError("adjoint normalizer: integrand has not decayed at the boundary; "
                          "enlarge the domain half-width");

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += integrand[i] * grid_.quad_weight(i);
    if (!(total > 0.0) || !std::isfinite(total))
        throw DomainError("adjoint normalizer: quadrature not finite");

    Z_ = 1.0 / total;
    rho_.resize(n);
    psi_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rho_[i] = Z_ * std::exp(-cn * grid_.x(i));
        psi_[i] = rho_[i] * vhat_x_[i];
    }
}

void WaveProfile::build_interpolants() {
    slope_vhat_ = shape_preserving_slopes(grid_, vhat_);
    slope_vhat_x_ = shape_preserving_slopes(grid_, vhat_x_);
    slope_vhat_xx_ = shape_preserving_slopes(grid_, vhat_xx_);
}

double WaveProfile::vhat_at(double x) const {
    if (closed_form_) return sigmoid(k_ * x);
    const double L = grid_.half_width();
    if (x < -L) return vhat_.front() * std::exp(mu_minus_ * (x + L));
    if (x > L) return 1.0 - (1.0 - vhat_.back()) * std::exp(mu_plus_ * (x - L));
    return hermite_eval(grid_, vhat_, slope_vhat_, x);
}

double WaveProfile::vhat_x_at(double x) const {
    if (closed_form_) {
        const auto [s, om] = logistic(k_ * x);
        return k_ * s * om;
    }
    const double L = grid_.half_width();
    if (x < -L) return vhat_x_.front() * std::exp(mu_minus_ * (x + L));
    if (x > L) return vhat_x_.back() * std::exp(mu_plus_ * (x - L));
    return hermite_eval(grid_, vhat_x_, slope_vhat_x_, x);
}

double WaveProfile::vhat_xx_at(double x) const {
    if (closed_form_) {
        const auto [s, om] = logistic(k_ * x);
        return k_ * k_ * s * om * (om - s);
    }
    const double L = grid_.half_width();
    if (x < -L) return vhat_xx_.front() * std::exp(mu_minus_ * (x + L));
    if (x > L) return vhat_xx_.back() * std::exp(mu_plus_ * (x - L));
    return hermite_eval(grid_, vhat_xx_, slope_vhat_xx_, x);
}

double WaveProfile::rho_at(double x) const {
    return Z_ * std::exp(-c_over_nu() * x);
}

void WaveProfile::require_in_window(double gamma) const {
    const double limit = 0.5 * grid_.half_width();
    if (!(std::abs(gamma) <= limit * (1.0 + 1e-12))) {
        std::ostringstream msg;
        msg << "shift " << gamma << " outside trusted window [-" << limit << ", "
            << limit << "]: front left the truncated domain";
        throw WindowError(msg.str());
    }
}

GridVector WaveProfile::shift_profile(double gamma, ProfileField which) const {
    require_in_window(gamma);
    const std::size_t n = grid_.size();
    GridVector out(n);
    switch (which) {
    case ProfileField::Vhat:
        for (std::size_t i = 0; i < n; ++i) out[i] = vhat_at(grid_.x(i) + gamma);
        break;
    case ProfileField::VhatX:
        for (std::size_t i = 0; i < n; ++i) out[i] = vhat_x_at(grid_.x(i) + gamma);
        break;
    case ProfileField::VhatXX:
        for (std::size_t i = 0; i < n; ++i) out[i] = vhat_xx_at(grid_.x(i) + gamma);
        break;
    case ProfileField::Psi:
        for (std::size_t i = 0; i < n; ++i) out[i] = psi_at(grid_.x(i) + gamma);
        break;
    }
    return out;
}

ShiftedFrame WaveProfile::frame(double shift) const {
    require_in_window(shift);
    const std::size_t n = grid_.size();
    ShiftedFrame fr;
    fr.shift = shift;
    fr.vhat.resize(n);
    fr.vhat_x.resize(n);
    fr.vhat_xx.resize(n);
    fr.psi.resize(n);
    fr.psi_x.resize(n);
    fr.rho.resize(n);
    const double cn = c_over_nu();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid_.x(i) + shift;
        const double v1 = vhat_x_at(x);
        const double v2 = vhat_xx_at(x);
        const double r = Z_ * std::exp(-cn * x);
        fr.vhat[i] = vhat_at(x);
        fr.vhat_x[i] = v1;
        fr.vhat_xx[i] = v2;
        fr.rho[i] = r;
        fr.psi[i] = r * v1;
        fr.psi_x[i] = r * (v2 - cn * v1);
    }
    return fr;
}

void WaveProfile::export_csv(std::ostream& os) const {
    os << "x,vhat,vhat_x,Psi,rho\n";
    for (std::size_t i = 0; i < grid_.size(); ++i)
        os << grid_.x(i) << ',' << vhat_[i] << ',' << vhat_x_[i] << ','
           << psi_[i] << ',' << rho_[i] << '\n';
}

WaveProfile nagumo_profile(double nu, double b, double a, const SpatialGrid& grid) {
    if (!(nu > 0.0) || !(b > 0.0))
        throw std::invalid_argument("nagumo_profile: nu and b must be positive");
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("nagumo_profile: a must lie in (0,1)");

    WaveProfile p(grid);
    p.nu_ = nu;
    p.b_ = b;
    p.a_ = a;
    p.k_ = std::sqrt(b / (2.0 * nu));
    p.c_ = std::sqrt(2.0 * nu * b) * (0.5 - a);
    p.closed_form_ = true;

    const std::size_t n = grid.size();
    const double k = p.k_;
    p.vhat_.resize(n);
    p.vhat_x_.resize(n);
    p.vhat_xx_.resize(n);
    p.vhat_xxx_.resize(n);
    p.vhat_xxxx_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [s, om] = logistic(k * grid.x(i));
        const double w = s * om;
        p.vhat_[i] = s;
        p.vhat_x_[i] = k * w;
        p.vhat_xx_[i] = k * k * w * (om - s);
        p.vhat_xxx_[i] = k * k * k * w * (1.0 - 6.0 * w);
        p.vhat_xxxx_[i] = k * k * k * k * w * (om - s) * (1.0 - 12.0 * w);
    }

    const auto rates = decay_rates(nu, b, p.c_, nagumo(a));
    p.gamma_minus_ = rates[0];
    p.gamma_plus_ = rates[1];
    p.mu_minus_ = p.c_ / nu - rates[0];
    p.mu_plus_ = p.c_ / nu - rates[1];

    p.finalize_adjoint();
    return p;
}

WaveProfile solve_profile_bvp(const ReactionFunction& f, double nu, double b,
                              const SpatialGrid& grid) {
    if (!(nu > 0.0) || !(b > 0.0))
        throw std::invalid_argument("solve_profile_bvp: nu and b must be positive");
    const double a = f.a;
    if (!(a > 0.0 && a < 1.0) || std::abs(f.f(0.0)) > 1e-12 ||
        std::abs(f.f(1.0)) > 1e-12 || !(f.f1(0.0) < 0.0) || !(f.f1(1.0) < 0.0))
        throw std::invalid_argument("solve_profile_bvp: f is not bistable on [0,1]");

    const std::size_t n = grid.size();
    const double dx = grid.dx();
    const std::size_t mid = grid.center_index();
    const std::size_t ni = n - 2;           // interior unknowns
    const std::size_t mi = mid - 1;         // center among interior unknowns

    // Sigmoid initial guess with the level-a crossing at x = 0.
    const double k0 = std::sqrt(b / (2.0 * nu));
    const double x0 = -std::log(a / (1.0 - a)) / k0;
    GridVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = sigmoid(k0 * (grid.x(i) - x0));
    v[0] = 0.0;
    v[n - 1] = 1.0;

    // Speed guess from the integral identity c ∫ v_x^2 = b ∫_0^1 f(v) dv.
    {
        double num = 0.0, den = 0.0;
        const GridVector vx = d1(grid, v);
        for (std::size_t i = 0; i < n; ++i) {
            num += b * f.f(v[i]) * vx[i] * grid.quad_weight(i);
            den += vx[i] * vx[i] * grid.quad_weight(i);
        }
        if (den <= 0.0) throw SolverError("solve_profile_bvp: degenerate initial guess");
        double c0 = num / den;
        if (!std::isfinite(c0)) c0 = 0.0;
        v.push_back(c0); // stash; popped below
    }
    double c = v.back();
    v.pop_back();

    auto residual = [&](const GridVector& vv, double cc, GridVector& F) {
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double lap = (vv[i + 1] - 2.0 * vv[i] + vv[i - 1]) / (dx * dx);
            const double adv = (vv[i + 1] - vv[i - 1]) / (2.0 * dx);
            F[i - 1] = nu * lap + b * f.f(vv[i]) - cc * adv;
            worst = std::max(worst, std::abs(F[i - 1]));
        }
        return std::max(worst, std::abs(vv[mid] - a));
    };

    GridVector F(ni), y(ni), z(ni);
    GridVector sub(ni), diag(ni), sup(ni);
    double res = residual(v, c, F);
    bool converged = false;

    for (int iter = 0; iter < 60 && !converged; ++iter) {
        for (std::size_t j = 0; j < ni; ++j) {
            sub[j] = nu / (dx * dx) + c / (2.0 * dx);
            diag[j] = -2.0 * nu / (dx * dx) + b * f.f1(v[j + 1]);
            sup[j] = nu / (dx * dx) - c / (2.0 * dx);
            y[j] = -F[j];
            z[j] = -(v[j + 2] - v[j]) / (2.0 * dx); // dF/dc
        }
        solve_tridiag(sub, diag, sup, y);
        solve_tridiag(sub, diag, sup, z);
        if (std::abs(z[mi]) < 1e-14)
            throw SolverError("solve_profile_bvp: singular phase condition");
        const double dc = (y[mi] - (a - v[mid])) / z[mi];

        // Damped update: halve the step until the residual decreases.
        double step = 1.0;
        GridVector trial = v;
        double trial_c = c, trial_res = res;
        for (int ls = 0; ls < 25; ++ls) {
            for (std::size_t j = 0; j < ni; ++j)
                trial[j + 1] = v[j + 1] + step * (y[j] - dc * z[j]);
            trial_c = c + step * dc;
            trial_res = residual(trial, trial_c, F);
            if (trial_res < res || res < 1e-12) break;
            step *= 0.5;
        }
        v.swap(trial);
        c = trial_c;
        res = trial_res;
        converged = res <= 1e-11;
        if (!converged) res = residual(v, c, F); // refresh F for next Jacobian
    }
    if (!converged && res > 1e-9) {
        std::ostringstream msg;
        msg << "solve_profile_bvp: Newton stalled, last residual " << res;
        throw SolverError(msg.str());
    }
    // Monotone increasing; ties are tolerated only where the profile has
    // saturated to the rest states at double precision.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (v[i + 1] < v[i])
            throw SolverError("solve_profile_bvp: converged profile is not monotone");
        if (v[i + 1] == v[i] && v[i] > 1e-12 && v[i] < 1.0 - 1e-12)
            throw SolverError("solve_profile_bvp: profile stagnates in the front region");
    }

    WaveProfile p(grid);
    p.nu_ = nu;
    p.b_ = b;
    p.a_ = a;
    p.c_ = c;
    p.closed_form_ = false;
    p.vhat_ = v;
    p.vhat_x_ = d1(grid, v);
    p.vhat_xx_.resize(n);
    p.vhat_xxx_.resize(n);
    p.vhat_xxxx_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.vhat_xx_[i] = (c * p.vhat_x_[i] - b * f.f(v[i])) / nu;
        p.vhat_xxx_[i] = (c * p.vhat_xx_[i] - b * f.f1(v[i]) * p.vhat_x_[i]) / nu;
        p.vhat_xxxx_[i] = (c * p.vhat_xxx_[i] -
                           b * (f.f2(v[i]) * p.vhat_x_[i] * p.vhat_x_[i] +
                                f.f1(v[i]) * p.vhat_xx_[i])) /
                          nu;
    }

    const auto rates = decay_rates(nu, b, c, f);
    p.gamma_minus_ = rates[0];
    p.gamma_plus_ = rates[1];
    p.mu_minus_ = c / nu - rates[0];
    p.mu_plus_ = c / nu - rates[1];

    p.build_interpolants();
    p.finalize_adjoint();
    return p;
}

} // namespace stw
