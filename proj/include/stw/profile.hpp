#ifndef STW_PROFILE_HPP
#define STW_PROFILE_HPP

#include <array>
#include <iosfwd>
#include <stdexcept>

#include "stw/grid.hpp"
#include "stw/reaction.hpp"

namespace stw {

/// Thrown when a requested shift would move the front outside the trusted
/// interior of the truncated domain.
struct WindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when the truncated domain is too small to resolve the weighted
/// quadratures (profile tails too heavy for the chosen half-width).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when the travelling-wave Newton iteration fails to converge;
/// the message carries the last residual.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ProfileField { Vhat, VhatX, VhatXX, Psi };

/// Shifted samples of the travelling-wave quantities at one instant,
/// cached once per time step and shared by all processes.
struct ShiftedFrame {
    double shift = 0.0;
    GridVector vhat, vhat_x, vhat_xx;
    GridVector psi, psi_x, rho;
};

/// The deterministic travelling wave: profile samples and derivatives, wave
/// speed, adjoint zero-eigenfunction Psi, the exponential weight rho with
/// its normalizer Z, and the asymptotic decay rates. Immutable after
/// construction and shared read-only across Monte Carlo workers.
class WaveProfile {
public:
    const SpatialGrid& grid() const { return grid_; }
    double nu() const { return nu_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double c_over_nu() const { return c_ / nu_; }
    double Z() const { return Z_; }
    double gamma_minus() const { return gamma_minus_; }
    double gamma_plus() const { return gamma_plus_; }
    bool closed_form() const { return closed_form_; }

    const GridVector& vhat() const { return vhat_; }
    const GridVector& vhat_x() const { return vhat_x_; }
    const GridVector& vhat_xx() const { return vhat_xx_; }
    const GridVector& vhat_xxx() const { return vhat_xxx_; }
    const GridVector& vhat_xxxx() const { return vhat_xxxx_; }
    const GridVector& psi() const { return psi_; }
    const GridVector& rho() const { return rho_; }

    // Off-grid evaluation. Closed-form profiles are evaluated analytically;
    // BVP profiles interpolate (monotone cubic) with exponential tails.
    double vhat_at(double x) const;
    double vhat_x_at(double x) const;
    double vhat_xx_at(double x) const;
    double rho_at(double x) const;
    double psi_at(double x) const { return rho_at(x) * vhat_x_at(x); }
    double psi_x_at(double x) const {
        return rho_at(x) * (vhat_xx_at(x) - c_over_nu() * vhat_x_at(x));
    }

    /// Samples one field at x + gamma over the whole grid. The shift must
    /// keep the front in the trusted interior: |gamma| <= L/2.
    GridVector shift_profile(double gamma, ProfileField which) const;

    /// All frame quantities at x + shift in one pass.
    ShiftedFrame frame(double shift) const;

    void require_in_window(double gamma) const;

    /// Writes columns x, vhat, vhat_x, Psi, rho as CSV.
    void export_csv(std::ostream& os) const;

    friend WaveProfile nagumo_profile(double nu, double b, double a,
                                      const SpatialGrid& grid);
    friend WaveProfile solve_profile_bvp(const ReactionFunction& f, double nu,
                                         double b, const SpatialGrid& grid);

private:
    explicit WaveProfile(const SpatialGrid& grid) : grid_(grid) {}

    void finalize_adjoint(); // computes Z, psi, rho from vhat_x, c, nu
    void build_interpolants();

    SpatialGrid grid_;
    double nu_ = 1.0, b_ = 1.0, a_ = 0.5, c_ = 0.0;
    double Z_ = 1.0;
    double gamma_minus_ = -1.0, gamma_plus_ = 1.0;
    bool closed_form_ = false;
    double k_ = 1.0; // sqrt(b/2nu), closed-form steepness

    GridVector vhat_, vhat_x_, vhat_xx_, vhat_xxx_, vhat_xxxx_;
    GridVector psi_, rho_;

    // monotone cubic slopes for off-grid evaluation of BVP profiles
    GridVector slope_vhat_, slope_vhat_x_, slope_vhat_xx_;
    double mu_minus_ = 1.0, mu_plus_ = -1.0; // tail rates of vhat_x
};

/// Closed-form Nagumo travelling wave: vhat(x) = (1 + exp(-sqrt(b/2nu) x))^-1
/// with speed c = sqrt(2 nu b)(1/2 - a).
WaveProfile nagumo_profile(double nu, double b, double a, const SpatialGrid& grid);

/// Solves the travelling-wave BVP c vhat_x = nu vhat_xx + b f(vhat) with
/// vhat(-L)=0, vhat(L)=1 and phase pinning vhat(0)=a; the speed c is an
/// unknown of the Newton iteration.
WaveProfile solve_profile_bvp(const ReactionFunction& f, double nu, double b,
                              const SpatialGrid& grid);

/// Asymptotic decay rates of the linearization at the rest states.
std::array<double, 2> decay_rates(double nu, double b, double c,
                                  const ReactionFunction& f);

} // namespace stw

#endif
