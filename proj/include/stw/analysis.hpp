#ifndef STW_ANALYSIS_HPP
#define STW_ANALYSIS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "stw/dynamics.hpp"
#include "stw/noise.hpp"
#include "stw/norms.hpp"
#include "stw/profile.hpp"

namespace stw {

/// One weighted-norm time series, e.g. ||r^m(t)||_{H1(1+rho_t)}.
struct ResidualSeries {
    std::vector<double> times;
    std::vector<double> norms;
    double sup() const;
};

/// Decomposition residual r^m = [v - vhat(.+ct+eps C0m)]/eps - u0m evaluated
/// at every stored snapshot. Requires eps > 0 and stored fields.
ResidualSeries residual_finite_m(const PathTrajectory& traj, const WaveProfile& profile,
                                 const ModelParams& params);

/// Same with the immediate-relaxation pair (C0, u0).
ResidualSeries residual_immediate(const PathTrajectory& traj, const WaveProfile& profile,
                                  const ModelParams& params);

struct ScalingReport {
    std::vector<double> epsilons;                     // strictly decreasing
    std::vector<std::vector<double>> residual_norms;  // [eps][path] sup_t ||eps r||
    std::vector<double> stop_fractions;               // [eps] P(tau < T)
    std::vector<bool> usable;                         // [eps] any unstopped path
    std::vector<double> path_slopes;                  // per-path log-log fits
    double slope_median = 0.0;
    double slope_iqr = 0.0;
    double q_exp = 0.0;
};

/// Seed-coupled epsilon sweep of the finite-m (or immediate) decomposition
/// residual; slopes are fitted per path over the epsilons where the path
/// ran unstopped.
ScalingReport scaling_study(const WaveProfile& profile, const ReactionFunction& f,
                            const NoiseModel& noise, const ModelParams& base,
                            const std::vector<double>& epsilons, std::size_t n_paths,
                            std::uint64_t master_seed, bool immediate = false,
                            unsigned n_threads = 0);

struct SpectralGapResult {
    double kappa_hat = 0.0;    ///< -(second eigenvalue of the deflated operator)
    double c_star_hat = 0.0;   ///< empirical constant for the gap inequality
    double kernel_rayleigh = 0.0;  ///< Rayleigh quotient of vhat_x (should be ~0)
    bool gap_positive = false;
};

/// Dense symmetric eigensolve of the discretized frozen-wave operator,
/// conjugated by rho^{1/2} and deflated in the kernel direction.
SpectralGapResult spectral_gap(const WaveProfile& profile, const ReactionFunction& f);

struct ContractionReport {
    bool passed = false;
    double first_violation_t = -1.0;
    double fitted_rate = 0.0;  ///< decay exponent of log ||u(t)||_rho
    std::vector<double> times;
    std::vector<double> norms;
};

/// Evolves du/dt = L# u from a rho-orthogonal start and checks the
/// semigroup contraction at rate kappa_hat (5% slack).
ContractionReport contraction_check(const WaveProfile& profile, const ReactionFunction& f,
                                    double kappa_hat, const GridVector& u_init,
                                    double T, double dt, std::size_t n_outputs = 100);

struct VarianceLawReport {
    std::vector<double> times;
    std::vector<double> empirical_var;
    std::vector<double> exact_prediction;   ///< int_0^t <Psi(+cs), Q Psi(+cs)> ds
    std::vector<double> static_prediction;  ///< <Psi, Q Psi> t
    double fitted_slope = 0.0;
    double slope_se = 0.0;
    double static_slope = 0.0;  ///< <Psi, Q Psi>
    double max_gap_exact_static = 0.0;
    std::size_t n_paths = 0;
};

/// Monte Carlo of the immediate phase C0 alone (mode-space fast path) and
/// regression of Var(C0(t)) against t.
VarianceLawReport variance_law(const WaveProfile& profile, const NoiseModel& noise,
                               double T, double dt, std::size_t n_paths,
                               std::uint64_t master_seed, std::size_t n_outputs = 50,
                               unsigned n_threads = 0);

struct MomentBoundReport {
    std::vector<double> times;
    std::vector<double> mean_sq_norm;  ///< E ||u0#(t)||^2_rho
    std::vector<double> bound;         ///< 2 e^{-2kt}||eta||_rho + (HS^2/k)(1-e^{-2kt})
    std::vector<double> slack;         ///< 3 SE per time
    double hs_weighted = 0.0;          ///< ||sqrt(Q)||^2_{HS, L2(1+rho)->L2(rho)}
    bool passed = false;
    double first_violation_t = -1.0;
};

/// Frozen-frame Monte Carlo of u0# (static projection, shifted noise) against
/// the semigroup second-moment bound.
MomentBoundReport second_moment_bound(const WaveProfile& profile,
                                      const ReactionFunction& f, const NoiseModel& noise,
                                      double kappa_hat, const GridVector& eta, double T,
                                      double dt, std::size_t n_paths,
                                      std::uint64_t master_seed,
                                      std::size_t n_outputs = 50,
                                      unsigned n_threads = 0);

/// Integrates v_t = nu v_xx + b f(v) in the lab frame from v(0) = vhat and
/// fits the drift of the level-a crossing; returns the measured front speed
/// with the sign convention of the vhat(x + ct) parameterization.
double measure_front_speed(const WaveProfile& profile, const ReactionFunction& f,
                           double T, double dt);

/// Discrete residual norms of the kernel identities: the frozen-wave
/// operator applied to vhat_x (rho-norm) and its formal adjoint applied to
/// Psi (plain L2), boundary nodes excluded. Both shrink at second order.
std::pair<double, double> kernel_identity_residuals(const WaveProfile& profile,
                                                    const ReactionFunction& f);

/// Hilbert-Schmidt-type constant sum_k q_k ||e_k||^2_rho of sqrt(Q) into
/// L2(rho), summed over the covariance eigenmodes.
double hs_norm_weighted(const NoiseModel& noise, const WaveProfile& profile);

/// max_t |<u0(t), vhat_x(.+ct)>_{rho_t}| / ||u0(t)||_{rho_t} over snapshots.
double orthogonality_check(const PathTrajectory& traj, const WaveProfile& profile);

struct MinimisationResult {
    double first_deriv_over_eps2 = 0.0;
    double second_deriv_over_eps2 = 0.0;
    double reference_second = 0.0;  ///< 2 ||vhat_x(.+ct)||^2_{rho_t}
};

/// Central differences of a -> ||v(t) - vhat(.+ct+eps a)||^2_{rho_t} at
/// a = C0(t), from the snapshot nearest to t.
MinimisationResult minimisation_check(const PathTrajectory& traj,
                                      const WaveProfile& profile,
                                      const ModelParams& params, double t,
                                      double a_step = 1e-3);

} // namespace stw

#endif
