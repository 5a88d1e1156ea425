#ifndef STW_DYNAMICS_HPP
#define STW_DYNAMICS_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stw/noise.hpp"
#include "stw/norms.hpp"
#include "stw/profile.hpp"
#include "stw/reaction.hpp"
#include "stw/tridiag.hpp"

namespace stw {

/// Non-finite field values during time stepping.
struct BlowUpError : std::runtime_error {
    BlowUpError(const std::string& what, std::size_t step_index)
        : std::runtime_error(what), step(step_index) {}
    std::size_t step;
};

/// Per-run scalars. The physical coefficients nu and b live on the
/// WaveProfile; duplicating them here would invite inconsistency.
struct ModelParams {
    double epsilon = 0.01;  ///< noise amplitude of the full equation
    double m = 100.0;       ///< phase relaxation rate
    double T = 5.0;         ///< horizon
    double dt = 1e-3;       ///< time step
    double q_exp = 0.1;     ///< stopping exponent q in [0,1]
    GridVector eta;         ///< initial perturbation shape (u(0) = epsilon*eta);
                            ///< empty means zero

    std::size_t n_steps() const;
    void validate(const SpatialGrid& grid) const;
};

struct StoppingFlags {
    bool stopped_q = false, stopped_m = false, stopped_inf = false;
    double t_q = -1.0, t_m = -1.0, t_inf = -1.0;
    bool any() const { return stopped_q || stopped_m || stopped_inf; }
};

/// Everything advanced in lockstep on one Brownian path.
struct PathState {
    double t = 0.0;
    GridVector u;    ///< v - vhat(.+ct), the full nonlinear perturbation
    double Cm = 0.0;   ///< phase adaptation C^m
    double c0m = 0.0;  ///< OU wave speed c_0^m
    double C0m = 0.0;  ///< integrated phase int_0^t c_0^m
    double C0 = 0.0;   ///< immediate-relaxation phase
    GridVector u0m;  ///< first-order fluctuation (noise amplitude 1)
    GridVector u0;   ///< immediate-relaxation fluctuation, kept orthogonal
    double energy_sup = 0.0;  ///< sup_s ||u(s)||^2_{1+rho_s}
    double energy_int = 0.0;  ///< int_0^t ||u(s)||^2_{H1(1+rho_s)} ds
    StoppingFlags stopping;
};

struct Snapshot {
    double t = 0.0;
    double Cm = 0.0, c0m = 0.0, C0m = 0.0, C0 = 0.0;
    double u_h1w = 0.0;  ///< ||u||_{H1(1+rho_t)}
    double u_rho = 0.0;  ///< ||u||_{rho_t}
    GridVector u, u0m, u0;  ///< present when fields are stored
};

/// One sample of the adapted wave speed and its integral-form residual.
struct SpeedSample {
    double t = 0.0;
    double cm = 0.0;           ///< m <u^m, Psi(.+gamma^m)>
    double accumulated = 0.0;  ///< right side integrals accumulated from 0
    double discrepancy = 0.0;  ///< cm - cm(0) - accumulated
};

struct RunOptions {
    std::size_t n_outputs = 100;
    bool store_fields = true;
    bool maintain_projection = true;  ///< re-project u0 every step
    bool speed_diagnostic = false;
    bool with_initial_snapshot = true;
};

struct PathTrajectory {
    std::vector<Snapshot> snapshots;
    std::vector<SpeedSample> speed;
    StoppingFlags stopping;
    double energy_sup = 0.0, energy_int = 0.0;
    PathSeed seed;
};

/// Advances the coupled system (full SPDE, phase ODE, OU speed, integrated
/// phases, linearized fluctuations) with shared increments per step.
/// Immutable once constructed; one instance can run many paths, also
/// concurrently.
class PathRunner {
public:
    PathRunner(const WaveProfile& profile, const ReactionFunction& f,
               const NoiseModel& noise, ModelParams params, RunOptions opts = {});

    const ModelParams& params() const { return params_; }
    const RunOptions& options() const { return opts_; }
    const WaveProfile& profile() const { return *profile_; }

    PathTrajectory run(PathSeed seed) const;

    // The individual updates, exposed for direct testing. `fr` is the frame
    // at the step's left endpoint t_n, `fr_next` at t_{n+1}.
    PathState initial_state() const;
    void step_full_spde(PathState& s, const ShiftedFrame& fr, const GridVector& dw,
                        std::size_t step) const;
    void step_phase_ode(PathState& s, const ShiftedFrame& fr,
                        const GridVector& u_frozen) const;
    void step_ou_speed(PathState& s, double psi_pairing) const;
    void step_immediate_phase(PathState& s, double psi_pairing) const;
    /// Advances u0m and u0. Both are stepped as combined fields
    /// u + C vhat_x with the same one-step map as the full equation and
    /// re-split against the already-updated phases, so the discrete
    /// decomposition identity holds exactly at leading order. C0m_left and
    /// C0_left are the phase values at t_n (before their updates); kernel
    /// content removed by projection maintenance is transferred into C0.
    void step_linearized(PathState& s, const ShiftedFrame& fr,
                         const ShiftedFrame& fr_next, const GridVector& dw,
                         double C0m_left, double C0_left, std::size_t step) const;
    void check_stopping(PathState& s, const ShiftedFrame& fr_next) const;

    /// Instantaneous adapted speed c^m = m <u^m, Psi(.+ct+Cm)>.
    double adapted_speed(const PathState& s) const;

    /// Orthogonal projection h -> h - <h,phi>_rho/<phi,phi>_rho phi with
    /// phi = vhat_x at the frame's shift; idempotent at quadrature level.
    void project_out_kernel(GridVector& h, const ShiftedFrame& fr) const;

private:
    double phase_drift(double t, double C, const GridVector& v) const;

    const WaveProfile* profile_;
    ReactionFunction f_;
    const NoiseModel* noise_;
    ModelParams params_;
    RunOptions opts_;
    WeightedNormKit norms_;
    TridiagSolver implicit_solver_;  // I - dt nu D2 on interior nodes
};

} // namespace stw

#endif
