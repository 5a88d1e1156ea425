#ifndef STW_NORMS_HPP
#define STW_NORMS_HPP

#include "stw/grid.hpp"
#include "stw/profile.hpp"

namespace stw {

/// Weighted norms against the moving measure rho_t(x) = rho(x + ct).
/// All quadrature is composite trapezoid; derivatives are the same
/// second-order stencil used by the time steppers.
class WeightedNormKit {
public:
    explicit WeightedNormKit(const WaveProfile& profile) : profile_(&profile) {}

    const WaveProfile& profile() const { return *profile_; }

    /// rho(x + shift) sampled on the grid (analytic, any shift).
    GridVector rho_t(double shift) const;

    double norm_l2(const GridVector& h) const;
    double norm_rho(const GridVector& h, const GridVector& rho) const;

    /// ||h||_{1+rho} with ||.||^2 = ||h||^2_{L2} + ||h||^2_{rho}
    double norm_one_plus_rho(const GridVector& h, const GridVector& rho) const;

    /// ||h||_{H1(1+rho)} with ||.||^2 = ||h||^2_{1+rho} + ||D1 h||^2_{1+rho}
    double norm_h1_one_plus_rho(const GridVector& h, const GridVector& rho) const;

private:
    const WaveProfile* profile_;
};

} // namespace stw

#endif
