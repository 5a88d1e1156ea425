#ifndef STW_NOISE_HPP
#define STW_NOISE_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stw/grid.hpp"
#include "stw/rng.hpp"

namespace stw {

/// Truncated spectral Q-Wiener covariance on [-L,L]: Dirichlet sine modes
/// e_k(x) = sin(k pi (x+L)/(2L)) / sqrt(L), orthonormal in L^2(dx) (exactly
/// so under trapezoid quadrature for k <= n-2), with eigenvalues
/// q_k = sigma^2 (1 + (k pi / 2L)^2)^{-r}. r >= 2 keeps sqrt(Q)
/// Hilbert-Schmidt into H^1. Immutable; shared across paths.
class NoiseModel {
public:
    NoiseModel(const SpatialGrid& grid, std::size_t K, double sigma, double r);

    const SpatialGrid& grid() const { return grid_; }
    std::size_t K() const { return K_; }
    double sigma() const { return sigma_; }
    double r() const { return r_; }
    double trace() const { return trace_; }
    double hs_h1() const { return hs_h1_; }
    const GridVector& mode(std::size_t k) const { return modes_[k]; }
    double q(std::size_t k) const { return q_[k]; }
    const std::vector<double>& eigenvalues() const { return q_; }

    /// Samples e_k(x + shift), zero where x + shift leaves [-L, L].
    GridVector mode_shifted(std::size_t k, double shift) const;

    /// <phi, Q phi> = sum_k q_k <phi, e_k>^2 under trapezoid quadrature.
    double covariance_quadratic_form(const GridVector& phi) const;

private:
    SpatialGrid grid_;
    std::size_t K_;
    double sigma_, r_;
    double trace_ = 0.0, hs_h1_ = 0.0;
    std::vector<GridVector> modes_;
    std::vector<double> q_;
};

NoiseModel build_noise(const SpatialGrid& grid, std::size_t K, double sigma, double r);

/// One Brownian increment: the grid vector and the underlying mode normals.
struct Increment {
    GridVector w;            // Delta W_n = sum_k sqrt(q_k dt) xi_k e_k
    std::vector<double> xi;  // the standard normals, one per mode
};

/// Lazily evaluated increment sequence for one path. Counter-based: at(n)
/// depends only on (seed, n), so streams can be replayed or consumed out of
/// order, and sweeps over epsilon or m reuse identical Brownian paths.
class IncrementStream {
public:
    IncrementStream(const NoiseModel& model, std::size_t n_steps, double dt,
                    PathSeed seed);

    const NoiseModel& model() const { return *model_; }
    std::size_t n_steps() const { return n_steps_; }
    double dt() const { return dt_; }
    PathSeed seed() const { return seed_; }

    /// The increment of step n (0-based). Cached for repeated access.
    const Increment& at(std::size_t n) const;

private:
    const NoiseModel* model_;
    std::size_t n_steps_;
    double dt_;
    PathSeed seed_;
    mutable Increment cache_;
    mutable std::size_t cached_step_ = static_cast<std::size_t>(-1);
};

IncrementStream sample_increments(const NoiseModel& model, std::size_t n_steps,
                                  double dt, PathSeed seed);

/// Ito pairing <phi, dW_n>: left-endpoint, trapezoid quadrature in space.
double pair_with(const SpatialGrid& grid, const GridVector& phi, const GridVector& dw);

/// Weighted variant with nodal weight w(x_i) (rho or 1+rho).
double pair_with(const SpatialGrid& grid, const GridVector& phi, const GridVector& dw,
                 const GridVector& weight);

/// Replay dump: versioned binary header followed by the raw increment
/// fields of every step.
void dump_increments(std::ostream& os, const IncrementStream& stream);
std::vector<GridVector> load_increments(std::istream& is, const NoiseModel& model);

std::uint64_t grid_hash(const SpatialGrid& grid);

} // namespace stw

#endif
