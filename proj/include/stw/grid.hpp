#ifndef STW_GRID_HPP
#define STW_GRID_HPP

#include <cstddef>
#include <vector>

namespace stw {

using GridVector = std::vector<double>;

/// Uniform 1D grid on [-L, L]. The point count is odd so that x = 0 is a
/// node, which is where the wave front is pinned.
class SpatialGrid {
public:
    SpatialGrid(double half_width, std::size_t n);

    double half_width() const { return half_width_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    const GridVector& x() const { return x_; }
    double x(std::size_t i) const { return x_[i]; }
    std::size_t center_index() const { return (n_ - 1) / 2; }

    /// Trapezoid quadrature weight of node i.
    double quad_weight(std::size_t i) const {
        return (i == 0 || i == n_ - 1) ? 0.5 * dx_ : dx_;
    }

    bool same_as(const SpatialGrid& other) const {
        return n_ == other.n_ && half_width_ == other.half_width_;
    }

private:
    double half_width_;
    std::size_t n_;
    double dx_;
    GridVector x_;
};

/// Second-order first derivative: central in the interior, one-sided at the
/// two boundary nodes.
GridVector d1(const SpatialGrid& grid, const GridVector& h);

/// Second-order second derivative, analogous boundary treatment.
GridVector d2(const SpatialGrid& grid, const GridVector& h);

/// Trapezoid inner product in L^2(dx).
double inner_dx(const SpatialGrid& grid, const GridVector& u, const GridVector& v);

/// Trapezoid inner product against a nodal weight w(x_i).
double inner_weighted(const SpatialGrid& grid, const GridVector& u,
                      const GridVector& v, const GridVector& w);

} // namespace stw

#endif
