#include "stw/grid.hpp"

#include <cassert>
#include <stdexcept>

namespace stw {

SpatialGrid::SpatialGrid(double half_width, std::size_t n)
    : half_width_(half_width), n_(n) {
    if (half_width <= 0.0)
        throw std::invalid_argument("SpatialGrid: half_width must be positive");
    if (n < 3)
        throw std::invalid_argument("SpatialGrid: need at least 3 nodes");
    if (n % 2 == 0)
        throw std::invalid_argument("SpatialGrid: node count must be odd");
    dx_ = 2.0 * half_width / static_cast<double>(n - 1);
    x_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        x_[i] = -half_width + dx_ * static_cast<double>(i);
    x_[n - 1] = half_width; // exact endpoint
}

GridVector d1(const SpatialGrid& grid, const GridVector& h) {
    const std::size_t n = grid.size();
    const double dx = grid.dx();
    GridVector out(n);
    out[0] = (-3.0 * h[0] + 4.0 * h[1] - h[2]) / (2.0 * dx);
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (h[i + 1] - h[i - 1]) / (2.0 * dx);
    out[n - 1] = (3.0 * h[n - 1] - 4.0 * h[n - 2] + h[n - 3]) / (2.0 * dx);
    return out;
}

GridVector d2(const SpatialGrid& grid, const GridVector& h) {
    const std::size_t n = grid.size();
    const double dx2 = grid.dx() * grid.dx();
    GridVector out(n);
    out[0] = (2.0 * h[0] - 5.0 * h[1] + 4.0 * h[2] - h[3]) / dx2;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (h[i + 1] - 2.0 * h[i] + h[i - 1]) / dx2;
    out[n - 1] = (2.0 * h[n - 1] - 5.0 * h[n - 2] + 4.0 * h[n - 3] - h[n - 4]) / dx2;
    return out;
}

double inner_dx(const SpatialGrid& grid, const GridVector& u, const GridVector& v) {
    assert(u.size() == grid.size() && v.size() == grid.size());
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double term = u[i] * v[i] * grid.quad_weight(i);
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

double inner_weighted(const SpatialGrid& grid, const GridVector& u,
                      const GridVector& v, const GridVector& w) {
    assert(u.size() == grid.size() && v.size() == grid.size() && w.size() == grid.size());
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double term = u[i] * v[i] * w[i] * grid.quad_weight(i);
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

} // namespace stw
