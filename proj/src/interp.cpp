#include "stw/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stw {

GridVector shape_preserving_slopes(const SpatialGrid& grid, const GridVector& y) {
    const std::size_t n = grid.size();
    if (y.size() != n)
        throw std::invalid_argument("shape_preserving_slopes: size mismatch");
    const double dx = grid.dx();
    GridVector m(n);

    m[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx);
    m[1] = (y[2] - y[0]) / (2.0 * dx);
    for (std::size_t i = 2; i + 2 < n; ++i)
        m[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * dx);
    m[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * dx);
    m[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dx);

    // Fritsch-Carlson limiting, interval by interval.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = (y[i + 1] - y[i]) / dx;
        if (d == 0.0) {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        double alpha = m[i] / d, beta = m[i + 1] / d;
        if (alpha < 0.0) { m[i] = 0.0; alpha = 0.0; }
        if (beta < 0.0) { m[i + 1] = 0.0; beta = 0.0; }
        const double s = alpha * alpha + beta * beta;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m[i] = tau * alpha * d;
            m[i + 1] = tau * beta * d;
        }
    }
    return m;
}

double hermite_eval(const SpatialGrid& grid, const GridVector& y,
                    const GridVector& slopes, double x) {
    const std::size_t n = grid.size();
    const double dx = grid.dx();
    double pos = (x - grid.x(0)) / dx;
    const double max_i = static_cast<double>(n - 2);
    pos = std::clamp(pos, 0.0, max_i + 1.0);
    auto i = static_cast<std::size_t>(std::min(pos, max_i));
    const double t = pos - static_cast<double>(i);

    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y[i] + h10 * dx * slopes[i] + h01 * y[i + 1] + h11 * dx * slopes[i + 1];
}

} // namespace stw
