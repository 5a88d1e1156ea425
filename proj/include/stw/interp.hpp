#ifndef STW_INTERP_HPP
#define STW_INTERP_HPP

#include "stw/grid.hpp"

namespace stw {

/// Nodal slopes for a shape-preserving cubic Hermite interpolant on a
/// uniform grid: fourth-order finite differences, then Fritsch-Carlson
/// limiting so the interpolant never overshoots monotone data. On smooth,
/// well-resolved data the limiter is inactive and fourth-order accuracy
/// is retained.
GridVector shape_preserving_slopes(const SpatialGrid& grid, const GridVector& y);

/// Evaluates the cubic Hermite interpolant defined by (y, slopes) at x,
/// clamped to the grid range.
double hermite_eval(const SpatialGrid& grid, const GridVector& y,
                    const GridVector& slopes, double x);

} // namespace stw

#endif
