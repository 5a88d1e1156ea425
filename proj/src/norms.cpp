#include "stw/norms.hpp"

#include <cmath>

namespace stw {

GridVector WeightedNormKit::rho_t(double shift) const {
    const SpatialGrid& g = profile_->grid();
    GridVector out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = profile_->rho_at(g.x(i) + shift);
    return out;
}

double WeightedNormKit::norm_l2(const GridVector& h) const {
    return std::sqrt(inner_dx(profile_->grid(), h, h));
}

double WeightedNormKit::norm_rho(const GridVector& h, const GridVector& rho) const {
    return std::sqrt(inner_weighted(profile_->grid(), h, h, rho));
}

double WeightedNormKit::norm_one_plus_rho(const GridVector& h,
                                          const GridVector& rho) const {
    const SpatialGrid& g = profile_->grid();
    return std::sqrt(inner_dx(g, h, h) + inner_weighted(g, h, h, rho));
}

double WeightedNormKit::norm_h1_one_plus_rho(const GridVector& h,
                                             const GridVector& rho) const {
    const SpatialGrid& g = profile_->grid();
    const GridVector dh = d1(g, h);
    const double flat = inner_dx(g, h, h) + inner_weighted(g, h, h, rho);
    const double grad = inner_dx(g, dh, dh) + inner_weighted(g, dh, dh, rho);
    return std::sqrt(flat + grad);
}

} // namespace stw
