#ifndef STW_TRIDIAG_HPP
#define STW_TRIDIAG_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stw {

/// Thomas solver for a constant-coefficient tridiagonal system
/// (lower, diag, upper) of fixed size. Factorization is cached so the
/// per-solve cost is two sweeps; used for the implicit diffusion step.
class TridiagSolver {
public:
    TridiagSolver() = default;

    TridiagSolver(std::size_t n, double lower, double diag, double upper)
        : n_(n), lower_(lower), upper_(upper), inv_pivot_(n) {
        if (n == 0) throw std::invalid_argument("TridiagSolver: empty system");
        // LU factorization pivots for the constant stencil
        double piv = diag;
        for (std::size_t i = 0; i < n; ++i) {
            if (piv == 0.0) throw std::runtime_error("TridiagSolver: zero pivot");
            inv_pivot_[i] = 1.0 / piv;
            if (i + 1 < n) piv = diag - lower * upper * inv_pivot_[i];
        }
    }

    std::size_t size() const { return n_; }

    /// Solves in place: rhs (length n) is overwritten by the solution.
    /// Stateless apart from the cached pivots, so concurrent solves on
    /// distinct right-hand sides are safe.
    void solve(double* rhs) const {
        // forward elimination
        for (std::size_t i = 1; i < n_; ++i)
            rhs[i] -= lower_ * inv_pivot_[i - 1] * rhs[i - 1];
        // back substitution
        rhs[n_ - 1] *= inv_pivot_[n_ - 1];
        for (std::size_t i = n_ - 1; i-- > 0;)
            rhs[i] = (rhs[i] - upper_ * rhs[i + 1]) * inv_pivot_[i];
    }

    void solve(std::vector<double>& rhs) const { solve(rhs.data()); }

private:
    std::size_t n_ = 0;
    double lower_ = 0.0, upper_ = 0.0;
    std::vector<double> inv_pivot_;
};

/// General (variable-coefficient) Thomas solve, single shot.
/// a = sub-diagonal (a[0] unused), b = diagonal, c = super-diagonal
/// (c[n-1] unused). rhs is overwritten with the solution.
void solve_tridiag(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& c, std::vector<double>& rhs);

} // namespace stw

#endif
