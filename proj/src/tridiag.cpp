#include "stw/tridiag.hpp"

namespace stw {

void solve_tridiag(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& c, std::vector<double>& rhs) {
    const std::size_t n = b.size();
    if (n == 0 || a.size() != n || c.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiag: inconsistent sizes");
    std::vector<double> cp(n);
    double piv = b[0];
    if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
    cp[0] = c[0] / piv;
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = b[i] - a[i] * cp[i - 1];
        if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
        cp[i] = c[i] / piv;
        rhs[i] = (rhs[i] - a[i] * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] -= cp[i] * rhs[i + 1];
}

} // namespace stw
