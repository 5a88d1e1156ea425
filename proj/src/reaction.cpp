#include "stw/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stw {

ReactionFunction nagumo(double a) {
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("nagumo: a must lie in (0,1)");
    ReactionFunction r;
    r.a = a;
    // f(v) = v(1-v)(v-a) = -v^3 + (1+a)v^2 - a v
    r.f = [a](double v) { return v * (1.0 - v) * (v - a); };
    r.f1 = [a](double v) { return -3.0 * v * v + 2.0 * (1.0 + a) * v - a; };
    r.f2 = [a](double v) { return -6.0 * v + 2.0 * (1.0 + a); };
    r.f3 = [](double) { return -6.0; };

    // sup f' is attained at v = (1+a)/3
    r.eta1 = (a * a - a + 1.0) / 3.0;
    // |f'(xi)| <= (4+a)(1+xi^2) with xi between the arguments
    r.l_lip = 4.0 + a;
    // remainder ((1+a)-3v)u^2 - u^3, v in [0,1]
    r.eta2 = std::max(1.0 + a, 2.0 - a);
    // growth of f' and its increments, v in [0,1]
    r.eta3 = 9.0 + 4.0 * a;
    r.exact_constants = true;
    return r;
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

std::vector<double> linspace(double lo, double hi, double spacing) {
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / spacing)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

} // namespace

AssumptionReport check_assumptions(const ReactionFunction& rf, const AssumptionGrid& g) {
    AssumptionReport report;
    report.constants_estimated = !rf.exact_constants;
    const double a = rf.a;

    // A1: zeros of f at 0, a, 1
    {
        AssumptionCheck c{"A1-zeros", false, 0.0, 0.0, 0.0};
        double worst = 0.0, at = 0.0;
        for (double v : {0.0, a, 1.0}) {
            const double fv = std::abs(rf.f(v));
            if (fv > worst) { worst = fv; at = v; }
        }
        c.worst_value = worst;
        c.worst_v = at;
        c.passed = worst <= 1e-12 && a > 0.0 && a < 1.0;
        report.checks.push_back(c);
    }

    // A1: sign pattern of f and f' at the three zeros
    {
        AssumptionCheck c{"A1-signs", true, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        const auto vs = linspace(0.0, 1.0, g.spacing);
        const double margin = 2.0 * g.spacing; // keep clear of the zeros
        for (double v : vs) {
            double signed_ok = std::numeric_limits<double>::infinity();
            if (v > margin && v < a - margin) signed_ok = -rf.f(v);
            else if (v > a + margin && v < 1.0 - margin) signed_ok = rf.f(v);
            if (signed_ok < c.worst_value) { c.worst_value = signed_ok; c.worst_v = v; }
        }
        c.worst_value = std::min({c.worst_value, -rf.f1(0.0), rf.f1(a), -rf.f1(1.0)});
        c.passed = c.worst_value > 0.0;
        report.checks.push_back(c);
    }

    // A1: integral of f over [0,1] nonnegative
    {
        AssumptionCheck c{"A1-integral", false, 0.0, 0.0, 0.0};
        const auto vs = linspace(0.0, 1.0, std::min(g.spacing, 1e-3));
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < vs.size(); ++i)
            acc += 0.5 * (rf.f(vs[i]) + rf.f(vs[i + 1])) * (vs[i + 1] - vs[i]);
        c.worst_value = acc;
        c.passed = acc >= -1e-12;
        report.checks.push_back(c);
    }

    // A2: curvature at the stable zeros
    {
        AssumptionCheck c{"A2", false, 0.0, 0.0, 0.0};
        c.worst_value = std::min(rf.f2(0.0), -rf.f2(1.0));
        c.passed = c.worst_value > 0.0;
        report.checks.push_back(c);
    }

    const auto us = linspace(g.u_min, g.u_max, g.spacing);
    const auto vs = linspace(g.v_min, g.v_max, g.spacing);

    // B1: f' bounded from above. On a finite grid an interior argmax is the
    // boundedness signal; a boundary argmax indicates growth.
    {
        AssumptionCheck c{"B1", false, 0.0, 0.0, 0.0};
        double sup = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            const double d = rf.f1(us[i]);
            if (d > sup) { sup = d; arg = i; }
        }
        c.worst_value = sup;
        c.worst_u = us[arg];
        const bool interior = arg != 0 && arg != us.size() - 1;
        c.passed = interior && (!rf.exact_constants || sup <= rf.eta1 + 1e-9);
        report.checks.push_back(c);
    }

    // B2: cubic-growth Lipschitz bound on sampled pairs
    {
        AssumptionCheck c{"B2", false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        const double step = std::max(g.spacing, (g.u_max - g.u_min) / 120.0);
        const auto xs = linspace(g.u_min, g.u_max, step);
        const double L = rf.l_lip;
        for (double x1 : xs)
            for (double x2 : xs) {
                if (x1 == x2) continue;
                const double lhs = std::abs(rf.f(x1) - rf.f(x2));
                const double rhs = L * std::abs(x1 - x2) * (1.0 + x1 * x1 + x2 * x2);
                if (rhs - lhs < c.worst_value) {
                    c.worst_value = rhs - lhs;
                    c.worst_u = x1;
                    c.worst_v = x2;
                }
            }
        c.passed = c.worst_value >= -1e-10;
        report.checks.push_back(c);
    }

    // B3: Taylor remainder bound
    {
        AssumptionCheck c{"B3", false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        for (double u : us) {
            if (u == 0.0) continue;
            for (double v : vs) {
                const double lhs = std::abs(rf.f(u + v) - rf.f(v) - rf.f1(v) * u);
                const double rhs = rf.eta2 * (1.0 + std::abs(u)) * u * u;
                if (rhs - lhs < c.worst_value) {
                    c.worst_value = rhs - lhs;
                    c.worst_u = u;
                    c.worst_v = v;
                }
            }
        }
        c.passed = c.worst_value >= -1e-10;
        report.checks.push_back(c);
    }

    // B4: growth of f' and of its increments
    {
        AssumptionCheck c{"B4", false, std::numeric_limits<double>::infinity(), 0.0, 0.0};
        for (double u : us)
            for (double v : vs) {
                const double m1 =
                    rf.eta3 * (1.0 + u * u) - std::abs(rf.f1(u + v));
                const double m2 =
                    rf.eta3 * (std::abs(u) + u * u) - std::abs(rf.f1(u + v) - rf.f1(v));
                const double m = std::min(m1, m2);
                if (m < c.worst_value) {
                    c.worst_value = m;
                    c.worst_u = u;
                    c.worst_v = v;
                }
            }
        c.passed = c.worst_value >= -1e-10;
        report.checks.push_back(c);
    }

    report.all_passed = std::all_of(report.checks.begin(), report.checks.end(),
                                    [](const AssumptionCheck& c) { return c.passed; });
    return report;
}

} // namespace stw
