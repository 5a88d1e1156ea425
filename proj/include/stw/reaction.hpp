#ifndef STW_REACTION_HPP
#define STW_REACTION_HPP

#include <functional>
#include <string>
#include <vector>

namespace stw {

/// Bistable reaction function f with derivatives and the structural
/// constants used by the well-posedness conditions. Immutable after
/// construction; safe to share across threads.
struct ReactionFunction {
    std::function<double(double)> f;
    std::function<double(double)> f1; ///< f'
    std::function<double(double)> f2; ///< f''
    std::function<double(double)> f3; ///< f'''

    double a = 0.5;      ///< interior unstable zero in (0,1)
    double eta1 = 0.0;   ///< sup of f' (one-sided bound)
    double l_lip = 0.0;  ///< cubic-growth Lipschitz constant
    double eta2 = 0.0;   ///< Taylor-remainder constant
    double eta3 = 0.0;   ///< derivative-growth constant

    /// true when the constants were computed in closed form (cubic case);
    /// false when they are grid-supremum estimates for a user-supplied f.
    bool exact_constants = false;
};

/// The Nagumo cubic f(v) = v(1-v)(v-a) with exact polynomial derivatives
/// and closed-form structural constants. Rejects a outside (0,1).
ReactionFunction nagumo(double a);

struct AssumptionCheck {
    std::string name;     // "A1-zeros", "A1-signs", "A1-integral", "A2", "B1".."B4"
    bool passed = false;
    double worst_value = 0.0; // signed margin; negative means violated
    double worst_u = 0.0;     // worst offending point (u component, 0 if unused)
    double worst_v = 0.0;     // worst offending point (v component)
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_passed = false;
    bool constants_estimated = false; // constants were grid estimates
    const AssumptionCheck* find(const std::string& name) const;
};

struct AssumptionGrid {
    double u_min = -3.0, u_max = 3.0;
    double v_min = 0.0, v_max = 1.0;
    double spacing = 1e-2;
};

/// Samples the structural conditions A1, A2, B1-B4 on a finite grid.
/// Violations are reported, never thrown.
AssumptionReport check_assumptions(const ReactionFunction& f,
                                   const AssumptionGrid& grid = {});

} // namespace stw

#endif
