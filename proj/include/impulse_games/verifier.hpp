#pragma once

#include <string>
#include <vector>

#include "impulse_games/model.hpp"

namespace impulse_games {

/// Outcome of a single equilibrium check. `location` is the state where the
/// worst violation occurs. Inapplicable checks (e.g. symmetry under
/// asymmetric costs) report applicable = false and pass.
struct CheckReport {
    std::string check;
    bool pass = true;
    bool applicable = true;
    double worst_violation = 0;
    double location = 0;
    std::string note;
};

struct QviReport {
    std::vector<CheckReport> checks;
    bool pass = true;
    double worst_violation = 0;
};

/// Verifies the QVI system on a dense window around the band:
///   (a) MV - V >= -tol on the kind's stated domain,
///   (b) |LV - rV + f| <= tol on the common continuation region,
///   (c) LV - rV + f >= -tol and MV - V <= tol inside the own action region
///       (the complementarity side of the QVI equation).
/// The intervention operator is evaluated by a coarse impulse scan followed
/// by golden-section refinement. tol defaults to 1e-6 scaled by (1 + sup|V|)
/// on the window.
QviReport check_qvi(const PiecewiseValue& value, int n_points = 4001, double tol = 1e-6);

/// Opponent (nonlocal equality) condition of the two-player systems:
/// NE-1: w1(-u) = w1(-U) + c; NE-2 follower: w2(u) = w2(U) + c.
CheckReport check_opponent_condition(const PiecewiseValue& value);

/// Symmetry of the value about the target level m, plus antisymmetry of the
/// optimal jump map. Applicable to symmetric cost specs only.
CheckReport check_symmetry(const PiecewiseValue& value, double m);

} // namespace impulse_games
