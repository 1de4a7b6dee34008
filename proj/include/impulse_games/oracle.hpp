#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "impulse_games/model.hpp"

namespace impulse_games {

/// Uniform truncated grid. The continuation band of the solved problem must
/// stay strictly interior, otherwise the solve reports GridTooSmallError.
struct Grid {
    double lo = 0;
    double hi = 0;
    int n = 0;

    double step() const { return (hi - lo) / (n - 1); }
    double x(int i) const { return lo + step() * i; }

    void validate() const;
};

/// Grid centered on the target level with half-width 3*u0, where u0 is the
/// same initial-guess heuristic the closed-form solvers use.
Grid default_grid(const GameParams& params, double m, int n = 1601);

/// Finite-difference solution of the stationary impulse-control QVI.
struct GridSolution {
    Grid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> action_mask;  ///< 1 where the intervention operator binds
    std::vector<int> jump_targets;          ///< argmin target index per point
    int iterations = 0;
    /// Largest pointwise increase of the value iterates across sweeps
    /// (policy iteration should be non-increasing up to roundoff).
    double monotone_violation = 0;

    /// First/last continuation abscissa (discrete band edges).
    double band_lo() const;
    double band_hi() const;
};

/// Intervention operator on tabulated values: for every grid point the
/// minimum of V(target) + impulse cost over all grid targets (the point
/// itself included, at the fixed cost of a null jump). Ties break toward the
/// smallest displacement.
std::pair<std::vector<double>, std::vector<int>> intervention_operator_grid(
    const std::vector<double>& values, const Grid& grid, const CostSpec& costs);

/// Policy iteration for min{LV - rV + C(x - alpha(m)), MV - V} = 0 with
/// linear-tail boundary conditions at the truncation ends.
GridSolution solve_qvi_grid(const GameParams& params, double m, const Grid& grid);

} // namespace impulse_games
