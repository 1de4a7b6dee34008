#pragma once

#include <optional>

#include "impulse_games/model.hpp"

namespace impulse_games {

/// Result of a threshold solve. `value` is the piecewise value of the solved
/// player (w1 for the two-player systems); NE-2 additionally carries the
/// follower value. When converged is false the fields hold the best iterate.
struct SolveReport {
    BandPolicy policy;
    PiecewiseValue value;
    std::optional<PiecewiseValue> follower;
    double residual_norm = 0;
    int iterations = 0;
    bool converged = false;
};

/// Residual tolerance (infinity norm) of the threshold solvers.
inline constexpr double kSolverTol = 1e-12;

/// NE-1: symmetric duopoly band (c1, c2, U, u) from smooth fit at U and u,
/// value matching at u and the opponent condition at -u. Requires symmetric
/// costs with h/2 - r*k > 0 and c > 0. Throws IllPosedError when the
/// preconditions fail.
SolveReport solve_two_player_symmetric(const GameParams& params);

/// NE-2: dictator value (c1, U, u) plus the follower value. Same
/// preconditions as NE-1.
SolveReport solve_two_player_dictator(const GameParams& params);

/// Six-unknown mean-field threshold system (c1, c2, d, D, U, u), centered at
/// alpha(m). The thresholds depend only on the cost constants, never on m.
SolveReport solve_mfg_thresholds(const GameParams& params, double m);

/// Monopoly baseline: the same system with the target map pinned to zero.
SolveReport solve_single_player(const GameParams& params);

} // namespace impulse_games
