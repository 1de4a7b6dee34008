#pragma once

#include <stdexcept>
#include <string>

namespace impulse_games {

/// Parameter set violates a well-posedness condition (e.g. h/2 - r*k <= 0).
struct IllPosedError : std::invalid_argument {
    explicit IllPosedError(const std::string& what) : std::invalid_argument(what) {}
};

/// The computed continuation band touches the truncation boundary of the grid.
struct GridTooSmallError : std::runtime_error {
    explicit GridTooSmallError(const std::string& what) : std::runtime_error(what) {}
};

/// More same-instant interventions than the cascade cap allows; the policy
/// set almost certainly violates the no-accumulation condition.
struct CascadeOverflowError : std::runtime_error {
    explicit CascadeOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// Band with u - d below resolvable width.
struct DegenerateBandError : std::invalid_argument {
    explicit DegenerateBandError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace impulse_games
