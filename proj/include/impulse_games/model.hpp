#pragma once

#include <cmath>
#include <string>

#include "impulse_games/errors.hpp"

namespace impulse_games {

/// Cost constants of the cash-management family. `plus` quantities price
/// upward impulses (applied at the lower boundary), `minus` quantities price
/// downward impulses (applied at the upper boundary). `c` is the lump cost a
/// player pays whenever an opponent intervenes; it is ignored in single-agent
/// settings.
struct CostSpec {
    double h = 0;        ///< holding-cost rate (per unit state per unit time)
    double p = 0;        ///< penalty-cost rate
    double K_plus = 0;   ///< fixed cost of an upward impulse
    double K_minus = 0;  ///< fixed cost of a downward impulse
    double k_plus = 0;   ///< proportional cost of an upward impulse
    double k_minus = 0;  ///< proportional cost of a downward impulse
    double c = 0;        ///< opponent-intervention cost (games only)

    bool symmetric() const {
        return h == p && K_plus == K_minus && k_plus == k_minus;
    }

    /// Impulse cost: K_plus + k_plus*d for d >= 0, K_minus - k_minus*d for d < 0.
    double impulse_cost(double delta) const {
        return delta >= 0 ? K_plus + k_plus * delta : K_minus - k_minus * delta;
    }

    /// Running cost C(y) = max{h*y, -p*y} of the centered state y.
    double running_cost(double y) const {
        return std::max(h * y, -p * y);
    }
};

/// Full parameter set of one problem instance. The affine target map is
/// alpha(m) = alpha_slope*m + alpha_intercept and must be a contraction.
struct GameParams {
    CostSpec costs;
    double r = 0;      ///< discount rate (per unit time)
    double sigma = 0;  ///< volatility (state units per sqrt-time)
    double alpha_slope = 0;
    double alpha_intercept = 0;

    double alpha(double m) const { return alpha_slope * m + alpha_intercept; }

    /// Throws IllPosedError unless all positivity/contraction/well-posedness
    /// conditions hold (including all four of h - r*k_minus > 0, p - r*k_plus > 0,
    /// h - r*k_plus > 0, p - r*k_minus > 0).
    void validate() const;
};

/// Constants derived from GameParams. lambda2 is the decay rate of the
/// two-player reduced coordinate s = x1 - x2 (volatility sqrt(2)*sigma);
/// lambda is the single-agent / mean-field rate.
struct DerivedConstants {
    double h2 = 0;       ///< h / 2
    double sigma2 = 0;   ///< sqrt(2) * sigma
    double lambda2 = 0;  ///< sqrt(2 r) / sigma2
    double lambda = 0;   ///< sqrt(2 r) / sigma
};

DerivedConstants derived_constants(const GameParams& params);

/// Threshold-characterized impulse strategy in centered coordinates: act when
/// the centered state leaves (d, u); jump to D from below, to U from above.
/// `center` is the only state offset (alpha(m) for the MFG, 0 for the reduced
/// two-player coordinate).
struct BandPolicy {
    double d = 0;  ///< lower action threshold
    double D = 0;  ///< lower jump target
    double U = 0;  ///< upper jump target
    double u = 0;  ///< upper action threshold
    double center = 0;

    bool ordered() const { return d < D && D < 0 && 0 < U && U < u; }

    /// True when the absolute state x is in the action region.
    bool in_action(double x) const {
        const double s = x - center;
        return s <= d || s >= u;
    }

    /// Post-jump absolute state for an acting player at absolute state x.
    double jump_target(double x) const {
        return x - center >= u ? center + U : center + D;
    }

    /// Thresholds scaled by a common factor (same center).
    BandPolicy scaled(double factor) const {
        return {d * factor, D * factor, U * factor, u * factor, center};
    }

    BandPolicy recentered(double new_center) const {
        return {d, D, U, u, new_center};
    }
};

enum class ValueKind {
    TwoPlayerSymmetric,  ///< NE-1 payoff w1 of the symmetric duopoly
    TwoPlayerDictator,   ///< NE-2 payoff of the player controlling both sides
    TwoPlayerFollower,   ///< NE-2 payoff of the player who never intervenes
    MfgAsymmetric,       ///< mean-field value, generic cost structure
    SinglePlayer,        ///< monopoly value (same closed form as MfgAsymmetric)
};

std::string to_string(ValueKind kind);
ValueKind value_kind_from_string(const std::string& name);

/// Closed-form piecewise value function: exponential core on the band,
/// linear tails beyond the action thresholds. Tails are evaluated through the
/// value-matching lines anchored at the core, so the function is continuous
/// for any coefficients; smooth fit at the thresholds holds only for solved
/// coefficient sets.
///
/// Core branch on [0, u] (centered): beta*s + c1*e^{L s} + c2*e^{-L s} where
///   - two-player kinds: beta = h2/r, L = lambda2,
///   - MFG/single-player: beta = h/r, L = lambda.
/// The branch on [d, 0] uses the shifted coefficients
/// (c1 + kappa, c2 - kappa) with kappa = h2/(r*lambda2) resp. (h+p)/(2 r lambda).
/// Dictator and follower values are even; their stored c2 equals c1 + kappa.
struct PiecewiseValue {
    ValueKind kind = ValueKind::SinglePlayer;
    double c1 = 0;
    double c2 = 0;
    BandPolicy policy;
    GameParams params;

    double value(double x) const;   ///< closed-form value at absolute state x
    double slope(double x) const;   ///< analytic first derivative
    double curvature(double x) const;  ///< analytic second derivative
};

/// Pointwise evaluation (free-function form). Throws std::invalid_argument on
/// non-finite input.
double eval_value(const PiecewiseValue& v, double x);
double eval_slope(const PiecewiseValue& v, double x);

} // namespace impulse_games
