#include "impulse_games/model.hpp"

#include <cmath>
#include <stdexcept>

namespace impulse_games {

void GameParams::validate() const {
    const auto& cs = costs;
    auto require = [](bool ok, const char* what) {
        if (!ok) throw IllPosedError(what);
    };
    require(r > 0, "discount rate r must be > 0");
    require(sigma > 0, "volatility sigma must be > 0");
    require(cs.h > 0, "holding cost h must be > 0");
    require(cs.p > 0, "penalty cost p must be > 0");
    require(cs.K_plus > 0 && cs.K_minus > 0, "fixed costs K_plus, K_minus must be > 0");
    require(cs.k_plus > 0 && cs.k_minus > 0, "proportional costs k_plus, k_minus must be > 0");
    require(cs.c >= 0, "opponent cost c must be >= 0");
    require(std::abs(alpha_slope) < 1, "alpha must be a contraction (|slope| < 1)");
    // Well-posedness of the threshold systems: both pairings must be strict.
    require(cs.h - r * cs.k_minus > 0, "need h - r*k_minus > 0");
    require(cs.p - r * cs.k_plus > 0, "need p - r*k_plus > 0");
    require(cs.h - r * cs.k_plus > 0, "need h - r*k_plus > 0");
    require(cs.p - r * cs.k_minus > 0, "need p - r*k_minus > 0");
}

DerivedConstants derived_constants(const GameParams& params) {
    DerivedConstants out;
    out.h2 = params.costs.h / 2.0;
    out.sigma2 = std::sqrt(2.0) * params.sigma;
    out.lambda2 = std::sqrt(2.0 * params.r) / out.sigma2;
    out.lambda = std::sqrt(2.0 * params.r) / params.sigma;
    return out;
}

std::string to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::TwoPlayerSymmetric: return "two_player_symmetric";
        case ValueKind::TwoPlayerDictator: return "two_player_dictator";
        case ValueKind::TwoPlayerFollower: return "two_player_follower";
        case ValueKind::MfgAsymmetric: return "mfg_asymmetric";
        case ValueKind::SinglePlayer: return "single_player";
    }
    throw std::logic_error("unknown ValueKind");
}

ValueKind value_kind_from_string(const std::string& name) {
    if (name == "two_player_symmetric") return ValueKind::TwoPlayerSymmetric;
    if (name == "two_player_dictator") return ValueKind::TwoPlayerDictator;
    if (name == "two_player_follower") return ValueKind::TwoPlayerFollower;
    if (name == "mfg_asymmetric") return ValueKind::MfgAsymmetric;
    if (name == "single_player") return ValueKind::SinglePlayer;
    throw std::invalid_argument("unknown value kind: " + name);
}

namespace {

struct CoreCoeffs {
    double beta_up;    // linear slope of the branch on [0, u]
    double beta_down;  // linear slope of the branch on [d, 0] (negative of cost rate)
    double L;          // exponential rate
    double a1, a2;     // exp coefficients on [0, u]
    double b1, b2;     // exp coefficients on [d, 0]
};

CoreCoeffs core_coeffs(const PiecewiseValue& v) {
    const auto dc = derived_constants(v.params);
    CoreCoeffs cc{};
    if (v.kind == ValueKind::MfgAsymmetric || v.kind == ValueKind::SinglePlayer) {
        const double r = v.params.r;
        const double kappa = (v.params.costs.h + v.params.costs.p) / (2.0 * r * dc.lambda);
        cc.beta_up = v.params.costs.h / r;
        cc.beta_down = -v.params.costs.p / r;
        cc.L = dc.lambda;
        cc.a1 = v.c1;
        cc.a2 = v.c2;
        cc.b1 = v.c1 + kappa;
        cc.b2 = v.c2 - kappa;
    } else {
        const double beta = dc.h2 / v.params.r;
        cc.beta_up = beta;
        cc.beta_down = -beta;
        cc.L = dc.lambda2;
        cc.a1 = v.c1;
        cc.a2 = v.c2;
        cc.b1 = v.c1 + beta / dc.lambda2;
        cc.b2 = v.c2 - beta / dc.lambda2;
    }
    return cc;
}

double core_value(const CoreCoeffs& cc, double s) {
    if (s >= 0) return cc.beta_up * s + cc.a1 * std::exp(cc.L * s) + cc.a2 * std::exp(-cc.L * s);
    return cc.beta_down * s + cc.b1 * std::exp(cc.L * s) + cc.b2 * std::exp(-cc.L * s);
}

double core_slope(const CoreCoeffs& cc, double s) {
    if (s >= 0) return cc.beta_up + cc.L * (cc.a1 * std::exp(cc.L * s) - cc.a2 * std::exp(-cc.L * s));
    return cc.beta_down + cc.L * (cc.b1 * std::exp(cc.L * s) - cc.b2 * std::exp(-cc.L * s));
}

double core_curvature(const CoreCoeffs& cc, double s) {
    const double L2 = cc.L * cc.L;
    if (s >= 0) return L2 * (cc.a1 * std::exp(cc.L * s) + cc.a2 * std::exp(-cc.L * s));
    return L2 * (cc.b1 * std::exp(cc.L * s) + cc.b2 * std::exp(-cc.L * s));
}

void check_finite(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite evaluation point");
}

} // namespace

double PiecewiseValue::value(double x) const {
    check_finite(x);
    const double s = x - policy.center;
    const auto cc = core_coeffs(*this);
    const auto& cs = params.costs;
    switch (kind) {
        case ValueKind::TwoPlayerSymmetric:
            if (s >= policy.u) return core_value(cc, policy.u) + cs.k_minus * (s - policy.u);
            if (s <= policy.d) return core_value(cc, policy.d);  // flat: opponent acts at once
            return core_value(cc, s);
        case ValueKind::TwoPlayerDictator: {
            const double a = std::abs(s);
            if (a >= policy.u) return core_value(cc, policy.u) + cs.k_minus * (a - policy.u);
            return core_value(cc, a);
        }
        case ValueKind::TwoPlayerFollower: {
            const double a = std::abs(s);
            if (a >= policy.u) return core_value(cc, policy.u);
            return core_value(cc, a);
        }
        case ValueKind::MfgAsymmetric:
        case ValueKind::SinglePlayer:
            if (s >= policy.u) return core_value(cc, policy.u) + cs.k_minus * (s - policy.u);
            if (s <= policy.d) return core_value(cc, policy.d) + cs.k_plus * (policy.d - s);
            return core_value(cc, s);
    }
    throw std::logic_error("unknown ValueKind");
}

double PiecewiseValue::slope(double x) const {
    check_finite(x);
    const double s = x - policy.center;
    const auto cc = core_coeffs(*this);
    const auto& cs = params.costs;
    switch (kind) {
        case ValueKind::TwoPlayerSymmetric:
            if (s >= policy.u) return cs.k_minus;
            if (s <= policy.d) return 0.0;
            return core_slope(cc, s);
        case ValueKind::TwoPlayerDictator:
            if (s < 0) return -slope(2 * policy.center - x);
            if (s >= policy.u) return cs.k_minus;
            return core_slope(cc, s);
        case ValueKind::TwoPlayerFollower:
            if (s < 0) return -slope(2 * policy.center - x);
            if (s >= policy.u) return 0.0;
            return core_slope(cc, s);
        case ValueKind::MfgAsymmetric:
        case ValueKind::SinglePlayer:
            if (s >= policy.u) return cs.k_minus;
            if (s <= policy.d) return -cs.k_plus;
            return core_slope(cc, s);
    }
    throw std::logic_error("unknown ValueKind");
}

double PiecewiseValue::curvature(double x) const {
    check_finite(x);
    const double s = x - policy.center;
    const auto cc = core_coeffs(*this);
    switch (kind) {
        case ValueKind::TwoPlayerSymmetric:
            if (s >= policy.u || s <= policy.d) return 0.0;
            return core_curvature(cc, s);
        case ValueKind::TwoPlayerDictator:
        case ValueKind::TwoPlayerFollower: {
            const double a = std::abs(s);
            if (a >= policy.u) return 0.0;
            return core_curvature(cc, a);
        }
        case ValueKind::MfgAsymmetric:
        case ValueKind::SinglePlayer:
            if (s >= policy.u || s <= policy.d) return 0.0;
            return core_curvature(cc, s);
    }
    throw std::logic_error("unknown ValueKind");
}

double eval_value(const PiecewiseValue& v, double x) { return v.value(x); }
double eval_slope(const PiecewiseValue& v, double x) { return v.slope(x); }

} // namespace impulse_games
