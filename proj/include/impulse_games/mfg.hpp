#pragma once

#include "impulse_games/model.hpp"
#include "impulse_games/sim.hpp"
#include "impulse_games/solver.hpp"

namespace impulse_games {

/// Self-consistent policy/mean pair: the band is optimal against m_star and
/// the long-run mean of the controlled process reproduces m_star.
struct MfgSolution {
    BandPolicy policy;  ///< centered at alpha(m_star)
    double m_star = 0;
    int iterations = 0;
    double residual = 0;  ///< |Gamma(m_star) - m_star|
    PiecewiseValue value;
};

/// Jump-target mean offset (uD - dU)/(u - U + D - d) of the solved band.
/// Thresholds do not depend on m, so neither does the offset.
double mfg_mean_offset(const GameParams& params);

/// One application of the mean-update map: Gamma(m) = alpha(m) + offset.
double gamma_map(const GameParams& params, double m);

/// Picard iteration of Gamma from init_mean; the contraction |alpha'| < 1
/// makes the fixed point unique. The affine closed form (beta + offset)/(1 -
/// slope) is exercised by the tests as an independent cross-check.
MfgSolution solve_mfg(const GameParams& params, double init_mean);

struct MfgValidation {
    double mean_emp = 0;
    double mean_se = 0;
    double upper_fraction_emp = 0;
    double upper_fraction_se = 0;
    double p_upper_expected = 0;
    bool mean_ok = false;
    bool jumps_ok = false;
    bool pass = false;
};

/// Simulates a single mean-field agent under the solved policy and checks
/// the long-run mean against m_star and the upper-jump share against the
/// two-point chain limit, both at three standard errors.
MfgValidation validate_mfg_by_simulation(const MfgSolution& sol, const GameParams& params,
                                         const SimConfig& cfg);

} // namespace impulse_games
