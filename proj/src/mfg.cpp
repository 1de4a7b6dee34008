#include "impulse_games/mfg.hpp"

#include <cmath>
#include <stdexcept>

namespace impulse_games {

double mfg_mean_offset(const GameParams& params) {
    const SolveReport report = solve_mfg_thresholds(params, 0.0);
    if (!report.converged)
        throw std::runtime_error("mfg threshold solve did not converge (residual " +
                                 std::to_string(report.residual_norm) + ")");
    const auto& b = report.policy;
    return (b.u * b.D - b.d * b.U) / (b.u - b.U + b.D - b.d);
}

double gamma_map(const GameParams& params, double m) {
    return params.alpha(m) + mfg_mean_offset(params);
}

MfgSolution solve_mfg(const GameParams& params, double init_mean) {
    params.validate();
    const double offset = mfg_mean_offset(params);

    double m = init_mean;
    int iter = 0;
    double residual = std::abs(params.alpha(m) + offset - m);
    const int max_iter = 10000;
    while (residual > 1e-10 && iter < max_iter) {
        m = params.alpha(m) + offset;
        residual = std::abs(params.alpha(m) + offset - m);
        ++iter;
    }
    if (residual > 1e-10)
        throw std::runtime_error("mean fixed point did not converge; |alpha'| < 1 required");

    const SolveReport report = solve_mfg_thresholds(params, m);
    MfgSolution sol;
    sol.policy = report.policy;  // centered at alpha(m)
    sol.m_star = m;
    sol.iterations = iter;
    sol.residual = residual;
    sol.value = report.value;
    return sol;
}

MfgValidation validate_mfg_by_simulation(const MfgSolution& sol, const GameParams& params,
                                         const SimConfig& cfg_in) {
    SimConfig cfg = cfg_in;
    cfg.n_players = 1;
    cfg.coupling = SimConfig::Coupling::Centered;
    cfg.running_ref = SimConfig::RunningRef::PolicyCenter;
    cfg.priority_ref = sol.m_star;

    const SimStats stats = simulate_nplayer(params, {sol.policy}, cfg);
    const JumpChainLaw law = jump_chain_stationary(sol.policy);

    MfgValidation out;
    out.mean_emp = stats.long_run_mean;
    out.mean_se = stats.long_run_mean_se;
    out.upper_fraction_emp = stats.upper_jump_fraction;
    out.upper_fraction_se = stats.upper_jump_fraction_se;
    out.p_upper_expected = law.p_upper;
    out.mean_ok = std::abs(out.mean_emp - sol.m_star) <= 3.0 * out.mean_se;
    out.jumps_ok = std::abs(out.upper_fraction_emp - law.p_upper) <= 3.0 * out.upper_fraction_se;
    out.pass = out.mean_ok && out.jumps_ok;
    return out;
}

} // namespace impulse_games
