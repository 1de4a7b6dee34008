#pragma once

#include <cstdint>
#include <vector>

#include "impulse_games/model.hpp"

namespace impulse_games {

/// Initial state distribution; symmetric choices satisfy the symmetric-init
/// assumption. Draws are truncated to the interior of each player's band
/// (the mean-field approximation assumes in-band starts).
struct InitDist {
    enum class Kind { Point, Uniform, Gaussian };
    Kind kind = Kind::Point;
    double a = 0;  ///< point value | uniform lower end | gaussian mean
    double b = 0;  ///< unused     | uniform upper end  | gaussian std dev

    double mean() const { return kind == Kind::Uniform ? 0.5 * (a + b) : a; }
};

struct SimConfig {
    int n_players = 1;
    double dt = 1e-4;
    double horizon = 0;  ///< <= 0: choose T with e^{-rT} < 1e-6
    std::int64_t n_paths = 1000;
    std::uint64_t seed = 1;
    InitDist init;

    /// How policies read the state: Centered applies each player's band to
    /// x_i - center (the mean-field / single-agent games); Difference applies
    /// it to the two-player coordinate s_i = x_i - x_j.
    enum class Coupling { Centered, Difference };
    Coupling coupling = Coupling::Centered;
    bool dictator = false;  ///< Difference mode: player 1 controls both sides

    /// Reference used by the running cost in (defJ):
    /// the empirical mean (the N-player game) or the policy center (the
    /// single-agent problem a mean-field player faces).
    enum class RunningRef { PolicyCenter, EmpiricalMean };
    RunningRef running_ref = RunningRef::PolicyCenter;

    double priority_ref = 0;  ///< m* of the priority sets P_i
    int threads = 0;          ///< 0: IMPULSE_GAMES_THREADS, else hardware
    int cascade_cap = 64;
    bool validate_confinement = false;
    bool record_events = false;  ///< keep the event log of path 0
};

struct SimEvent {
    double time;
    int player;
    double pre_state;
    double impulse;
};

struct PlayerStats {
    double cost_mean = 0;
    double cost_se = 0;
    double running_mean = 0;
    double own_mean = 0;
    double opp_mean = 0;
    double terminal_mean = 0;
    double terminal_se = 0;
    double interventions_mean = 0;
    std::int64_t jumps_to_upper = 0;
    std::int64_t jumps_to_lower = 0;
};

struct SimStats {
    std::int64_t n_paths = 0;
    int n_players = 0;
    double horizon = 0;
    double dt = 0;
    std::vector<PlayerStats> players;
    double upper_jump_fraction = 0;     ///< pooled share of jumps landing at U
    double upper_jump_fraction_se = 0;  ///< across per-path fractions
    double long_run_mean = 0;           ///< terminal states pooled over players
    double long_run_mean_se = 0;
    double tail_bound = 0;  ///< bound on the discounted running cost beyond T
    std::vector<double> path_cost_p1;  ///< per-path total cost of player 1
    std::vector<SimEvent> events;      ///< path 0 only, when recorded
};

/// Monte Carlo of the N-player controlled process under band strategies.
/// Simultaneous would-be interventions are resolved by the priority rule
/// (farthest from priority_ref acts, ties to the lowest index); impulses at
/// the same instant cascade, capped by cascade_cap (CascadeOverflowError).
SimStats simulate_nplayer(const GameParams& params, const std::vector<BandPolicy>& policies,
                          const SimConfig& cfg);

/// Closed-form law of the jump-target chain of a band policy.
struct JumpChainLaw {
    double q1;             ///< P(next target U | at U) = (U-d)/(u-d)
    double q2;             ///< P(next target U | at D) = (D-d)/(u-d)
    double p_upper;        ///< stationary upper-target probability
    double long_run_mean;  ///< center + (uD - dU)/(u - U + D - d)
};

JumpChainLaw jump_chain_stationary(const BandPolicy& policy);

/// One point of the epsilon-Nash experiment.
struct GapPoint {
    int n_players;
    double gap;      ///< max(0, J1(equilibrium) - min over deviations)
    double se;       ///< standard error of the selected difference
    double j_base;   ///< J1 under the candidate equilibrium profile
    double j_best;   ///< J1 under the best deviation
    double best_scale;
};

struct GapCurve {
    std::vector<GapPoint> points;
    double fitted_slope = 0;  ///< log-log slope of gap vs N
    std::vector<double> scales;
};

/// Estimates the unilateral-deviation gap for player 1 across population
/// sizes, with common random numbers across the deviation family (bands with
/// thresholds scaled by `scales`).
GapCurve epsilon_nash_gap(const GameParams& params, const BandPolicy& mfg_policy,
                          const std::vector<int>& n_values, const std::vector<double>& scales,
                          const SimConfig& cfg);

} // namespace impulse_games
