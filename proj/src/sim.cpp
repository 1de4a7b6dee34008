#include "impulse_games/sim.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "impulse_games/errors.hpp"
#include "impulse_games/rng.hpp"

namespace impulse_games {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("IMPULSE_GAMES_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(path) over [0, n_paths) on a small pool. Each path writes only its
// own output slots, so the aggregation stays deterministic.
template <class Fn>
void parallel_paths(std::int64_t n_paths, int threads, Fn&& fn) {
    threads = std::min<std::int64_t>(threads, std::max<std::int64_t>(1, n_paths));
    if (threads <= 1) {
        for (std::int64_t p = 0; p < n_paths; ++p) fn(p);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t p = next.fetch_add(1);
            if (p >= n_paths) return;
            try {
                fn(p);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct Kahan {
    double sum = 0;
    double carry = 0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Per-path, per-player accumulation written into flat slot arrays.
struct PathSlots {
    std::vector<double> total, running, own, opp, terminal;
    std::vector<double> interventions;
    std::vector<double> to_upper, to_lower;

    PathSlots(std::int64_t paths, int players) {
        const size_t n = static_cast<size_t>(paths) * players;
        total.assign(n, 0);
        running.assign(n, 0);
        own.assign(n, 0);
        opp.assign(n, 0);
        terminal.assign(n, 0);
        interventions.assign(n, 0);
        to_upper.assign(n, 0);
        to_lower.assign(n, 0);
    }
};

double draw_init(const InitDist& init, std::uint64_t seed, std::uint64_t path, int player) {
    // Separate stream tag for initial draws (top bit of the player word).
    const std::uint32_t tag = static_cast<std::uint32_t>(player) | 0x80000000u;
    switch (init.kind) {
        case InitDist::Kind::Point:
            return init.a;
        case InitDist::Kind::Uniform: {
            const auto u = uniform_pair(seed, path, tag, 0);
            return init.a + (init.b - init.a) * u[0];
        }
        case InitDist::Kind::Gaussian: {
            const auto z = normal_pair(seed, path, tag, 0);
            return init.a + init.b * z[0];
        }
    }
    throw std::logic_error("unknown InitDist::Kind");
}

struct SideRule {
    bool upper = true;
    bool lower = true;
};

} // namespace

SimStats simulate_nplayer(const GameParams& params, const std::vector<BandPolicy>& policies_in,
                          const SimConfig& cfg) {
    params.validate();
    if (cfg.n_players < 1) throw std::invalid_argument("need at least one player");
    if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be > 0");
    if (cfg.n_paths < 1) throw std::invalid_argument("need at least one path");

    const int N = cfg.n_players;
    std::vector<BandPolicy> policies = policies_in;
    if (static_cast<int>(policies.size()) == 1 && N > 1) policies.assign(N, policies_in[0]);
    if (static_cast<int>(policies.size()) != N)
        throw std::invalid_argument("one policy per player required");
    for (const auto& b : policies)
        if (!b.ordered()) throw std::invalid_argument("policy thresholds must satisfy d<D<0<U<u");

    const bool difference = cfg.coupling == SimConfig::Coupling::Difference;
    if (difference && N != 2)
        throw std::invalid_argument("difference coupling is a two-player reduction");

    // Which side of the own band each player triggers on. In the difference
    // game the lower side of s_i = x_i - x_j is the opponent's upper side.
    std::vector<SideRule> sides(N);
    if (difference) {
        if (cfg.dictator) {
            sides[0] = {true, true};
            sides[1] = {false, false};
        } else {
            sides[0] = {true, false};
            sides[1] = {true, false};
        }
    }

    const double T = cfg.horizon > 0 ? cfg.horizon : std::log(1e6) / params.r;
    const std::int64_t n_steps = static_cast<std::int64_t>(std::ceil(T / cfg.dt));
    const double horizon = n_steps * cfg.dt;
    const double sqrt_dt = std::sqrt(cfg.dt);
    const double decay = std::exp(-params.r * cfg.dt);
    const auto& costs = params.costs;

    SimStats stats;
    stats.n_paths = cfg.n_paths;
    stats.n_players = N;
    stats.horizon = horizon;
    stats.dt = cfg.dt;
    {
        double width = 0;
        for (const auto& b : policies) width = std::max(width, b.u - b.d);
        stats.tail_bound =
            std::exp(-params.r * horizon) * std::max(costs.h, costs.p) * width / params.r;
    }

    PathSlots slots(cfg.n_paths, N);
    std::vector<SimEvent> events;

    auto run_path = [&](std::int64_t path) {
        std::vector<NormalStream> streams;
        streams.reserve(N);
        for (int i = 0; i < N; ++i)
            streams.emplace_back(cfg.seed, static_cast<std::uint64_t>(path),
                                 static_cast<std::uint32_t>(i));

        std::vector<double> x(N);
        for (int i = 0; i < N; ++i) {
            double v = draw_init(cfg.init, cfg.seed, path, i);
            if (!difference) {
                // Keep initial draws inside the band interior.
                const auto& b = policies[i];
                v = std::clamp(v, b.center + b.d + 1e-9, b.center + b.u - 1e-9);
            }
            x[i] = v;
        }

        std::vector<Kahan> run_acc(N), own_acc(N), opp_acc(N);
        std::vector<double> interv(N, 0), up(N, 0), down(N, 0);

        // Centered state of player i as read by her policy.
        auto centered = [&](int i) {
            return difference ? x[i] - x[1 - i] - policies[i].center
                              : x[i] - policies[i].center;
        };
        auto wants_to_act = [&](int i) {
            const double s = centered(i);
            if (difference) {
                const auto& rule = sides[i];
                return (rule.upper && s >= policies[i].u) || (rule.lower && s <= policies[i].d);
            }
            return s <= policies[i].d || s >= policies[i].u;
        };

        auto cascade = [&](double disc, double time) {
            for (int round = 0; round < cfg.cascade_cap + 1; ++round) {
                int actor = -1;
                double best_dist = -1;
                for (int i = 0; i < N; ++i) {
                    if (!wants_to_act(i)) continue;
                    const double dist = std::abs(x[i] - cfg.priority_ref);
                    if (dist > best_dist) {
                        actor = i;
                        best_dist = dist;
                    }
                }
                if (actor < 0) return;
                if (round == cfg.cascade_cap)
                    throw CascadeOverflowError(
                        "more simultaneous interventions than the cascade cap");
                const double s = centered(actor);
                const auto& b = policies[actor];
                const double target_s = s >= b.u ? b.U : b.D;
                const double pre = x[actor];
                const double base = difference ? x[1 - actor] + b.center : b.center;
                const double post = base + target_s;
                const double delta = post - pre;
                x[actor] = post;
                own_acc[actor].add(disc * costs.impulse_cost(delta));
                for (int j = 0; j < N; ++j)
                    if (j != actor) opp_acc[j].add(disc * costs.c);
                interv[actor] += 1;
                (target_s == b.U ? up : down)[actor] += 1;
                if (cfg.record_events && path == 0)
                    events.push_back({time, actor, pre, delta});
            }
        };

        cascade(1.0, 0.0);

        double disc = 1.0;
        for (std::int64_t step = 0; step < n_steps; ++step) {
            // Running cost of the step, state taken right-continuous.
            double ref_mean = 0;
            if (cfg.running_ref == SimConfig::RunningRef::EmpiricalMean || difference) {
                for (int i = 0; i < N; ++i) ref_mean += x[i];
                ref_mean /= N;
            }
            for (int i = 0; i < N; ++i) {
                const double y = (cfg.running_ref == SimConfig::RunningRef::EmpiricalMean ||
                                  difference)
                                     ? x[i] - ref_mean
                                     : x[i] - policies[i].center;
                run_acc[i].add(disc * costs.running_cost(y) * cfg.dt);
            }

            for (int i = 0; i < N; ++i) x[i] += params.sigma * sqrt_dt * streams[i].next();
            disc *= decay;
            cascade(disc, (step + 1) * cfg.dt);

            if (cfg.validate_confinement) {
                for (int i = 0; i < N; ++i) {
                    const double s = centered(i);
                    const bool confined = difference
                                              ? true  // opponent side handled by the pair
                                              : (s > policies[i].d && s < policies[i].u);
                    if (!confined && wants_to_act(i))
                        throw std::runtime_error("state left in an action region after cascade");
                }
            }
        }

        const size_t base_slot = static_cast<size_t>(path) * N;
        for (int i = 0; i < N; ++i) {
            slots.running[base_slot + i] = run_acc[i].sum;
            slots.own[base_slot + i] = own_acc[i].sum;
            slots.opp[base_slot + i] = opp_acc[i].sum;
            slots.total[base_slot + i] = run_acc[i].sum + own_acc[i].sum + opp_acc[i].sum;
            slots.terminal[base_slot + i] = x[i];
            slots.interventions[base_slot + i] = interv[i];
            slots.to_upper[base_slot + i] = up[i];
            slots.to_lower[base_slot + i] = down[i];
        }
    };

    parallel_paths(cfg.n_paths, resolve_threads(cfg.threads), run_path);

    // Deterministic reduction in path order.
    stats.players.assign(N, PlayerStats{});
    stats.path_cost_p1.resize(cfg.n_paths);
    const double P = static_cast<double>(cfg.n_paths);
    for (int i = 0; i < N; ++i) {
        Kahan total, running, own, opp, terminal, interv;
        for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
            const size_t slot = static_cast<size_t>(p) * N + i;
            total.add(slots.total[slot]);
            running.add(slots.running[slot]);
            own.add(slots.own[slot]);
            opp.add(slots.opp[slot]);
            terminal.add(slots.terminal[slot]);
            interv.add(slots.interventions[slot]);
            stats.players[i].jumps_to_upper += static_cast<std::int64_t>(slots.to_upper[slot]);
            stats.players[i].jumps_to_lower += static_cast<std::int64_t>(slots.to_lower[slot]);
        }
        auto& ps = stats.players[i];
        ps.cost_mean = total.sum / P;
        ps.running_mean = running.sum / P;
        ps.own_mean = own.sum / P;
        ps.opp_mean = opp.sum / P;
        ps.terminal_mean = terminal.sum / P;
        ps.interventions_mean = interv.sum / P;
        Kahan var_cost, var_term;
        for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
            const size_t slot = static_cast<size_t>(p) * N + i;
            const double dc = slots.total[slot] - ps.cost_mean;
            const double dtm = slots.terminal[slot] - ps.terminal_mean;
            var_cost.add(dc * dc);
            var_term.add(dtm * dtm);
        }
        if (cfg.n_paths > 1) {
            ps.cost_se = std::sqrt(var_cost.sum / (P - 1) / P);
            ps.terminal_se = std::sqrt(var_term.sum / (P - 1) / P);
        }
    }
    for (std::int64_t p = 0; p < cfg.n_paths; ++p)
        stats.path_cost_p1[p] = slots.total[static_cast<size_t>(p) * N];

    // Pooled jump-target law and long-run mean with per-path standard errors.
    {
        Kahan frac_sum, frac_sq, mean_sum, mean_sq;
        std::int64_t paths_with_jumps = 0;
        for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
            double ups = 0, downs = 0, term = 0;
            for (int i = 0; i < N; ++i) {
                const size_t slot = static_cast<size_t>(p) * N + i;
                ups += slots.to_upper[slot];
                downs += slots.to_lower[slot];
                term += slots.terminal[slot];
            }
            term /= N;
            mean_sum.add(term);
            mean_sq.add(term * term);
            if (ups + downs > 0) {
                const double f = ups / (ups + downs);
                frac_sum.add(f);
                frac_sq.add(f * f);
                ++paths_with_jumps;
            }
        }
        stats.long_run_mean = mean_sum.sum / P;
        if (cfg.n_paths > 1) {
            const double var =
                std::max(0.0, (mean_sq.sum - P * stats.long_run_mean * stats.long_run_mean) /
                                  (P - 1));
            stats.long_run_mean_se = std::sqrt(var / P);
        }
        if (paths_with_jumps > 0) {
            const double M = static_cast<double>(paths_with_jumps);
            stats.upper_jump_fraction = frac_sum.sum / M;
            if (paths_with_jumps > 1) {
                const double var = std::max(
                    0.0,
                    (frac_sq.sum - M * stats.upper_jump_fraction * stats.upper_jump_fraction) /
                        (M - 1));
                stats.upper_jump_fraction_se = std::sqrt(var / M);
            }
        }
    }

    stats.events = std::move(events);
    return stats;
}

JumpChainLaw jump_chain_stationary(const BandPolicy& policy) {
    if (!(policy.u - policy.d > 1e-12))
        throw DegenerateBandError("band width u - d below 1e-12");
    if (!policy.ordered())
        throw DegenerateBandError("band thresholds must satisfy d < D < 0 < U < u");
    JumpChainLaw law{};
    const double width = policy.u - policy.d;
    law.q1 = (policy.U - policy.d) / width;
    law.q2 = (policy.D - policy.d) / width;
    law.p_upper = law.q2 / (1.0 - law.q1 + law.q2);
    law.long_run_mean = policy.center + (policy.u * policy.D - policy.d * policy.U) /
                                            (policy.u - policy.U + policy.D - policy.d);
    return law;
}

GapCurve epsilon_nash_gap(const GameParams& params, const BandPolicy& mfg_policy,
                          const std::vector<int>& n_values, const std::vector<double>& scales,
                          const SimConfig& cfg_in) {
    if (!mfg_policy.ordered()) throw std::invalid_argument("mfg_policy must be ordered");
    GapCurve curve;
    curve.scales = scales;

    for (int N : n_values) {
        SimConfig cfg = cfg_in;
        cfg.n_players = N;
        cfg.coupling = SimConfig::Coupling::Centered;
        cfg.running_ref = SimConfig::RunningRef::EmpiricalMean;

        std::vector<BandPolicy> base_policies(N, mfg_policy);
        const SimStats base = simulate_nplayer(params, base_policies, cfg);

        GapPoint point{};
        point.n_players = N;
        point.j_base = base.players[0].cost_mean;
        double best_diff = 0;  // the identity deviation yields exactly zero
        double best_se = 0;
        double best_scale = 1.0;
        double best_cost = point.j_base;
        for (double scale : scales) {
            if (std::abs(scale - 1.0) < 1e-12) continue;
            std::vector<BandPolicy> dev_policies(N, mfg_policy);
            dev_policies[0] = mfg_policy.scaled(scale);
            const SimStats dev = simulate_nplayer(params, dev_policies, cfg);
            // Common random numbers: path p of the deviation run saw the same
            // Brownian increments, so the difference has low variance.
            Kahan sum, sq;
            for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
                const double d = base.path_cost_p1[p] - dev.path_cost_p1[p];
                sum.add(d);
                sq.add(d * d);
            }
            const double P = static_cast<double>(cfg.n_paths);
            const double mean = sum.sum / P;
            const double var = std::max(0.0, (sq.sum - P * mean * mean) / (P - 1));
            const double se = std::sqrt(var / P);
            if (mean > best_diff) {
                best_diff = mean;
                best_se = se;
                best_scale = scale;
                best_cost = dev.players[0].cost_mean;
            }
        }
        point.gap = std::max(0.0, best_diff);
        point.se = best_se;
        point.best_scale = best_scale;
        point.j_best = best_cost;
        curve.points.push_back(point);
    }

    // Least-squares slope of log(gap) vs log(N) over the positive gaps.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& pt : curve.points) {
        if (pt.gap <= 0) continue;
        const double lx = std::log(static_cast<double>(pt.n_players));
        const double ly = std::log(pt.gap);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    curve.fitted_slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx)
                                : std::numeric_limits<double>::quiet_NaN();
    return curve;
}

} // namespace impulse_games
