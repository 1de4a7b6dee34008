// Command-line front end: solves the band systems, verifies candidate
// equilibria, runs the grid oracle, parameter sweeps, Monte Carlo and the
// epsilon-Nash experiment. CSV is the canonical data artifact; SVG plots are
// generated directly. Exit codes: 0 ok, 1 malformed config or arguments,
// 2 no convergence, 3 verification failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "impulse_games/config.hpp"
#include "impulse_games/csv.hpp"
#include "impulse_games/json_io.hpp"
#include "impulse_games/mfg.hpp"
#include "impulse_games/model.hpp"
#include "impulse_games/oracle.hpp"
#include "impulse_games/sim.hpp"
#include "impulse_games/solver.hpp"
#include "impulse_games/svg.hpp"
#include "impulse_games/verifier.hpp"

namespace ig = impulse_games;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitVerification = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
};

ig::FlatConfig load_config(const CommonOpts& opts) {
    return ig::FlatConfig::parse_file(opts.config_path);
}

void ensure_out_dir(const CommonOpts& opts) {
    fs::create_directories(opts.out_dir);
}

void write_json(const std::string& path, const ig::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

ig::SolveReport run_solver(const std::string& mode, const ig::GameParams& params) {
    if (mode == "single") return ig::solve_single_player(params);
    if (mode == "ne1") return ig::solve_two_player_symmetric(params);
    if (mode == "ne2") return ig::solve_two_player_dictator(params);
    if (mode == "mfg") return ig::solve_mfg_thresholds(params, 0.0);
    throw std::runtime_error("unknown mode: " + mode + " (single|ne1|ne2|mfg)");
}

bool run_checks(const ig::SolveReport& report, ig::json& out) {
    std::vector<ig::CheckReport> checks;
    auto qvi = ig::check_qvi(report.value);
    for (const auto& c : qvi.checks) checks.push_back(c);
    checks.push_back(ig::check_opponent_condition(report.value));
    checks.push_back(ig::check_symmetry(report.value, report.value.policy.center));
    if (report.follower) {
        auto fq = ig::check_qvi(*report.follower);
        for (auto c : fq.checks) {
            c.check = "follower_" + c.check;
            checks.push_back(c);
        }
        auto fo = ig::check_opponent_condition(*report.follower);
        fo.check = "follower_" + fo.check;
        checks.push_back(fo);
    }
    bool pass = true;
    for (const auto& c : checks) pass = pass && c.pass;
    out = ig::json{{"pass", pass}, {"checks", checks}};
    return pass;
}

void write_value_csv(const std::string& path, const ig::PiecewiseValue& v, int n_points = 1001) {
    const double lo = v.policy.center + v.policy.d - 1.0;
    const double hi = v.policy.center + v.policy.u + 1.0;
    ig::CsvWriter csv({"x", "value", "slope"});
    for (int i = 0; i < n_points; ++i) {
        const double x = lo + (hi - lo) * i / (n_points - 1);
        csv.add_row({x, v.value(x), v.slope(x)});
    }
    csv.write_file(path);
}

int cmd_solve(const CommonOpts& opts, const std::string& mode) {
    const auto cfg = load_config(opts);
    const auto params = ig::params_from_config(cfg);
    ensure_out_dir(opts);

    ig::SolveReport report = run_solver(mode, params);
    if (!report.converged) {
        std::cerr << "solver did not converge; best residual " << report.residual_norm << "\n";
        return kExitNoConvergence;
    }

    write_json(opts.out_dir + "/solve_" + mode + ".json", ig::json(report));
    write_value_csv(opts.out_dir + "/value_" + mode + ".csv", report.value);
    if (report.follower)
        write_value_csv(opts.out_dir + "/value_" + mode + "_follower.csv", *report.follower);

    ig::json checks;
    const bool ok = run_checks(report, checks);
    write_json(opts.out_dir + "/verify_" + mode + ".json", checks);

    std::cout << "mode=" << mode << " d=" << report.policy.d << " D=" << report.policy.D
              << " U=" << report.policy.U << " u=" << report.policy.u
              << " c1=" << report.value.c1 << " c2=" << report.value.c2
              << " residual=" << report.residual_norm << (ok ? " verified" : " VERIFY-FAILED")
              << "\n";
    return ok ? kExitOk : kExitVerification;
}

int cmd_verify(const CommonOpts& opts, const std::string& mode) {
    const auto cfg = load_config(opts);
    const auto params = ig::params_from_config(cfg);
    ensure_out_dir(opts);
    ig::SolveReport report = run_solver(mode, params);
    if (!report.converged) return kExitNoConvergence;
    ig::json checks;
    const bool ok = run_checks(report, checks);
    write_json(opts.out_dir + "/verify_" + mode + ".json", checks);
    std::cout << checks.dump(2) << "\n";
    return ok ? kExitOk : kExitVerification;
}

int cmd_oracle(const CommonOpts& opts, double m, int n, double lo, double hi) {
    const auto cfg = load_config(opts);
    const auto params = ig::params_from_config(cfg);
    ensure_out_dir(opts);

    ig::Grid grid;
    if (lo < hi && n > 0) {
        grid = {lo, hi, n};
    } else {
        grid = ig::default_grid(params, m, n > 0 ? n : 1601);
    }
    const auto sol = ig::solve_qvi_grid(params, m, grid);

    ig::CsvWriter csv({"x", "value", "action", "target"});
    for (int i = 0; i < grid.n; ++i)
        csv.add_row({grid.x(i), sol.values[i], static_cast<double>(sol.action_mask[i]),
                     grid.x(sol.jump_targets[i])});
    csv.write_file(opts.out_dir + "/oracle.csv");

    std::cout << "band=[" << sol.band_lo() << ", " << sol.band_hi() << "] step=" << grid.step()
              << " sweeps=" << sol.iterations << "\n";
    return kExitOk;
}

struct SweepRow {
    double value;
    ig::SolveReport report;
    double m_star = 0;
    bool has_mstar = false;
};

int cmd_sweep(const CommonOpts& opts, const std::string& mode, const std::string& param,
              std::vector<double> range) {
    static const std::vector<std::string> allowed = {"h",      "p",       "K_plus", "K_minus",
                                                     "k_plus", "k_minus", "c",      "r",
                                                     "sigma",  "alpha_slope"};
    if (std::find(allowed.begin(), allowed.end(), param) == allowed.end())
        throw std::runtime_error("unsupported sweep parameter: " + param);
    if (range.size() != 3 || range[2] < 2 || !(range[0] < range[1]))
        throw std::runtime_error("--range expects lo hi steps with lo < hi, steps >= 2");

    const auto cfg = load_config(opts);
    ensure_out_dir(opts);

    const int steps = static_cast<int>(range[2]);
    std::vector<SweepRow> rows;
    int solved = 0;
    for (int i = 0; i < steps; ++i) {
        const double value = range[0] + (range[1] - range[0]) * i / (steps - 1);
        auto raw = cfg.raw();
        raw[param] = ig::format_double(value);
        std::string flat;
        for (const auto& [k, v] : raw) flat += k + " = " + v + "\n";
        try {
            const auto params = ig::params_from_config(ig::FlatConfig::parse_string(flat));
            SweepRow row{value, run_solver(mode, params)};
            if (!row.report.converged) throw std::runtime_error("no convergence");
            if (mode == "mfg") {
                row.m_star = ig::solve_mfg(params, 0.0).m_star;
                row.has_mstar = true;
            }
            rows.push_back(std::move(row));
            ++solved;
        } catch (const std::exception& e) {
            std::cerr << param << "=" << value << ": " << e.what() << " (point skipped)\n";
        }
    }

    ig::CsvWriter csv({param, "d", "D", "U", "u", "c1", "c2", "m_star"});
    for (const auto& row : rows) {
        csv.add_row({row.value, row.report.policy.d, row.report.policy.D, row.report.policy.U,
                     row.report.policy.u, row.report.value.c1, row.report.value.c2,
                     row.has_mstar ? row.m_star : std::nan("")});
    }
    const std::string stem = opts.out_dir + "/sweep_" + mode + "_" + param;
    csv.write_file(stem + ".csv");

    ig::SvgPlot plot;
    ig::SvgPlot::Panel thresholds;
    thresholds.title = "thresholds vs " + param + " (" + mode + ")";
    thresholds.x_label = param;
    thresholds.y_label = "threshold";
    for (const auto* name : {"d", "D", "U", "u"}) {
        ig::SvgPlot::Series s;
        s.label = name;
        for (const auto& row : rows) {
            s.x.push_back(row.value);
            const auto& b = row.report.policy;
            s.y.push_back(std::string(name) == "d"   ? b.d
                          : std::string(name) == "D" ? b.D
                          : std::string(name) == "U" ? b.U
                                                     : b.u);
        }
        thresholds.series.push_back(std::move(s));
    }
    plot.add_panel(std::move(thresholds));
    if (mode == "mfg") {
        ig::SvgPlot::Panel fixed_point;
        fixed_point.title = "fixed point vs " + param;
        fixed_point.x_label = param;
        fixed_point.y_label = "m*";
        ig::SvgPlot::Series s;
        s.label = "m*";
        for (const auto& row : rows)
            if (row.has_mstar) {
                s.x.push_back(row.value);
                s.y.push_back(row.m_star);
            }
        fixed_point.series.push_back(std::move(s));
        plot.add_panel(std::move(fixed_point));
    }
    plot.write_file(stem + ".svg");

    std::cout << "solved " << solved << "/" << steps << " sweep points -> " << stem
              << ".{csv,svg}\n";
    return solved * 10 >= steps * 9 ? kExitOk : kExitNoConvergence;
}

ig::SimConfig sim_config_from(const ig::FlatConfig& cfg, const ig::GameParams& params) {
    ig::SimConfig sim;
    sim.n_players = static_cast<int>(cfg.number_or("n_players", 1));
    sim.dt = cfg.number_or("dt", 1e-4);
    sim.horizon = cfg.number_or("horizon", 0.0);
    sim.n_paths = static_cast<std::int64_t>(cfg.number_or("paths", 1000));
    sim.seed = static_cast<std::uint64_t>(cfg.number_or("seed", 1));
    const std::string init = cfg.text_or("init", "point");
    if (init == "point") {
        sim.init = {ig::InitDist::Kind::Point, cfg.number_or("init_a", 0.0), 0.0};
    } else if (init == "uniform") {
        sim.init = {ig::InitDist::Kind::Uniform, cfg.number_or("init_a", -1.0),
                    cfg.number_or("init_b", 1.0)};
    } else if (init == "gaussian") {
        sim.init = {ig::InitDist::Kind::Gaussian, cfg.number_or("init_a", 0.0),
                    cfg.number_or("init_b", 1.0)};
    } else {
        throw std::runtime_error("unknown init kind: " + init);
    }
    (void)params;
    return sim;
}

int cmd_simulate(const CommonOpts& opts, int n_players, std::int64_t paths, double dt,
                 std::uint64_t seed, const std::string& mode, const std::string& events_path) {
    const auto cfg = load_config(opts);
    const auto params = ig::params_from_config(cfg);
    ensure_out_dir(opts);

    ig::SimConfig sim = sim_config_from(cfg, params);
    if (n_players > 0) sim.n_players = n_players;
    if (paths > 0) sim.n_paths = paths;
    if (dt > 0) sim.dt = dt;
    if (seed != 0) sim.seed = seed;
    sim.record_events = !events_path.empty();

    std::vector<ig::BandPolicy> policies;
    if (mode == "ne1" || mode == "ne2") {
        if (sim.n_players != 2)
            throw std::runtime_error("two-player modes need n_players = 2");
        const auto rep = mode == "ne1" ? ig::solve_two_player_symmetric(params)
                                       : ig::solve_two_player_dictator(params);
        if (!rep.converged) return kExitNoConvergence;
        policies.assign(2, rep.policy);
        sim.coupling = ig::SimConfig::Coupling::Difference;
        sim.dictator = mode == "ne2";
        sim.running_ref = ig::SimConfig::RunningRef::EmpiricalMean;
    } else {
        const auto rep = ig::solve_single_player(params);
        if (!rep.converged) return kExitNoConvergence;
        policies.assign(sim.n_players, rep.policy);
        sim.coupling = ig::SimConfig::Coupling::Centered;
        sim.running_ref = sim.n_players == 1 ? ig::SimConfig::RunningRef::PolicyCenter
                                             : ig::SimConfig::RunningRef::EmpiricalMean;
    }

    const auto stats = ig::simulate_nplayer(params, policies, sim);

    ig::CsvWriter csv({"player", "cost", "se", "running", "own", "opponent", "interventions",
                       "terminal_mean", "terminal_se"});
    for (int i = 0; i < stats.n_players; ++i) {
        const auto& ps = stats.players[i];
        csv.add_row({static_cast<double>(i + 1), ps.cost_mean, ps.cost_se, ps.running_mean,
                     ps.own_mean, ps.opp_mean, ps.interventions_mean, ps.terminal_mean,
                     ps.terminal_se});
    }
    csv.write_file(opts.out_dir + "/simulate.csv");

    if (!events_path.empty()) {
        std::ofstream out(events_path, std::ios::binary);
        for (const auto& e : stats.events) {
            ig::json j{{"time", e.time},
                       {"player", e.player + 1},
                       {"pre_state", e.pre_state},
                       {"impulse", e.impulse}};
            out << j.dump() << "\n";
        }
    }

    std::cout << "paths=" << stats.n_paths << " horizon=" << stats.horizon
              << " cost[1]=" << stats.players[0].cost_mean << " +-" << stats.players[0].cost_se
              << " tail<" << stats.tail_bound << "\n";
    return kExitOk;
}

int cmd_epsnash(const CommonOpts& opts, std::vector<int> n_list, std::int64_t paths, double dt,
                std::uint64_t seed, std::vector<double> scales) {
    const auto cfg = load_config(opts);
    const auto params = ig::params_from_config(cfg);
    ensure_out_dir(opts);

    if (n_list.empty()) n_list = {2, 4, 8, 16, 32, 64};
    if (scales.empty()) scales = {0.75, 1.0, 1.25, 1.5};

    ig::SimConfig sim = sim_config_from(cfg, params);
    if (paths > 0) sim.n_paths = paths;
    if (dt > 0) sim.dt = dt;
    if (seed != 0) sim.seed = seed;

    const auto mfg = ig::solve_mfg(params, cfg.number_or("init_mean", 0.0));
    sim.priority_ref = mfg.m_star;
    if (sim.init.kind == ig::InitDist::Kind::Point && sim.init.a == 0.0)
        sim.init.a = mfg.m_star;

    const auto curve = ig::epsilon_nash_gap(params, mfg.policy, n_list, scales, sim);

    ig::CsvWriter csv({"N", "gap", "se", "j_base", "j_best", "best_scale"});
    for (const auto& pt : curve.points)
        csv.add_row({static_cast<double>(pt.n_players), pt.gap, pt.se, pt.j_base, pt.j_best,
                     pt.best_scale});
    csv.write_file(opts.out_dir + "/epsnash.csv");

    ig::SvgPlot plot;
    ig::SvgPlot::Panel panel;
    panel.title = "unilateral deviation gap vs N";
    panel.x_label = "N";
    panel.y_label = "gap";
    panel.log_x = true;
    panel.log_y = true;
    ig::SvgPlot::Series s;
    s.label = "gap";
    for (const auto& pt : curve.points)
        if (pt.gap > 0) {
            s.x.push_back(pt.n_players);
            s.y.push_back(pt.gap);
        }
    panel.series.push_back(std::move(s));
    panel.annotation = "fitted slope " + ig::format_double(curve.fitted_slope);
    plot.add_panel(std::move(panel));
    plot.write_file(opts.out_dir + "/epsnash.svg");

    std::cout << "fitted slope " << curve.fitted_slope << "\n";
    return kExitOk;
}

int cmd_mfg(const CommonOpts& opts, double init_mean, bool validate) {
    const auto cfg = load_config(opts);
    const auto params = ig::params_from_config(cfg);
    ensure_out_dir(opts);

    const auto sol = ig::solve_mfg(params, init_mean);
    ig::json j{{"m_star", sol.m_star},
               {"iterations", sol.iterations},
               {"residual", sol.residual},
               {"policy", sol.policy},
               {"value", sol.value}};

    if (validate) {
        ig::SimConfig sim = sim_config_from(cfg, params);
        const auto v = ig::validate_mfg_by_simulation(sol, params, sim);
        j["validation"] = {{"mean_emp", v.mean_emp},
                           {"mean_se", v.mean_se},
                           {"upper_fraction_emp", v.upper_fraction_emp},
                           {"upper_fraction_se", v.upper_fraction_se},
                           {"p_upper_expected", v.p_upper_expected},
                           {"pass", v.pass}};
    }
    write_json(opts.out_dir + "/mfg.json", j);
    std::cout << "m*=" << sol.m_star << " residual=" << sol.residual
              << " band=[" << sol.policy.center + sol.policy.d << ", "
              << sol.policy.center + sol.policy.u << "]\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"impulse-games: band equilibria of impulse-control games"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string mode = "single";
    double m = 0.0;
    int grid_n = 0;
    double grid_lo = 0, grid_hi = 0;
    std::string param;
    std::vector<double> range;
    int n_players = 0;
    std::int64_t paths = 0;
    double dt = 0;
    std::uint64_t seed = 0;
    std::string events_path;
    std::vector<int> n_list;
    std::vector<double> scales;
    double init_mean = 0;
    bool validate = false;

    auto add_common = [&](CLI::App* sub, bool config_required = true) {
        sub->add_option("--config", common.config_path, "flat key=value parameter file")
            ->required(config_required);
        sub->add_option("--out-dir", common.out_dir, "output directory");
    };

    auto* solve = app.add_subcommand("solve", "solve a band system and verify it");
    add_common(solve);
    solve->add_option("--mode", mode, "single|ne1|ne2|mfg");

    auto* verify = app.add_subcommand("verify", "run the equilibrium checks");
    add_common(verify);
    verify->add_option("--mode", mode, "single|ne1|ne2|mfg");

    auto* oracle = app.add_subcommand("oracle", "finite-difference QVI ground truth");
    add_common(oracle);
    oracle->add_option("--m", m, "mean information");
    oracle->add_option("--n", grid_n, "grid points");
    oracle->add_option("--lo", grid_lo, "grid lower end");
    oracle->add_option("--hi", grid_hi, "grid upper end");

    auto* sweep = app.add_subcommand("sweep", "threshold sensitivity sweep");
    add_common(sweep);
    sweep->add_option("--mode", mode, "single|ne1|ne2|mfg");
    sweep->add_option("--param", param, "parameter to sweep")->required();
    sweep->add_option("--range", range, "lo hi steps")->expected(3);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo of the controlled process");
    add_common(simulate);
    simulate->add_option("--mode", mode, "single|ne1|ne2 (policy source)");
    simulate->add_option("--n", n_players, "number of players");
    simulate->add_option("--paths", paths, "Monte Carlo paths");
    simulate->add_option("--dt", dt, "time step");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--events", events_path, "newline-delimited event log (path 0)");

    auto* epsnash = app.add_subcommand("epsnash", "unilateral-deviation gap vs N");
    add_common(epsnash);
    epsnash->add_option("--n-list", n_list, "population sizes");
    epsnash->add_option("--paths", paths, "Monte Carlo paths per point");
    epsnash->add_option("--dt", dt, "time step");
    epsnash->add_option("--seed", seed, "RNG seed");
    epsnash->add_option("--scales", scales, "deviation threshold factors");

    auto* mfg_cmd = app.add_subcommand("mfg", "mean-field fixed point");
    add_common(mfg_cmd);
    mfg_cmd->add_option("--init-mean", init_mean, "Picard start");
    mfg_cmd->add_flag("--validate", validate, "validate by simulation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(common, mode);
        if (verify->parsed()) return cmd_verify(common, mode);
        if (oracle->parsed()) return cmd_oracle(common, m, grid_n, grid_lo, grid_hi);
        if (sweep->parsed()) return cmd_sweep(common, mode, param, range);
        if (simulate->parsed())
            return cmd_simulate(common, n_players, paths, dt, seed, mode, events_path);
        if (epsnash->parsed()) return cmd_epsnash(common, n_list, paths, dt, seed, scales);
        if (mfg_cmd->parsed()) return cmd_mfg(common, init_mean, validate);
    } catch (const ig::IllPosedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    return kExitOk;
}
