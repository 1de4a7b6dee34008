#include "impulse_games/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "dual.hpp"

namespace impulse_games {

namespace {

using detail::Dual;
using detail::exp;
using std::exp;

constexpr int kMaxNewtonIter = 200;

template <int N>
struct NewtonResult {
    std::array<double, N> x{};
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

template <int N>
double inf_norm(const std::array<double, N>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Solves J*step = -f by Gaussian elimination with partial pivoting (N <= 4).
template <int N>
bool solve_linear(std::array<std::array<double, N>, N> J, std::array<double, N> f,
                  std::array<double, N>& step) {
    std::array<int, N> perm;
    for (int i = 0; i < N; ++i) perm[i] = i;
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int row = col + 1; row < N; ++row)
            if (std::abs(J[row][col]) > std::abs(J[piv][col])) piv = row;
        if (J[piv][col] == 0.0) return false;
        std::swap(J[col], J[piv]);
        std::swap(f[col], f[piv]);
        for (int row = col + 1; row < N; ++row) {
            const double m = J[row][col] / J[col][col];
            for (int k = col; k < N; ++k) J[row][k] -= m * J[col][k];
            f[row] -= m * f[col];
        }
    }
    for (int row = N - 1; row >= 0; --row) {
        double acc = -f[row];
        for (int k = row + 1; k < N; ++k) acc -= J[row][k] * step[k];
        step[row] = acc / J[row][row];
    }
    return true;
}

// Damped Newton: full step, halved while the trial point is invalid or the
// residual norm does not decrease.
template <int N, class Residuals, class Valid>
NewtonResult<N> damped_newton(Residuals res, Valid valid, std::array<double, N> x0,
                              double tol) {
    NewtonResult<N> out;
    out.x = x0;

    auto plain_norm = [&](const std::array<double, N>& x) {
        std::array<double, N> f = res(x);
        return inf_norm<N>(f);
    };

    double norm = plain_norm(x0);
    out.residual = norm;
    for (int iter = 0; iter < kMaxNewtonIter; ++iter) {
        out.iterations = iter;
        if (norm <= tol) {
            out.converged = true;
            return out;
        }
        std::array<Dual<N>, N> xd;
        for (int i = 0; i < N; ++i) xd[i] = Dual<N>::seed(out.x[i], i);
        std::array<Dual<N>, N> fd = res(xd);
        std::array<std::array<double, N>, N> J;
        std::array<double, N> f;
        for (int i = 0; i < N; ++i) {
            f[i] = fd[i].v;
            for (int j = 0; j < N; ++j) J[i][j] = fd[i].d[j];
        }
        std::array<double, N> step{};
        if (!solve_linear<N>(J, f, step)) break;

        double t = 1.0;
        bool accepted = false;
        for (int halve = 0; halve < 45; ++halve) {
            std::array<double, N> trial;
            for (int i = 0; i < N; ++i) trial[i] = out.x[i] + t * step[i];
            if (valid(trial)) {
                const double trial_norm = plain_norm(trial);
                if (trial_norm < norm) {
                    out.x = trial;
                    norm = trial_norm;
                    out.residual = norm;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) break;  // stalled
    }
    out.converged = norm <= tol;
    out.residual = norm;
    return out;
}

// Bisection on a bracketing interval; assumes f(lo) and f(hi) have opposite
// signs. Returns the midpoint after shrinking to machine resolution.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((flo <= 0) == (fm <= 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::optional<std::pair<double, double>> scan_bracket(
    const std::function<double(double)>& f, double lo, double hi, int n) {
    double prev_x = lo;
    double prev_f = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double fx = f(x);
        if (std::isfinite(prev_f) && std::isfinite(fx) && (prev_f <= 0) != (fx <= 0))
            return std::make_pair(prev_x, x);
        prev_x = x;
        prev_f = fx;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Two-player systems (reduced coordinate s = x1 - x2, symmetric costs).
// Core branch on [0,u]: beta*s + c1 e^{L s} + c2 e^{-L s}.
// ---------------------------------------------------------------------------

struct TwoPlayerCtx {
    double beta;  // h2 / r
    double L;     // lambda2
    double K, k, c;
};

TwoPlayerCtx two_player_ctx(const GameParams& params) {
    const auto dc = derived_constants(params);
    return {dc.h2 / params.r, dc.lambda2, params.costs.K_minus, params.costs.k_minus,
            params.costs.c};
}

void require_two_player_preconditions(const GameParams& params) {
    params.validate();
    if (!params.costs.symmetric())
        throw IllPosedError("two-player solvers require symmetric costs (K+=K-, k+=k-, h=p)");
    const auto dc = derived_constants(params);
    if (dc.h2 - params.r * params.costs.k_minus <= 0)
        throw IllPosedError("need h/2 - r*k > 0 for the duopoly system");
    if (params.costs.c <= 0)
        throw IllPosedError("need opponent cost c > 0 for the duopoly equilibria");
}

// NE-1 residuals in (U, u) with (c1, c2) eliminated from the smooth-fit pair.
template <class S>
struct Ne1Eval {
    S c1, c2, match_u, opponent;
};

template <class S>
Ne1Eval<S> ne1_eval(const TwoPlayerCtx& ctx, const S& U, const S& u) {
    const double rhs = (ctx.k - ctx.beta) / ctx.L;
    const S eU = exp(ctx.L * U), emU = exp(S(-ctx.L) * U);
    const S eu = exp(ctx.L * u), emu = exp(S(-ctx.L) * u);
    const S det = emU * eu - eU * emu;  // 2 sinh(L(u-U)) > 0
    Ne1Eval<S> out;
    out.c1 = rhs * (emU - emu) / det;
    out.c2 = rhs * (eU - eu) / det;
    out.match_u = (ctx.beta - ctx.k) * (u - U) + out.c1 * (eu - eU) + out.c2 * (emu - emU) - ctx.K;
    const S b1 = out.c1 + ctx.beta / ctx.L;
    const S b2 = out.c2 - ctx.beta / ctx.L;
    out.opponent = ctx.beta * (u - U) + b1 * (emu - emU) + b2 * (eu - eU) - ctx.c;
    return out;
}

// Dictator residuals in (U, u); c1 comes from the smooth fit at u, and the
// even reflection fixes the second coefficient as c1 + beta/L.
template <class S>
struct DictatorEval {
    S c1, c2, smooth_U, match_u;
};

template <class S>
DictatorEval<S> dictator_eval(const TwoPlayerCtx& ctx, const S& U, const S& u) {
    const S eU = exp(ctx.L * U), emU = exp(S(-ctx.L) * U);
    const S eu = exp(ctx.L * u), emu = exp(S(-ctx.L) * u);
    DictatorEval<S> out;
    out.c1 = (ctx.k - ctx.beta + ctx.beta * emu) / (ctx.L * (eu - emu));
    out.c2 = out.c1 + ctx.beta / ctx.L;
    out.smooth_U = ctx.beta + ctx.L * (out.c1 * eU - out.c2 * emU) - ctx.k;
    out.match_u =
        (ctx.beta - ctx.k) * (u - U) + out.c1 * (eu - eU) + out.c2 * (emu - emU) - ctx.K;
    return out;
}

// ---------------------------------------------------------------------------
// Mean-field / single-player system.
// Upper branch [0,u]: (h/r) s + c1 e^{L s} + c2 e^{-L s};
// lower branch [d,0]: -(p/r) s + (c1+kappa) e^{L s} + (c2-kappa) e^{-L s}.
// ---------------------------------------------------------------------------

struct MfgCtx {
    double A;      // h / r
    double B;      // p / r
    double L;      // lambda
    double kappa;  // (h+p) / (2 r lambda)
    double K_up, k_up;      // costs of upward impulses (lower boundary)
    double K_down, k_down;  // costs of downward impulses (upper boundary)
};

MfgCtx mfg_ctx(const GameParams& params) {
    const auto dc = derived_constants(params);
    const auto& cs = params.costs;
    return {cs.h / params.r,
            cs.p / params.r,
            dc.lambda,
            (cs.h + cs.p) / (2.0 * params.r * dc.lambda),
            cs.K_plus,
            cs.k_plus,
            cs.K_minus,
            cs.k_minus};
}

template <class S>
struct MfgEval {
    S c1, c2;
    S smooth_U, match_u, smooth_D, match_d;
};

template <class S>
MfgEval<S> mfg_eval(const MfgCtx& ctx, const S& d, const S& D, const S& U, const S& u) {
    const S eu = exp(ctx.L * u), emu = exp(S(-ctx.L) * u);
    const S ed = exp(ctx.L * d), emd = exp(S(-ctx.L) * d);
    const S eU = exp(ctx.L * U), emU = exp(S(-ctx.L) * U);
    const S eD = exp(ctx.L * D), emD = exp(S(-ctx.L) * D);

    const S rho_u = S((ctx.k_down - ctx.A) / ctx.L);
    const S rho_d = S((ctx.B - ctx.k_up) / ctx.L) - ctx.kappa * (ed + emd);
    const S det = emu * ed - eu * emd;  // -2 sinh(L(u-d)) < 0
    MfgEval<S> out;
    out.c1 = (emu * rho_d - emd * rho_u) / det;
    out.c2 = (eu * rho_d - ed * rho_u) / det;

    const S b1 = out.c1 + ctx.kappa;
    const S b2 = out.c2 - ctx.kappa;
    out.smooth_U = ctx.A + ctx.L * (out.c1 * eU - out.c2 * emU) - ctx.k_down;
    out.match_u = (ctx.A - ctx.k_down) * (u - U) + out.c1 * (eu - eU) + out.c2 * (emu - emU) -
                  ctx.K_down;
    out.smooth_D = -ctx.B + ctx.L * (b1 * eD - b2 * emD) + ctx.k_up;
    out.match_d = -ctx.B * (d - D) + b1 * (ed - eD) + b2 * (emd - emD) - ctx.K_up -
                  ctx.k_up * (D - d);
    return out;
}

void require_mfg_preconditions(const GameParams& params) {
    params.validate();
    if (params.costs.K_plus < 1e-8 || params.costs.K_minus < 1e-8)
        throw IllPosedError("fixed costs below 1e-8: band collapses");
}

// Symmetric reduction of the MFG system (h=p, K+=K-, k+=k-): d=-u, D=-U and
// c2 = c1 + kappa. Solved by nested bisection: the inner root of the smooth
// fit at U is bracketed by the curvature sign change, the outer equation is
// the value matching at u.
struct SymmetricSolution {
    double U, u, c1, c2;
    bool found = false;
};

SymmetricSolution solve_symmetric_core(double A, double L, double kappa, double K, double k) {
    SymmetricSolution sol{};
    auto c1_of_u = [&](double u) {
        return ((k - A) / L + kappa * std::exp(-L * u)) / (std::exp(L * u) - std::exp(-L * u));
    };
    auto inner_U = [&](double u) -> std::optional<double> {
        const double c1 = c1_of_u(u);
        const double c2 = c1 + kappa;
        if (!(c1 < 0) || !(c2 > 0)) return std::nullopt;
        const double s_m = std::log(c2 / -c1) / (2 * L);  // curvature zero
        if (!(s_m > 0) || s_m >= u) return std::nullopt;
        auto g = [&](double U) {
            return A + L * (c1 * std::exp(L * U) - c2 * std::exp(-L * U)) - k;
        };
        if (g(1e-12) >= 0 || g(s_m) <= 0) return std::nullopt;
        return bisect(g, 1e-12, s_m);
    };
    auto outer = [&](double u) -> double {
        auto U = inner_U(u);
        if (!U) return std::numeric_limits<double>::quiet_NaN();
        const double c1 = c1_of_u(u);
        const double c2 = c1 + kappa;
        return (A - k) * (u - *U) + c1 * (std::exp(L * u) - std::exp(L * *U)) +
               c2 * (std::exp(-L * u) - std::exp(-L * *U)) - K;
    };

    // Geometric scan for the outer bracket.
    double prev_x = 0, prev_f = std::numeric_limits<double>::quiet_NaN();
    bool have_prev = false;
    for (double u = 1e-3 / L; u < 60.0 / L; u *= 1.15) {
        const double f = outer(u);
        if (std::isfinite(f)) {
            if (have_prev && (prev_f <= 0) != (f <= 0)) {
                const double u_star = bisect(outer, prev_x, u);
                const double U_star = *inner_U(u_star);
                sol = {U_star, u_star, c1_of_u(u_star), c1_of_u(u_star) + kappa, true};
                return sol;
            }
            prev_x = u;
            prev_f = f;
            have_prev = true;
        }
    }
    return sol;
}

BandPolicy make_policy(double d, double D, double U, double u, double center) {
    return {d, D, U, u, center};
}

} // namespace

SolveReport solve_two_player_symmetric(const GameParams& params) {
    require_two_player_preconditions(params);
    const auto ctx = two_player_ctx(params);

    auto residuals_d = [&](const std::array<double, 2>& x) -> std::array<double, 2> {
        const auto e = ne1_eval<double>(ctx, x[0], x[1]);
        return {e.match_u, e.opponent};
    };
    auto residuals = [&](const auto& x) -> std::array<std::decay_t<decltype(x[0])>, 2> {
        const auto e = ne1_eval<std::decay_t<decltype(x[0])>>(ctx, x[0], x[1]);
        return {e.match_u, e.opponent};
    };
    auto valid = [&](const std::array<double, 2>& x) {
        return x[0] > 1e-10 && x[1] > x[0] + 1e-10 && x[1] < 120.0 / ctx.L;
    };

    const double u0 = 2.0 * std::sqrt(ctx.K / (params.costs.h * ctx.L));
    auto result = damped_newton<2>(residuals, valid, {u0 / 4.0, u0}, kSolverTol);

    if (!result.converged) {
        // Nested bisection fallback: inner value matching in U, outer opponent
        // condition in u.
        auto inner_U = [&](double u) -> std::optional<double> {
            auto g = [&](double U) { return ne1_eval<double>(ctx, U, u).match_u; };
            auto br = scan_bracket(g, 1e-9, u - 1e-9, 400);
            if (!br) return std::nullopt;
            return bisect(g, br->first, br->second);
        };
        auto outer = [&](double u) -> double {
            auto U = inner_U(u);
            if (!U) return std::numeric_limits<double>::quiet_NaN();
            return ne1_eval<double>(ctx, *U, u).opponent;
        };
        double prev_x = 0, prev_f = 0;
        bool have_prev = false;
        for (double u = 1e-2 / ctx.L; u < 120.0 / ctx.L; u *= 1.1) {
            const double f = outer(u);
            if (!std::isfinite(f)) continue;
            if (have_prev && (prev_f <= 0) != (f <= 0)) {
                const double u_star = bisect(outer, prev_x, u);
                if (auto U_star = inner_U(u_star)) {
                    auto polished = damped_newton<2>(residuals, valid, {*U_star, u_star}, kSolverTol);
                    if (polished.residual < result.residual) result = polished;
                }
                break;
            }
            prev_x = u;
            prev_f = f;
            have_prev = true;
        }
    }

    const auto e = ne1_eval<double>(ctx, result.x[0], result.x[1]);
    SolveReport report;
    report.policy = make_policy(-result.x[1], -result.x[0], result.x[0], result.x[1], 0.0);
    report.value = {ValueKind::TwoPlayerSymmetric, e.c1, e.c2, report.policy, params};
    report.residual_norm = std::max(inf_norm<2>(residuals_d(result.x)), 0.0);
    report.iterations = result.iterations;
    report.converged = result.converged && report.policy.ordered();
    return report;
}

SolveReport solve_two_player_dictator(const GameParams& params) {
    require_two_player_preconditions(params);
    const auto ctx = two_player_ctx(params);

    auto residuals = [&](const auto& x) -> std::array<std::decay_t<decltype(x[0])>, 2> {
        const auto e = dictator_eval<std::decay_t<decltype(x[0])>>(ctx, x[0], x[1]);
        return {e.smooth_U, e.match_u};
    };
    auto valid = [&](const std::array<double, 2>& x) {
        return x[0] > 1e-10 && x[1] > x[0] + 1e-10 && x[1] < 120.0 / ctx.L;
    };

    // The dictator system coincides with the symmetric single-band system in
    // the reduced coordinate, so the nested solve provides the seed.
    const auto seed = solve_symmetric_core(ctx.beta, ctx.L, ctx.beta / ctx.L, ctx.K, ctx.k);
    std::array<double, 2> x0;
    if (seed.found) {
        x0 = {seed.U, seed.u};
    } else {
        const double u0 = 2.0 * std::sqrt(ctx.K / (params.costs.h * ctx.L));
        x0 = {u0 / 4.0, u0};
    }
    auto result = damped_newton<2>(residuals, valid, x0, kSolverTol);

    const auto e = dictator_eval<double>(ctx, result.x[0], result.x[1]);
    SolveReport report;
    report.policy = make_policy(-result.x[1], -result.x[0], result.x[0], result.x[1], 0.0);
    report.value = {ValueKind::TwoPlayerDictator, e.c1, e.c2, report.policy, params};
    report.iterations = result.iterations;

    // Follower coefficient from her value-matching line (linear).
    {
        const double L = ctx.L, beta = ctx.beta;
        const double eu = std::exp(L * report.policy.u), emu = std::exp(-L * report.policy.u);
        const double eU = std::exp(L * report.policy.U), emU = std::exp(-L * report.policy.U);
        const double denom = (eu - eU) + (emu - emU);  // 2[cosh(Lu)-cosh(LU)] > 0
        const double cf =
            (ctx.c - beta * (report.policy.u - report.policy.U) - beta / L * (emu - emU)) / denom;
        PiecewiseValue follower{ValueKind::TwoPlayerFollower, cf, cf + beta / L, report.policy,
                                params};
        report.follower = follower;
        const double follower_residual =
            follower.value(report.policy.u) - follower.value(report.policy.U) - ctx.c;
        report.residual_norm = std::max(result.residual, std::abs(follower_residual));
    }
    report.converged = result.converged && report.policy.ordered();
    return report;
}

SolveReport solve_mfg_thresholds(const GameParams& params, double m) {
    require_mfg_preconditions(params);
    const auto ctx = mfg_ctx(params);
    const double center = params.alpha(m);

    SolveReport report;
    report.policy.center = center;

    if (params.costs.symmetric()) {
        // Exact symmetric reduction: d = -u and D = -U bitwise, so the
        // jump-chain offset vanishes identically.
        const auto sym = solve_symmetric_core(ctx.A, ctx.L, ctx.kappa, ctx.K_down, ctx.k_down);
        if (!sym.found) {
            report.residual_norm = std::numeric_limits<double>::infinity();
            report.converged = false;
            report.value = {ValueKind::MfgAsymmetric, 0, 0, report.policy, params};
            return report;
        }
        report.policy = make_policy(-sym.u, -sym.U, sym.U, sym.u, center);
        report.value = {ValueKind::MfgAsymmetric, sym.c1, sym.c2, report.policy, params};
        const auto e = mfg_eval<double>(ctx, -sym.u, -sym.U, sym.U, sym.u);
        report.residual_norm =
            std::max({std::abs(e.smooth_U), std::abs(e.match_u), std::abs(e.smooth_D),
                      std::abs(e.match_d)});
        report.iterations = 0;
        report.converged = report.residual_norm <= kSolverTol && report.policy.ordered();
        return report;
    }

    auto residuals = [&](const auto& x) -> std::array<std::decay_t<decltype(x[0])>, 4> {
        const auto e = mfg_eval<std::decay_t<decltype(x[0])>>(ctx, x[0], x[1], x[2], x[3]);
        return {e.smooth_U, e.match_u, e.smooth_D, e.match_d};
    };
    auto residuals_d = [&](const std::array<double, 4>& x) {
        return residuals(x);
    };
    auto valid = [&](const std::array<double, 4>& x) {
        return x[0] < x[1] - 1e-10 && x[1] < -1e-10 && x[2] > 1e-10 && x[3] > x[2] + 1e-10 &&
               x[3] < 120.0 / ctx.L && x[0] > -120.0 / ctx.L;
    };

    // Continuation from the symmetrized cost set toward the actual one.
    GameParams sym_params = params;
    const auto& cs = params.costs;
    sym_params.costs.h = sym_params.costs.p = 0.5 * (cs.h + cs.p);
    sym_params.costs.K_plus = sym_params.costs.K_minus = 0.5 * (cs.K_plus + cs.K_minus);
    sym_params.costs.k_plus = sym_params.costs.k_minus = 0.5 * (cs.k_plus + cs.k_minus);
    const auto sym_ctx = mfg_ctx(sym_params);
    const auto sym =
        solve_symmetric_core(sym_ctx.A, sym_ctx.L, sym_ctx.kappa, sym_ctx.K_down, sym_ctx.k_down);

    std::array<double, 4> x0;
    if (sym.found) {
        x0 = {-sym.u, -sym.U, sym.U, sym.u};
    } else {
        const double u0 = 2.0 * std::sqrt(ctx.K_down / (cs.h * ctx.L));
        x0 = {-u0, -u0 / 4.0, u0 / 4.0, u0};
    }

    auto result = damped_newton<4>(residuals, valid, x0, kSolverTol);
    if (!result.converged) {
        // March the cost parameters from the symmetrized set to the target.
        std::array<double, 4> x = x0;
        bool ok = true;
        const int steps = 16;
        for (int i = 1; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            GameParams blend = params;
            blend.costs.h = (1 - t) * sym_params.costs.h + t * cs.h;
            blend.costs.p = (1 - t) * sym_params.costs.p + t * cs.p;
            blend.costs.K_plus = (1 - t) * sym_params.costs.K_plus + t * cs.K_plus;
            blend.costs.K_minus = (1 - t) * sym_params.costs.K_minus + t * cs.K_minus;
            blend.costs.k_plus = (1 - t) * sym_params.costs.k_plus + t * cs.k_plus;
            blend.costs.k_minus = (1 - t) * sym_params.costs.k_minus + t * cs.k_minus;
            const auto bctx = mfg_ctx(blend);
            auto blend_res = [&](const auto& y) -> std::array<std::decay_t<decltype(y[0])>, 4> {
                const auto e = mfg_eval<std::decay_t<decltype(y[0])>>(bctx, y[0], y[1], y[2], y[3]);
                return {e.smooth_U, e.match_u, e.smooth_D, e.match_d};
            };
            auto step = damped_newton<4>(blend_res, valid, x, kSolverTol);
            if (!step.converged) {
                ok = false;
                break;
            }
            x = step.x;
        }
        if (ok) {
            auto polished = damped_newton<4>(residuals, valid, x, kSolverTol);
            if (polished.residual < result.residual) result = polished;
        }
    }

    const auto e = mfg_eval<double>(ctx, result.x[0], result.x[1], result.x[2], result.x[3]);
    report.policy = make_policy(result.x[0], result.x[1], result.x[2], result.x[3], center);
    report.value = {ValueKind::MfgAsymmetric, e.c1, e.c2, report.policy, params};
    report.residual_norm = inf_norm<4>(residuals_d(result.x));
    report.iterations = result.iterations;
    report.converged = result.converged && report.policy.ordered();
    return report;
}

SolveReport solve_single_player(const GameParams& params) {
    GameParams p = params;
    p.alpha_slope = 0;
    p.alpha_intercept = 0;
    SolveReport report = solve_mfg_thresholds(p, 0.0);
    report.value.kind = ValueKind::SinglePlayer;
    report.value.params = params;
    return report;
}

} // namespace impulse_games
