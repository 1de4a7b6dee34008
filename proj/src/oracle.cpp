#include "impulse_games/oracle.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "impulse_games/errors.hpp"

namespace impulse_games {

void Grid::validate() const {
    if (n < 201) throw std::invalid_argument("grid needs at least 201 points");
    if (!(lo < hi)) throw std::invalid_argument("grid needs lo < hi");
}

Grid default_grid(const GameParams& params, double m, int n) {
    const auto dc = derived_constants(params);
    const double K = std::max(params.costs.K_plus, params.costs.K_minus);
    const double u0 = 2.0 * std::sqrt(K / (params.costs.h * dc.lambda));
    const double center = params.alpha(m);
    return {center - 3.0 * u0, center + 3.0 * u0, n};
}

namespace {

int first_continuation(const GridSolution& sol) {
    for (int i = 0; i < sol.grid.n; ++i)
        if (!sol.action_mask[i]) return i;
    return -1;
}

int last_continuation(const GridSolution& sol) {
    for (int i = sol.grid.n - 1; i >= 0; --i)
        if (!sol.action_mask[i]) return i;
    return -1;
}

} // namespace

double GridSolution::band_lo() const {
    const int i = first_continuation(*this);
    if (i < 0) throw std::logic_error("empty continuation set");
    return grid.x(i);
}

double GridSolution::band_hi() const {
    const int i = last_continuation(*this);
    if (i < 0) throw std::logic_error("empty continuation set");
    return grid.x(i);
}

std::pair<std::vector<double>, std::vector<int>> intervention_operator_grid(
    const std::vector<double>& values, const Grid& grid, const CostSpec& costs) {
    grid.validate();
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("values size does not match grid");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite grid values");

    const int n = grid.n;
    const double step = grid.step();
    std::vector<double> mv(n);
    std::vector<int> target(n);
    for (int i = 0; i < n; ++i) {
        // Scan by increasing displacement so that ties resolve to the
        // smallest |delta|.
        double best = values[i] + costs.impulse_cost(0.0);
        int best_j = i;
        for (int off = 1; off < n; ++off) {
            bool any = false;
            if (i + off < n) {
                any = true;
                const double cand = values[i + off] + costs.impulse_cost(off * step);
                if (cand < best) {
                    best = cand;
                    best_j = i + off;
                }
            }
            if (i - off >= 0) {
                any = true;
                const double cand = values[i - off] + costs.impulse_cost(-off * step);
                if (cand < best) {
                    best = cand;
                    best_j = i - off;
                }
            }
            if (!any) break;
        }
        mv[i] = best;
        target[i] = best_j;
    }
    return {std::move(mv), std::move(target)};
}

GridSolution solve_qvi_grid(const GameParams& params, double m, const Grid& grid) {
    params.validate();
    grid.validate();

    const int n = grid.n;
    const double step = grid.step();
    const double center = params.alpha(m);
    const double diff = 0.5 * params.sigma * params.sigma / (step * step);
    const auto& costs = params.costs;

    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = costs.running_cost(grid.x(i) - center);

    GridSolution sol;
    sol.grid = grid;
    sol.action_mask.assign(n, 0);
    sol.jump_targets.assign(n, 0);
    for (int i = 0; i < n; ++i) sol.jump_targets[i] = i;

    // Resolve chains of action points so every action row anchors at a
    // continuation point (cycles would make the linear system singular).
    auto resolve_target = [&](int i) {
        int t = sol.jump_targets[i];
        double extra = 0;
        int hops = 0;
        while (sol.action_mask[t] && hops++ < n) {
            const int next = sol.jump_targets[t];
            if (next == t) break;
            extra += costs.impulse_cost((next - t) * step);
            t = next;
        }
        return std::make_pair(t, extra);
    };

    auto solve_linear = [&](std::vector<double>& out) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(3 * n);
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) {
            if (sol.action_mask[i]) {
                auto [t, extra] = resolve_target(i);
                trip.emplace_back(i, i, 1.0);
                trip.emplace_back(i, t, -1.0);
                rhs(i) = costs.impulse_cost((t - i) * step) + extra;
            } else if (i == 0) {
                trip.emplace_back(i, 0, 1.0);
                trip.emplace_back(i, 1, -1.0);
                rhs(i) = costs.k_plus * step;  // tail slope -k_plus
            } else if (i == n - 1) {
                trip.emplace_back(i, n - 1, 1.0);
                trip.emplace_back(i, n - 2, -1.0);
                rhs(i) = costs.k_minus * step;  // tail slope +k_minus
            } else {
                trip.emplace_back(i, i - 1, diff);
                trip.emplace_back(i, i, -2.0 * diff - params.r);
                trip.emplace_back(i, i + 1, diff);
                rhs(i) = -f[i];
            }
        }
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("oracle: singular policy-iteration system");
        Eigen::VectorXd v = lu.solve(rhs);
        out.assign(v.data(), v.data() + n);
    };

    solve_linear(sol.values);

    const int max_sweeps = 80;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        sol.iterations = sweep + 1;
        auto [mv, tgt] = intervention_operator_grid(sol.values, grid, costs);
        double scale = 0;
        for (double v : sol.values) scale = std::max(scale, std::abs(v));
        std::vector<std::uint8_t> mask(n);
        for (int i = 0; i < n; ++i) mask[i] = mv[i] - sol.values[i] <= 1e-12 * (1 + scale);

        const bool mask_stable = mask == sol.action_mask;
        sol.action_mask = std::move(mask);
        sol.jump_targets = std::move(tgt);

        std::vector<double> next;
        solve_linear(next);
        double change = 0;
        for (int i = 0; i < n; ++i) {
            change = std::max(change, std::abs(next[i] - sol.values[i]));
            sol.monotone_violation = std::max(sol.monotone_violation, next[i] - sol.values[i]);
        }
        sol.values = std::move(next);

        if (mask_stable && change < 1e-9 * (1 + scale)) break;
        if (sweep == max_sweeps - 1)
            throw std::runtime_error("oracle: policy iteration did not settle");
    }

    const int lo_i = first_continuation(sol);
    const int hi_i = last_continuation(sol);
    if (lo_i <= 1 || hi_i >= n - 2 || lo_i < 0)
        throw GridTooSmallError("continuation band touches the grid truncation");
    return sol;
}

} // namespace impulse_games
