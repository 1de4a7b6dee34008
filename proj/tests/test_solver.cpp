#include <doctest.h>

#include <cmath>

#include "impulse_games/solver.hpp"
#include "test_params.hpp"

using namespace impulse_games;
using testing::mfg_asym_params;
using testing::paper_two_player;

namespace {

// Every pasting equation, evaluated through the public piecewise form.
double pushback_residual(const SolveReport& rep) {
    const auto& v = rep.value;
    const auto& b = rep.policy;
    const auto& cs = rep.value.params.costs;
    const double c0 = b.center;
    double worst = 0;
    auto track = [&](double r) { worst = std::max(worst, std::abs(r)); };
    track(v.value(c0 + b.u) - v.value(c0 + b.U) - cs.K_minus - cs.k_minus * (b.u - b.U));
    track(v.slope(c0 + b.U) - cs.k_minus);
    track(v.slope(c0 + b.u - 1e-9) - cs.k_minus);
    if (v.kind == ValueKind::MfgAsymmetric || v.kind == ValueKind::SinglePlayer) {
        track(v.value(c0 + b.d) - v.value(c0 + b.D) - cs.K_plus - cs.k_plus * (b.D - b.d));
        track(v.slope(c0 + b.D) + cs.k_plus);
        track(v.slope(c0 + b.d + 1e-9) + cs.k_plus);
    }
    return worst;
}

} // namespace

TEST_CASE("NE-1 reproduces the published duopoly solution") {
    const auto rep = solve_two_player_symmetric(paper_two_player());
    REQUIRE(rep.converged);
    CHECK(rep.residual_norm <= 1e-10);
    CHECK(std::abs(rep.policy.U - 0.686) <= 1e-3);
    CHECK(std::abs(rep.policy.u - 5.658) <= 1e-3);
    CHECK(std::abs(rep.value.c1 - (-0.003)) <= 1e-3);
    CHECK(std::abs(rep.value.c2 - 1.972) <= 1e-3);
    CHECK(rep.value.c1 < 0);
    CHECK(rep.value.c2 > 0);
    CHECK(rep.policy.ordered());

    // NE-1 sanity: value matching and the opponent condition hold through the
    // public evaluation path.
    const auto& v = rep.value;
    CHECK(std::abs(v.value(v.policy.u) - v.value(v.policy.U) - 3.0 -
                   1.0 * (v.policy.u - v.policy.U)) <= 1e-8);
    CHECK(std::abs(v.value(-v.policy.u) - v.value(-v.policy.U) - 1.0) <= 1e-8);
    CHECK(pushback_residual(rep) <= 1e-8);
}

TEST_CASE("NE-1 threshold grows with the opponent cost") {
    GameParams p = paper_two_player();
    const double u_base = solve_two_player_symmetric(p).policy.u;
    p.costs.c *= 10.0;
    const double u_expensive = solve_two_player_symmetric(p).policy.u;
    CHECK(u_expensive > u_base);
}

TEST_CASE("NE-1 rejects degenerate preconditions") {
    GameParams p = paper_two_player();
    p.costs.k_plus = p.costs.k_minus = 2.0;  // h/2 - r*k = 0
    CHECK_THROWS_AS(solve_two_player_symmetric(p), IllPosedError);

    p = paper_two_player();
    p.costs.c = 0.0;
    CHECK_THROWS_AS(solve_two_player_symmetric(p), IllPosedError);

    p = paper_two_player();
    p.costs.p = 1.0;  // asymmetric costs
    CHECK_THROWS_AS(solve_two_player_symmetric(p), IllPosedError);
}

TEST_CASE("NE-2 reproduces the published dictator/follower solution") {
    const auto rep = solve_two_player_dictator(paper_two_player());
    REQUIRE(rep.converged);
    REQUIRE(rep.follower.has_value());
    CHECK(std::abs(rep.policy.U - 0.993) <= 1e-3);
    CHECK(std::abs(rep.policy.u - 1.999) <= 1e-3);
    CHECK(std::abs(rep.value.c1 - (-0.101)) <= 1e-3);
    CHECK(std::abs(rep.follower->c1 - (-0.133)) <= 1e-3);

    // Dictator coefficient bound c1 in (-h2/(r*lambda2), 0).
    CHECK(rep.value.c1 > -2.0);
    CHECK(rep.value.c1 < 0.0);

    // Smooth fit of w1 at U and evenness.
    CHECK(rep.value.slope(rep.policy.U) == doctest::Approx(1.0).epsilon(1e-9));
    for (double s : {0.25, 0.6, 1.5, 3.0})
        CHECK(rep.value.value(s) == doctest::Approx(rep.value.value(-s)).epsilon(1e-12));

    // Follower value matching w2(u) = w2(U) + c.
    const auto& w2 = *rep.follower;
    CHECK(std::abs(w2.value(rep.policy.u) - w2.value(rep.policy.U) - 1.0) <= 1e-8);
}

TEST_CASE("MFG thresholds: symmetric costs give a symmetric band") {
    GameParams p = paper_two_player();
    const auto rep = solve_mfg_thresholds(p, 0.0);
    REQUIRE(rep.converged);
    CHECK(rep.policy.d == -rep.policy.u);  // bitwise by construction
    CHECK(rep.policy.D == -rep.policy.U);
    CHECK(pushback_residual(rep) <= 1e-8);
}

TEST_CASE("MFG thresholds do not depend on the mean") {
    GameParams p = mfg_asym_params();
    const auto a = solve_mfg_thresholds(p, 0.0);
    const auto b = solve_mfg_thresholds(p, 7.0);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.policy.d == doctest::Approx(b.policy.d).epsilon(1e-12));
    CHECK(a.policy.D == doctest::Approx(b.policy.D).epsilon(1e-12));
    CHECK(a.policy.U == doctest::Approx(b.policy.U).epsilon(1e-12));
    CHECK(a.policy.u == doctest::Approx(b.policy.u).epsilon(1e-12));
    CHECK(a.policy.center == doctest::Approx(p.alpha(0.0)));
    CHECK(b.policy.center == doctest::Approx(p.alpha(7.0)));
}

TEST_CASE("MFG asymmetric solve satisfies the printed coefficient structure") {
    GameParams p = mfg_asym_params();
    const auto rep = solve_mfg_thresholds(p, 0.0);
    REQUIRE(rep.converged);
    CHECK(rep.policy.ordered());
    CHECK(pushback_residual(rep) <= 1e-8);

    const auto dc = derived_constants(p);
    const double bound = (p.costs.h + p.costs.p) / (2 * p.r * dc.lambda);
    CHECK(rep.value.c1 > -bound);
    CHECK(rep.value.c1 < 0);
    CHECK(rep.value.c2 > 0);
    CHECK(rep.value.c2 < bound);

    // Coefficient identity c2 = c1 (e^{Lu}-e^{LU})/(e^{-Lu}-e^{-LU}).
    const double L = dc.lambda;
    const auto& b = rep.policy;
    const double ratio = (std::exp(L * b.u) - std::exp(L * b.U)) /
                         (std::exp(-L * b.u) - std::exp(-L * b.U));
    CHECK(rep.value.c2 == doctest::Approx(rep.value.c1 * ratio).epsilon(1e-9));
}

TEST_CASE("single player: symmetric band, tighter than the duopoly") {
    GameParams p = paper_two_player();
    const auto mono = solve_single_player(p);
    REQUIRE(mono.converged);
    CHECK(mono.policy.d == -mono.policy.u);
    CHECK(mono.policy.D == -mono.policy.U);

    const auto duo = solve_two_player_symmetric(p);
    CHECK(mono.policy.u < duo.policy.u);
}

TEST_CASE("threshold equations are homogeneous of degree one in costs") {
    for (double rho : {0.5, 3.0, 10.0}) {
        GameParams base = mfg_asym_params();
        GameParams scaled = base;
        scaled.costs.h *= rho;
        scaled.costs.p *= rho;
        scaled.costs.K_plus *= rho;
        scaled.costs.K_minus *= rho;
        scaled.costs.k_plus *= rho;
        scaled.costs.k_minus *= rho;
        scaled.costs.c *= rho;

        const auto a = solve_mfg_thresholds(base, 0.0);
        const auto b = solve_mfg_thresholds(scaled, 0.0);
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        CHECK(b.policy.d == doctest::Approx(a.policy.d).epsilon(1e-9));
        CHECK(b.policy.D == doctest::Approx(a.policy.D).epsilon(1e-9));
        CHECK(b.policy.U == doctest::Approx(a.policy.U).epsilon(1e-9));
        CHECK(b.policy.u == doctest::Approx(a.policy.u).epsilon(1e-9));
        CHECK(b.value.c1 == doctest::Approx(rho * a.value.c1).epsilon(1e-9));
        CHECK(b.value.c2 == doctest::Approx(rho * a.value.c2).epsilon(1e-9));
        CHECK(b.value.value(b.policy.center) ==
              doctest::Approx(rho * a.value.value(a.policy.center)).epsilon(1e-9));
    }
}

TEST_CASE("MFG solve rejects vanishing fixed costs") {
    GameParams p = mfg_asym_params();
    p.costs.K_plus = 1e-9;
    CHECK_THROWS_AS(solve_mfg_thresholds(p, 0.0), IllPosedError);
}
