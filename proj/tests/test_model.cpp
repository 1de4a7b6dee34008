#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "impulse_games/model.hpp"
#include "test_params.hpp"

using namespace impulse_games;
using testing::paper_two_player;

namespace {

// NE-1 value at the published solution (coefficients as printed in the
// reference solution; exact values come from the solver tests).
PiecewiseValue paper_ne1_value() {
    PiecewiseValue v;
    v.kind = ValueKind::TwoPlayerSymmetric;
    v.c1 = -0.003;
    v.c2 = 1.972;
    v.policy = {-5.658, -0.686, 0.686, 5.658, 0.0};
    v.params = paper_two_player();
    return v;
}

} // namespace

TEST_CASE("derived constants from the defining formulas") {
    GameParams p = paper_two_player();
    auto dc = derived_constants(p);
    CHECK(dc.h2 == doctest::Approx(1.0));
    CHECK(dc.sigma2 == doctest::Approx(1.0));
    CHECK(dc.lambda2 == doctest::Approx(1.0));

    p.r = 0.5;
    p.sigma = 1.0;
    CHECK(derived_constants(p).lambda == doctest::Approx(1.0));

    p.r = 2.0;
    p.sigma = 2.0;
    CHECK(derived_constants(p).lambda2 == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("parameter validation rejects ill-posed sets") {
    GameParams p = paper_two_player();
    CHECK_NOTHROW(p.validate());

    GameParams bad = p;
    bad.sigma = 0;
    CHECK_THROWS_AS(bad.validate(), IllPosedError);

    bad = p;
    bad.alpha_slope = 1.0;
    CHECK_THROWS_AS(bad.validate(), IllPosedError);

    bad = p;
    bad.costs.k_minus = 5.0;  // h - r*k_minus < 0
    CHECK_THROWS_AS(bad.validate(), IllPosedError);

    bad = p;
    bad.costs.K_plus = 0;
    CHECK_THROWS_AS(bad.validate(), IllPosedError);
}

TEST_CASE("NE-1 value at the origin equals c1 + c2") {
    const auto v = paper_ne1_value();
    CHECK(v.value(0.0) == doctest::Approx(1.969).epsilon(1e-9));
}

TEST_CASE("piecewise values are continuous at every breakpoint") {
    const auto v = paper_ne1_value();
    for (double b : {v.policy.d, v.policy.D, 0.0, v.policy.U, v.policy.u}) {
        for (double eps : {1e-6, 1e-8}) {
            const double jump = std::abs(v.value(b - eps) - v.value(b + eps));
            CHECK(jump <= 50.0 * eps);
        }
    }
}

TEST_CASE("analytic slope matches central differences away from kinks") {
    auto check_kind = [](const PiecewiseValue& v) {
        const double lo = v.policy.center + v.policy.d - 1.0;
        const double hi = v.policy.center + v.policy.u + 1.0;
        const double eps = 1e-5;
        for (int i = 0; i <= 100; ++i) {
            const double x = lo + (hi - lo) * i / 100;
            bool near_kink = false;
            for (double b : {v.policy.d, 0.0, v.policy.u, -v.policy.u})
                if (std::abs((x - v.policy.center) - b) < 2 * eps) near_kink = true;
            if (near_kink) continue;
            const double fd = (v.value(x + eps) - v.value(x - eps)) / (2 * eps);
            CHECK(v.slope(x) == doctest::Approx(fd).epsilon(1e-6));
        }
    };

    check_kind(paper_ne1_value());

    PiecewiseValue mfg;
    mfg.kind = ValueKind::MfgAsymmetric;
    mfg.c1 = -0.4;
    mfg.c2 = 1.1;
    mfg.policy = {-2.5, -0.9, 0.7, 2.0, 1.5};
    mfg.params = testing::mfg_asym_params();
    check_kind(mfg);
}

TEST_CASE("dictator and follower values are even functions") {
    PiecewiseValue w;
    w.kind = ValueKind::TwoPlayerDictator;
    w.c1 = -0.101;
    w.c2 = w.c1 + 2.0;  // c1 + beta/lambda2
    w.policy = {-1.999, -0.993, 0.993, 1.999, 0.0};
    w.params = paper_two_player();
    for (double s : {0.1, 0.7, 1.3, 2.5, 4.0}) {
        CHECK(w.value(s) == doctest::Approx(w.value(-s)).epsilon(1e-12));
        CHECK(w.slope(s) == doctest::Approx(-w.slope(-s)).epsilon(1e-12));
    }
    w.kind = ValueKind::TwoPlayerFollower;
    for (double s : {0.1, 0.7, 1.3, 2.5})
        CHECK(w.value(s) == doctest::Approx(w.value(-s)).epsilon(1e-12));
    CHECK(w.value(5.0) == doctest::Approx(w.value(w.policy.u)));  // flat beyond u
}

TEST_CASE("non-finite evaluation points are rejected") {
    const auto v = paper_ne1_value();
    CHECK_THROWS_AS(v.value(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(v.slope(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("band policy action region and jump maps") {
    BandPolicy b{-2.0, -1.0, 1.0, 3.0, 0.5};
    CHECK(b.ordered());
    CHECK(b.in_action(0.5 + 3.0));
    CHECK(b.in_action(0.5 - 2.0));
    CHECK(!b.in_action(0.5));
    CHECK(b.jump_target(4.0) == doctest::Approx(1.5));   // upper side -> center + U
    CHECK(b.jump_target(-2.0) == doctest::Approx(-0.5)); // lower side -> center + D
    CHECK(!b.scaled(0.5).in_action(0.5 + 1.4));
    CHECK(b.scaled(0.5).in_action(0.5 + 1.6));
}
