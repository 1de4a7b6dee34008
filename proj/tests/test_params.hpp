#pragma once

#include <cmath>

#include "impulse_games/model.hpp"

namespace impulse_games::testing {

/// Symmetric duopoly defaults: h=2, K=3, k=1, r=0.5, sigma=sqrt(2)/2, c=1.
inline GameParams paper_two_player() {
    GameParams p;
    p.costs = {2.0, 2.0, 3.0, 3.0, 1.0, 1.0, 1.0};
    p.r = 0.5;
    p.sigma = std::sqrt(2.0) / 2.0;
    return p;
}

/// Generic asymmetric mean-field set: h=1, p=2, K-=3, k-=1, K+=3.25, k+=1.5,
/// r=0.5, sigma=1, alpha(m) = 0.5 m.
inline GameParams mfg_asym_params() {
    GameParams p;
    p.costs = {1.0, 2.0, 3.25, 3.0, 1.5, 1.0, 0.0};
    p.r = 0.5;
    p.sigma = 1.0;
    p.alpha_slope = 0.5;
    return p;
}

} // namespace impulse_games::testing
