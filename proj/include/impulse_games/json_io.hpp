#pragma once

#include <json.hpp>

#include "impulse_games/model.hpp"
#include "impulse_games/solver.hpp"
#include "impulse_games/verifier.hpp"

namespace impulse_games {

using nlohmann::json;

inline void to_json(json& j, const CostSpec& c) {
    j = {{"h", c.h},           {"p", c.p},           {"K_plus", c.K_plus},
         {"K_minus", c.K_minus}, {"k_plus", c.k_plus}, {"k_minus", c.k_minus},
         {"c", c.c}};
}

inline void from_json(const json& j, CostSpec& c) {
    j.at("h").get_to(c.h);
    j.at("p").get_to(c.p);
    j.at("K_plus").get_to(c.K_plus);
    j.at("K_minus").get_to(c.K_minus);
    j.at("k_plus").get_to(c.k_plus);
    j.at("k_minus").get_to(c.k_minus);
    j.at("c").get_to(c.c);
}

inline void to_json(json& j, const GameParams& p) {
    j = {{"costs", p.costs},
         {"r", p.r},
         {"sigma", p.sigma},
         {"alpha_slope", p.alpha_slope},
         {"alpha_intercept", p.alpha_intercept}};
}

inline void from_json(const json& j, GameParams& p) {
    j.at("costs").get_to(p.costs);
    j.at("r").get_to(p.r);
    j.at("sigma").get_to(p.sigma);
    j.at("alpha_slope").get_to(p.alpha_slope);
    j.at("alpha_intercept").get_to(p.alpha_intercept);
}

inline void to_json(json& j, const BandPolicy& b) {
    j = {{"d", b.d}, {"D", b.D}, {"U", b.U}, {"u", b.u}, {"center", b.center}};
}

inline void from_json(const json& j, BandPolicy& b) {
    j.at("d").get_to(b.d);
    j.at("D").get_to(b.D);
    j.at("U").get_to(b.U);
    j.at("u").get_to(b.u);
    j.at("center").get_to(b.center);
}

inline void to_json(json& j, const PiecewiseValue& v) {
    j = {{"kind", to_string(v.kind)},
         {"c1", v.c1},
         {"c2", v.c2},
         {"policy", v.policy},
         {"params", v.params}};
}

inline void from_json(const json& j, PiecewiseValue& v) {
    v.kind = value_kind_from_string(j.at("kind").get<std::string>());
    j.at("c1").get_to(v.c1);
    j.at("c2").get_to(v.c2);
    j.at("policy").get_to(v.policy);
    j.at("params").get_to(v.params);
}

inline void to_json(json& j, const SolveReport& r) {
    j = {{"policy", r.policy},
         {"value", r.value},
         {"residual_norm", r.residual_norm},
         {"iterations", r.iterations},
         {"converged", r.converged}};
    if (r.follower) j["follower"] = *r.follower;
}

inline void to_json(json& j, const CheckReport& r) {
    j = {{"check", r.check},
         {"pass", r.pass},
         {"applicable", r.applicable},
         {"worst_violation", r.worst_violation},
         {"location", r.location}};
    if (!r.note.empty()) j["note"] = r.note;
}

inline void to_json(json& j, const QviReport& r) {
    j = {{"pass", r.pass}, {"worst_violation", r.worst_violation}, {"checks", r.checks}};
}

} // namespace impulse_games
