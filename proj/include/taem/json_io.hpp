#pragma once

#include <nlohmann/json.hpp>

#include "taem/problem.hpp"
#include "taem/scheme.hpp"
#include "taem/stats.hpp"

namespace taem {

/// Problem metadata for experiment provenance records.
inline nlohmann::json describe(const SdeProblem& p) {
    nlohmann::json j{
        {"name", p.name},
        {"x0", p.x0},
        {"xi", p.xi},
        {"l", p.l},
        {"m", p.m},
        {"alpha", p.alpha},
        {"p0", p.p0},
        {"gamma", p.gamma},
        {"eta", p.eta},
        {"mu", p.mu},
        {"nu", p.nu},
    };
    if (p.one_sided_lipschitz) {
        j["one_sided_lipschitz"] = *p.one_sided_lipschitz;
        j["one_sided_lipschitz_label"] = p.table_constant_label;
    } else {
        j["one_sided_lipschitz"] = nullptr;
    }
    return j;
}

inline nlohmann::json fit_to_json(const RegressionFit& fit) {
    return nlohmann::json{
        {"slope", fit.slope},
        {"intercept", fit.intercept},
        {"slope_stderr", fit.slope_stderr},
        {"intercept_stderr", fit.intercept_stderr},
        {"slope_ci", {fit.slope_ci95.first, fit.slope_ci95.second}},
        {"intercept_ci", {fit.intercept_ci95.first, fit.intercept_ci95.second}},
        {"r_squared", fit.r_squared},
        {"n_points", fit.n_points},
    };
}

inline nlohmann::json validity_to_json(const ValidityReport& r) {
    nlohmann::json j{
        {"taming_ok", r.taming_ok},
        {"separation_ok", r.separation_ok},
        {"eps1", r.eps1},
        {"eps2", r.eps2},
    };
    if (r.eps0) j["eps0"] = *r.eps0;
    return j;
}

}  // namespace taem
