#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "taem/problem.hpp"

namespace taem {

namespace detail {

/// |x|^(2/3) composed as (x^2)^(1/3), well defined for negative x.
inline double pow23(double x) { return std::cbrt(x * x); }

/// Grid minimum of sigma over the mu-balls around the discontinuities.
inline double grid_min_sigma_near_xi(const SdeProblem& p, int n = 20001) {
    double lo = std::numeric_limits<double>::infinity();
    for (double xi : p.xi) {
        for (int i = 0; i < n; ++i) {
            double x = xi - p.mu + 2.0 * p.mu * i / (n - 1);
            lo = std::min(lo, p.diffusion(x));
        }
    }
    return lo;
}

/// Grid-certified upper bound of x b(x) + (p0-1)/2 sigma^2(x) - gamma x^2
/// over [-50, 50], used as the stored eta.
inline double grid_eta(const SdeProblem& p, int n = 200001) {
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double x = -50.0 + 100.0 * i / (n - 1);
        double s = p.diffusion(x);
        double v = x * p.drift(x) + 0.5 * (p.p0 - 1.0) * s * s - p.gamma * x * x;
        hi = std::max(hi, v);
    }
    return hi;
}

inline SdeProblem finalize(SdeProblem p) {
    if (p.xi.size() >= 2) {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < p.xi.size(); ++i) {
            gap = std::min(gap, p.xi[i] - p.xi[i - 1]);
        }
        p.mu = 0.5 * gap;
    } else {
        p.mu = 0.5;
    }
    p.nu = grid_min_sigma_near_xi(p);
    if (!(p.nu > 0.0)) {
        throw std::logic_error("registry: sigma not bounded away from zero near Xi for " + p.name);
    }
    p.eta = grid_eta(p);
    return p;
}

inline std::map<std::string, SdeProblem> make_builtin_problems() {
    std::map<std::string, SdeProblem> reg;

    {
        SdeProblem p;
        p.name = "ex1";
        p.drift = [](double x) { return x >= 0.0 ? -x - x * x * x : 1.0 - x - x * x * x; };
        p.diffusion = [](double x) {
            return x < -1.0 ? 0.0 : (1.0 + x) * (1.0 + pow23(x));
        };
        p.xi = {0.0};
        p.x0 = 0.0;
        p.p0 = 20.0;
        p.l = 2.0;
        p.m = 1.0;
        p.alpha = 1.0 / 6.0;
        p.gamma = -1.0;
        p.one_sided_lipschitz = -1.0;
        p.table_constant_label = "L1";
        std::string key = p.name;
        reg.emplace(std::move(key), finalize(std::move(p)));
    }
    {
        SdeProblem p;
        p.name = "ex2";
        p.drift = [](double x) { return x >= 0.0 ? -1.0 + x - x * x * x : x - x * x * x; };
        p.diffusion = [](double x) {
            return x < -1.0 ? 0.0 : (1.0 + x) * (1.0 + pow23(x));
        };
        p.xi = {0.0};
        p.x0 = 0.0;
        p.p0 = 20.0;
        p.l = 2.0;
        p.m = 1.0;
        p.alpha = 1.0 / 6.0;
        p.gamma = 1.0;
        p.one_sided_lipschitz = 1.0;
        p.table_constant_label = "L1";
        std::string key = p.name;
        reg.emplace(std::move(key), finalize(std::move(p)));
    }
    {
        SdeProblem p;
        p.name = "ex3";
        p.drift = [](double x) {
            if (x > 2.0) return 1.0 + x - x * x * x;
            if (x >= 0.0) return x * x + 1.0;
            return x - x * x * x;
        };
        p.diffusion = [](double x) {
            double x2 = x * x;
            return 1.0 + std::sqrt((x2 * x2 + pow23(x) * pow23(x)) / 14.0);
        };
        p.xi = {0.0, 2.0};
        p.x0 = 0.2;
        p.p0 = 26.0;
        p.l = 2.0;
        p.m = 1.0;
        p.alpha = 1.0 / 6.0;
        p.gamma = -1.0;
        p.one_sided_lipschitz = -1.0;
        p.table_constant_label = "L2";
        std::string key = p.name;
        reg.emplace(std::move(key), finalize(std::move(p)));
    }
    {
        SdeProblem p;
        p.name = "ex4";
        p.drift = [](double x) {
            if (x > 2.0) return 1.0 + x - pow23(x);
            if (x >= 0.0) return x * x + 1.0;
            return x;
        };
        p.diffusion = [](double x) { return 1.0 + pow23(x); };
        p.xi = {0.0, 2.0};
        p.x0 = 0.0;
        p.p0 = 20.0;
        p.l = 1.0;
        p.m = 4.0 / 3.0;
        p.alpha = 1.0 / 6.0;
        p.gamma = 1.0;
        p.one_sided_lipschitz = 1.0;
        p.table_constant_label = "L2";
        std::string key = p.name;
        reg.emplace(std::move(key), finalize(std::move(p)));
    }
    return reg;
}

}  // namespace detail

inline const std::map<std::string, SdeProblem>& builtin_problems() {
    static const std::map<std::string, SdeProblem> reg = detail::make_builtin_problems();
    return reg;
}

inline const SdeProblem& get_problem(const std::string& name) {
    const auto& reg = builtin_problems();
    auto it = reg.find(name);
    if (it == reg.end()) {
        std::ostringstream msg;
        msg << "unknown problem '" << name << "'; available:";
        for (const auto& [k, v] : reg) msg << ' ' << k;
        throw std::invalid_argument(msg.str());
    }
    return it->second;
}

}  // namespace taem
