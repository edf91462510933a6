#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "taem/coupling.hpp"
#include "taem/parallel.hpp"
#include "taem/problem.hpp"
#include "taem/scheme.hpp"

namespace taem {

struct DegenerateDesignError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Ordinary least squares y = slope x + intercept with Student-t 95%
/// confidence intervals on both coefficients.
struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    std::pair<double, double> slope_ci95{0.0, 0.0};
    std::pair<double, double> intercept_ci95{0.0, 0.0};
    int n_points = 0;
    double r_squared = 0.0;
};

inline RegressionFit ols_fit(const std::vector<std::pair<double, double>>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw DegenerateDesignError("ols_fit: need at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0) throw DegenerateDesignError("ols_fit: zero variance in x");

    RegressionFit fit;
    fit.n_points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (auto& [x, y] : points) {
        double r = y - (fit.intercept + fit.slope * x);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    double sigma2 = ss_res / (n - 2);
    fit.slope_stderr = std::sqrt(sigma2 / sxx);
    fit.intercept_stderr = std::sqrt(sigma2 * (1.0 / n + mx * mx / sxx));
    boost::math::students_t dist(n - 2);
    double tq = boost::math::quantile(dist, 0.975);
    fit.slope_ci95 = {fit.slope - tq * fit.slope_stderr, fit.slope + tq * fit.slope_stderr};
    fit.intercept_ci95 = {fit.intercept - tq * fit.intercept_stderr,
                          fit.intercept + tq * fit.intercept_stderr};
    return fit;
}

struct RateLevel {
    int k = 0;
    double delta_coarse = 0.0;
    double delta_fine = 0.0;
    LevelStats stats;
};

/// Convergence-rate experiment: mean coupled differences at Delta_k =
/// 2^-k Delta_0, regressed as (-k log 2, log mean).  The fitted slope is
/// the empirical strong rate.
struct RateExperiment {
    std::string problem;
    double delta0 = 0.0;
    int levels = 0;
    std::vector<std::size_t> samples;
    double t_end = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<RateLevel> per_level;
    RegressionFit fit;
};

/// Core of the rate experiment with an injectable level sampler
/// (k, delta_coarse) -> LevelStats, so the regression path can be tested
/// against exact synthetic decays.
template <class LevelSampler>
RateExperiment estimate_rate_with(LevelSampler&& sampler, const std::string& problem_name,
                                  double delta0, int levels,
                                  const std::vector<std::size_t>& samples, double t_end,
                                  std::uint64_t master_seed) {
    if (static_cast<int>(samples.size()) != levels) {
        throw std::invalid_argument("estimate_rate: need one sample count per level");
    }
    RateExperiment exp;
    exp.problem = problem_name;
    exp.delta0 = delta0;
    exp.levels = levels;
    exp.samples = samples;
    exp.t_end = t_end;
    exp.master_seed = master_seed;
    std::vector<std::pair<double, double>> points;
    for (int k = 1; k <= levels; ++k) {
        RateLevel level;
        level.k = k;
        level.delta_coarse = std::ldexp(delta0, -k);
        level.delta_fine = 0.5 * level.delta_coarse;
        level.stats = sampler(k, level.delta_coarse);
        if (!(level.stats.mean > 0.0)) {
            throw std::runtime_error("estimate_rate: degenerate level with zero mean difference");
        }
        points.emplace_back(-k * std::log(2.0), std::log(level.stats.mean));
        exp.per_level.push_back(level);
    }
    exp.fit = ols_fit(points);
    return exp;
}

inline RateExperiment estimate_rate(const SdeProblem& problem, double delta0, int levels,
                                    const std::vector<std::size_t>& samples, double t_end,
                                    std::uint64_t master_seed,
                                    LogBase log_base = LogBase::natural) {
    auto sampler = [&](int k, double delta_coarse) {
        SchemeConfig config;
        config.delta = delta_coarse;
        config.t_end = t_end;
        config.log_base = log_base;
        // Decorrelate levels through the seed derivation chain.
        std::uint64_t level_seed = master_seed ^ (0x9e3779b97f4a7c15ULL * (k + 1));
        return sample_level(problem, delta_coarse, config, samples[k - 1], level_seed);
    };
    return estimate_rate_with(sampler, problem.name, delta0, levels, samples, t_end, master_seed);
}

struct CostPoint {
    double delta = 0.0;
    std::size_t n_samples = 0;
    double mean_steps = 0.0;
    double stderr_ = 0.0;
};

/// Cost experiment: mean adaptive step count N_T per Delta, regressed as
/// (log Delta, log mean N_T); the slope is the empirical cost exponent.
struct CostExperiment {
    std::string problem;
    std::vector<CostPoint> per_delta;
    double t_end = 0.0;
    std::uint64_t master_seed = 0;
    RegressionFit fit;
};

template <class StepSampler>
CostExperiment estimate_cost_with(StepSampler&& sampler, const std::string& problem_name,
                                  const std::vector<double>& deltas, std::size_t n_samples,
                                  double t_end, std::uint64_t master_seed) {
    if (deltas.size() < 3) throw DegenerateDesignError("estimate_cost: need >= 3 delta values");
    CostExperiment exp;
    exp.problem = problem_name;
    exp.t_end = t_end;
    exp.master_seed = master_seed;
    std::vector<std::pair<double, double>> points;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        CostPoint pt = sampler(j, deltas[j], n_samples);
        exp.per_delta.push_back(pt);
        points.emplace_back(std::log(pt.delta), std::log(pt.mean_steps));
    }
    exp.fit = ols_fit(points);
    return exp;
}

inline CostExperiment estimate_cost(const SdeProblem& problem, const std::vector<double>& deltas,
                                    std::size_t n_samples, double t_end,
                                    std::uint64_t master_seed,
                                    LogBase log_base = LogBase::natural) {
    auto sampler = [&](std::size_t j, double delta, std::size_t n) {
        SchemeConfig config;
        config.delta = delta;
        config.t_end = t_end;
        config.log_base = log_base;
        std::uint64_t point_seed = master_seed ^ (0xd1342543de82ef95ULL * (j + 1));
        auto counts = parallel_map(n, [&](std::size_t i) {
            auto stream = NormalStream::derived(point_seed, i);
            return static_cast<double>(simulate_path(problem, config, stream).n_steps);
        });
        double sum = 0.0, sum2 = 0.0;
        for (double c : counts) {
            sum += c;
            sum2 += c * c;
        }
        CostPoint pt;
        pt.delta = delta;
        pt.n_samples = n;
        pt.mean_steps = sum / n;
        if (n >= 2) {
            double var = (sum2 - sum * sum / n) / (n - 1);
            pt.stderr_ = std::sqrt(std::max(var, 0.0) / n);
        }
        return pt;
    };
    return estimate_cost_with(sampler, problem.name, deltas, n_samples, t_end, master_seed);
}

struct InterceptShift {
    RateExperiment at_a;
    RateExperiment at_b;
    double intercept_a = 0.0;
    double intercept_b = 0.0;
    double abs_difference = 0.0;
};

/// Reruns the rate experiment at two horizons and compares intercepts.
inline InterceptShift intercept_shift(const SdeProblem& problem, double delta0, int levels,
                                      const std::vector<std::size_t>& samples, double t_end_a,
                                      double t_end_b, std::uint64_t master_seed,
                                      LogBase log_base = LogBase::natural) {
    InterceptShift out;
    out.at_a = estimate_rate(problem, delta0, levels, samples, t_end_a, master_seed, log_base);
    out.at_b = estimate_rate(problem, delta0, levels, samples, t_end_b, master_seed, log_base);
    out.intercept_a = out.at_a.fit.intercept;
    out.intercept_b = out.at_b.fit.intercept;
    out.abs_difference = std::abs(out.intercept_a - out.intercept_b);
    return out;
}

}  // namespace taem
