#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "taem/parallel.hpp"
#include "taem/problem.hpp"
#include "taem/rng.hpp"

namespace taem {

enum class LogBase { natural, base10 };

/// Parameters of the tamed-adaptive integrator.
struct SchemeConfig {
    double delta = 1e-4;   // step parameter, in (0, 1)
    double t_end = 1.0;    // horizon T
    LogBase log_base = LogBase::natural;
    std::uint64_t max_steps = 1'000'000'000ULL;
    bool record_trajectory = false;
};

inline double log_inv_delta(const SchemeConfig& config) {
    return config.log_base == LogBase::natural ? std::log(1.0 / config.delta)
                                               : std::log10(1.0 / config.delta);
}

/// eps1 = sqrt(Delta) log^2(1/Delta)
inline double epsilon1(const SchemeConfig& config) {
    double lg = log_inv_delta(config);
    return std::sqrt(config.delta) * lg * lg;
}

/// eps2 = Delta log^4(1/Delta)
inline double epsilon2(const SchemeConfig& config) {
    double lg = log_inv_delta(config);
    return config.delta * lg * lg * lg * lg;
}

/// sigma_Delta(x) = sigma(x) / (1 + sqrt(Delta) |sigma(x)|)
inline double sigma_tamed(double x, double delta, const SdeProblem& problem) {
    double s = problem.diffusion(x);
    return s / (1.0 + std::sqrt(delta) * std::abs(s));
}

namespace detail {

/// Delta-dependent constants of the step-size formula, hoisted out of the
/// per-step loop.
struct StepTable {
    double delta;
    double sqrt_delta;
    double lg4;
    double e1;
    double e2;

    explicit StepTable(const SchemeConfig& config)
        : delta(config.delta), sqrt_delta(std::sqrt(config.delta)) {
        double lg = log_inv_delta(config);
        lg4 = lg * lg * lg * lg;
        e1 = sqrt_delta * lg * lg;
        e2 = delta * lg4;
    }
};

/// |x|^l for the common small integer exponents without a pow call.
inline double abs_pow(double ax, double l) {
    if (l == 2.0) return ax * ax;
    if (l == 1.0) return ax;
    if (l == 0.0) return 1.0;
    return std::pow(ax, l);
}

/// Step size from already-evaluated |b(x)| and |sigma(x)|.
inline double step_size(double x, double abs_b, double abs_sigma, const StepTable& st,
                        const SdeProblem& problem) {
    double denom = 1.0 + abs_b + abs_sigma + abs_pow(std::abs(x), problem.l);
    denom *= denom;
    double d = dist_to_xi(x, problem);
    if (d > st.e1) {
        return st.delta / denom;
    }
    if (d > st.e2) {
        return d * d / (st.lg4 * denom);
    }
    return st.delta * st.delta * st.lg4 / denom;
}

inline double tame(double sigma, double sqrt_delta) {
    return sigma / (1.0 + sqrt_delta * std::abs(sigma));
}

}  // namespace detail

/// State-dependent step size h_Delta(x).  Far from Xi the step is
/// Delta / [1+|b|+|sigma|+|x|^l]^2; within the eps1-neighbourhood it shrinks
/// quadratically with the distance to Xi, and within the eps2-neighbourhood
/// it bottoms out at Delta^2 log^4(1/Delta) over the same denominator.
inline double step_size(double x, const SchemeConfig& config, const SdeProblem& problem) {
    detail::StepTable st(config);
    return detail::step_size(x, std::abs(problem.drift(x)), std::abs(problem.diffusion(x)), st,
                             problem);
}

/// Outcome of the step-parameter validity check
/// Delta log^4(1/Delta) < sqrt(Delta) log^2(1/Delta) < eps0 / 2.
/// Failure is advisory: h_Delta stays positive either way.
struct ValidityReport {
    bool taming_ok = false;      // eps2 < eps1
    bool separation_ok = false;  // eps1 < eps0/2 (vacuously true when Xi empty)
    std::optional<double> eps0;
    double eps1 = 0.0;
    double eps2 = 0.0;

    bool ok() const { return taming_ok && separation_ok; }
};

inline ValidityReport validate_delta(const SchemeConfig& config, const SdeProblem& problem) {
    ValidityReport r;
    r.eps1 = epsilon1(config);
    r.eps2 = epsilon2(config);
    r.taming_ok = r.eps2 < r.eps1;
    if (problem.xi.empty()) {
        r.separation_ok = true;
    } else {
        r.eps0 = epsilon0(problem);
        r.separation_ok = r.eps1 < 0.5 * *r.eps0;
    }
    return r;
}

/// Result of one simulated path.
struct PathOutcome {
    double y_end = 0.0;
    std::uint64_t n_steps = 0;  // N_T = 1 + #{k >= 1 : t_k < T}
    std::vector<std::pair<double, double>> trajectory;  // grid (t, Y_t), when recorded
};

struct StepCapExceeded : std::runtime_error {
    double t;
    double y;
    std::uint64_t steps;
    StepCapExceeded(double t_, double y_, std::uint64_t steps_)
        : std::runtime_error("step cap exceeded: Delta too small for this horizon/budget"),
          t(t_), y(y_), steps(steps_) {}
};

/// Tamed-adaptive Euler-Maruyama path on [0, T].  The final step is
/// truncated so the last Brownian increment spans exactly [t_i, T].
template <class Noise>
PathOutcome simulate_path(const SdeProblem& problem, const SchemeConfig& config, Noise&& noise) {
    PathOutcome out;
    const detail::StepTable st(config);
    double t = 0.0;
    double y = problem.x0;
    std::uint64_t grid_points_before_t_end = 0;
    if (config.record_trajectory) out.trajectory.emplace_back(0.0, y);
    for (;;) {
        double b = problem.drift(y);
        double sigma = problem.diffusion(y);
        double h = detail::step_size(y, std::abs(b), std::abs(sigma), st, problem);
        double s = detail::tame(sigma, st.sqrt_delta);
        double t_next = t + h;
        if (t_next >= config.t_end) {
            double dt = config.t_end - t;
            y += b * dt + s * (std::sqrt(dt) * noise());
            if (config.record_trajectory) out.trajectory.emplace_back(config.t_end, y);
            break;
        }
        // dt is recomputed from the clock so the arithmetic matches the
        // coupled engine increment for increment.
        double dt = t_next - t;
        y += b * dt + s * (std::sqrt(dt) * noise());
        t = t_next;
        ++grid_points_before_t_end;
        if (config.record_trajectory) out.trajectory.emplace_back(t, y);
        if (grid_points_before_t_end >= config.max_steps) {
            throw StepCapExceeded(t, y, grid_points_before_t_end);
        }
    }
    out.y_end = y;
    out.n_steps = 1 + grid_points_before_t_end;
    return out;
}

/// Path values observed at the given sorted times, using the in-step
/// interpolation Y_t = Y_{t_i} + b(Y_{t_i})(t - t_i) + sigma_Delta(Y_{t_i})(W_t - W_{t_i}).
/// Brownian increments are split consistently at observation times.
template <class Noise>
std::vector<double> simulate_path_observed(const SdeProblem& problem, const SchemeConfig& config,
                                           const std::vector<double>& times, Noise&& noise) {
    std::vector<double> observed;
    observed.reserve(times.size());
    const detail::StepTable st(config);
    double t = 0.0;            // global clock
    double t_grid = 0.0;       // last grid point
    double y = problem.x0;     // state at last grid point
    double w_acc = 0.0;        // Brownian increment accumulated since t_grid
    std::size_t obs = 0;
    std::uint64_t steps = 0;
    double horizon = std::max(config.t_end, times.empty() ? 0.0 : times.back());
    while (obs < times.size() && times[obs] <= 0.0) {
        observed.push_back(y);
        ++obs;
    }
    while (obs < times.size()) {
        double b = problem.drift(y);
        double sigma = problem.diffusion(y);
        double h = detail::step_size(y, std::abs(b), std::abs(sigma), st, problem);
        double s = detail::tame(sigma, st.sqrt_delta);
        double t_next = t_grid + h;
        // Observations inside the current step, evaluated without advancing
        // the grid.
        while (obs < times.size() && times[obs] < t_next) {
            double dt = times[obs] - t;
            w_acc += std::sqrt(dt) * noise();
            t = times[obs];
            observed.push_back(y + b * (t - t_grid) + s * w_acc);
            ++obs;
        }
        if (obs >= times.size()) break;
        double dt = t_next - t;
        w_acc += std::sqrt(dt) * noise();
        t = t_next;
        y += b * h + s * w_acc;
        t_grid = t_next;
        w_acc = 0.0;
        if (++steps >= config.max_steps) throw StepCapExceeded(t, y, steps);
        if (t > horizon + 1.0) break;  // unreachable guard
    }
    return observed;
}

struct MomentEstimate {
    double t = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;  // NaN when n_paths < 2
};

/// Monte Carlo estimate of E|Y_t|^order at each grid time.
inline std::vector<MomentEstimate> empirical_moment(const SdeProblem& problem,
                                                    const SchemeConfig& config, int order,
                                                    std::size_t n_paths,
                                                    const std::vector<double>& t_grid,
                                                    std::uint64_t master_seed) {
    if (order % 2 != 0 || order <= 0) {
        throw std::invalid_argument("empirical_moment: order must be a positive even integer");
    }
    auto samples = parallel_map(n_paths, [&](std::size_t i) {
        auto stream = NormalStream::derived(master_seed, i);
        auto vals = simulate_path_observed(problem, config, t_grid, stream);
        for (double& v : vals) v = std::pow(std::abs(v), order);
        return vals;
    });
    std::vector<MomentEstimate> out(t_grid.size());
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            sum += samples[i][j];
            sum2 += samples[i][j] * samples[i][j];
        }
        out[j].t = t_grid[j];
        out[j].mean = sum / n_paths;
        if (n_paths >= 2) {
            double var = (sum2 - sum * sum / n_paths) / (n_paths - 1);
            out[j].stderr_ = std::sqrt(std::max(var, 0.0) / n_paths);
        } else {
            out[j].stderr_ = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

struct GapEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Estimate of E|Y_T - Y_{underline{T}}|, the in-flight gap between the
/// horizon value and the last grid value before it.
inline GapEstimate increment_gap(const SdeProblem& problem, const SchemeConfig& config,
                                 std::size_t n_paths, std::uint64_t master_seed) {
    const detail::StepTable st(config);
    auto gaps = parallel_map(n_paths, [&](std::size_t i) {
        auto stream = NormalStream::derived(master_seed, i);
        double t = 0.0;
        double y = problem.x0;
        std::uint64_t steps = 0;
        for (;;) {
            double b = problem.drift(y);
            double sigma = problem.diffusion(y);
            double h = detail::step_size(y, std::abs(b), std::abs(sigma), st, problem);
            double s = detail::tame(sigma, st.sqrt_delta);
            if (t + h >= config.t_end) {
                double dt = config.t_end - t;
                double y_end = y + b * dt + s * std::sqrt(dt) * stream();
                return std::abs(y_end - y);
            }
            y += b * h + s * std::sqrt(h) * stream();
            t += h;
            if (++steps >= config.max_steps) throw StepCapExceeded(t, y, steps);
        }
    });
    double sum = 0.0, sum2 = 0.0;
    for (double g : gaps) {
        sum += g;
        sum2 += g * g;
    }
    GapEstimate out;
    out.mean = sum / n_paths;
    if (n_paths >= 2) {
        double var = (sum2 - sum * sum / n_paths) / (n_paths - 1);
        out.stderr_ = std::sqrt(std::max(var, 0.0) / n_paths);
    }
    return out;
}

}  // namespace taem
