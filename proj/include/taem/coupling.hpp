#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "taem/parallel.hpp"
#include "taem/rng.hpp"
#include "taem/scheme.hpp"

namespace taem {

/// Terminal values of two tamed-adaptive paths driven by one Brownian motion.
struct CoupledSample {
    double y_coarse = 0.0;
    double y_fine = 0.0;
    double abs_diff = 0.0;
    std::uint64_t n_steps_coarse = 0;
    std::uint64_t n_steps_fine = 0;
};

/// Optional event log for tests: one entry per drawn Gaussian increment.
struct CoupledTrace {
    struct Event {
        double t_from;
        double t_to;
        double z;          // standard normal draw
        bool coarse_updated;
        bool fine_updated;
    };
    std::vector<Event> events;
};

namespace detail {

struct CoupledLeg {
    StepTable st;
    double y;
    double t_grid = 0.0;       // last grid point
    double t_event;            // next grid point
    double b;                  // drift at last grid point
    double s;                  // tamed diffusion at last grid point
    double h;                  // step scheduled from t_grid
    double w_acc = 0.0;        // Brownian increment since t_grid
    std::uint64_t grid_points = 0;

    CoupledLeg(const SdeProblem& problem, const SchemeConfig& base, double delta_)
        : st(with_delta(base, delta_)), y(problem.x0) {
        refresh(problem);
        t_event = h;
    }

    static SchemeConfig with_delta(SchemeConfig config, double delta_) {
        config.delta = delta_;
        return config;
    }

    void refresh(const SdeProblem& problem) {
        b = problem.drift(y);
        double sigma = problem.diffusion(y);
        s = tame(sigma, st.sqrt_delta);
        h = step_size(y, std::abs(b), std::abs(sigma), st, problem);
    }

    // Apply the Euler update for the interval [t_grid, t] with the
    // accumulated Brownian increment, then schedule the next event.
    void update(const SdeProblem& problem, double t, bool final_step,
                std::uint64_t max_steps) {
        y += b * (t - t_grid) + s * w_acc;
        w_acc = 0.0;
        t_grid = t;
        if (final_step) return;
        ++grid_points;
        if (grid_points >= max_steps) throw StepCapExceeded(t, y, grid_points);
        refresh(problem);
        t_event = t + h;
    }
};

}  // namespace detail

/// Fine/coarse coupled simulation on a merged event clock.  Each leg keeps
/// its own adaptive grid; the global clock advances to the earlier next
/// event, one Gaussian increment with variance equal to the elapsed
/// interval is delivered to both legs' accumulators, and a leg applies its
/// Euler update exactly when the clock reaches its event time (ties update
/// both, coarse first).  Both legs truncate their final step at T.
template <class Noise>
CoupledSample simulate_coupled(const SdeProblem& problem, double delta_coarse, double delta_fine,
                               const SchemeConfig& config, Noise&& noise,
                               CoupledTrace* trace = nullptr) {
    detail::CoupledLeg coarse(problem, config, delta_coarse);
    detail::CoupledLeg fine(problem, config, delta_fine);
    double t = 0.0;
    const double T = config.t_end;
    for (;;) {
        double t_next = std::min(coarse.t_event, fine.t_event);
        bool final_step = t_next >= T;
        if (final_step) t_next = T;
        double dt = t_next - t;
        double z = noise();
        double dw = std::sqrt(dt) * z;
        coarse.w_acc += dw;
        fine.w_acc += dw;
        bool hit_coarse = final_step || coarse.t_event == t_next;
        bool hit_fine = final_step || fine.t_event == t_next;
        if (trace) trace->events.push_back({t, t_next, z, hit_coarse, hit_fine});
        t = t_next;
        if (hit_coarse) coarse.update(problem, t, final_step, config.max_steps);
        if (hit_fine) fine.update(problem, t, final_step, config.max_steps);
        if (final_step) break;
    }
    CoupledSample out;
    out.y_coarse = coarse.y;
    out.y_fine = fine.y;
    out.abs_diff = std::abs(out.y_fine - out.y_coarse);
    out.n_steps_coarse = 1 + coarse.grid_points;
    out.n_steps_fine = 1 + fine.grid_points;
    return out;
}

/// Standard two-level coupling: fine step parameter is half the coarse one.
template <class Noise>
CoupledSample simulate_coupled(const SdeProblem& problem, double delta_coarse,
                               const SchemeConfig& config, Noise&& noise) {
    return simulate_coupled(problem, delta_coarse, 0.5 * delta_coarse, config, noise);
}

/// Sample statistics of |y_fine - y_coarse| over independent coupled paths.
struct LevelStats {
    double mean = 0.0;
    double stddev = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
};

inline LevelStats sample_level(const SdeProblem& problem, double delta_coarse,
                               const SchemeConfig& config, std::size_t n_samples,
                               std::uint64_t master_seed) {
    if (n_samples < 2) {
        throw std::invalid_argument("sample_level: need at least 2 samples");
    }
    auto diffs = parallel_map(n_samples, [&](std::size_t i) {
        auto stream = NormalStream::derived(master_seed, i);
        return simulate_coupled(problem, delta_coarse, config, stream).abs_diff;
    });
    double sum = 0.0, sum2 = 0.0;
    for (double d : diffs) {
        sum += d;
        sum2 += d * d;
    }
    LevelStats out;
    out.n_samples = n_samples;
    out.mean = sum / n_samples;
    double var = (sum2 - sum * sum / n_samples) / (n_samples - 1);
    out.stddev = std::sqrt(std::max(var, 0.0));
    out.stderr_ = out.stddev / std::sqrt(static_cast<double>(n_samples));
    return out;
}

}  // namespace taem
