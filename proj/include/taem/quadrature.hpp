#pragma once

#include <cmath>
#include <stdexcept>

namespace taem {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1]; Gauss weight 0 marks
// Kronrod-only nodes.
inline constexpr double gk_nodes[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class F>
double gk15(const F& f, double a, double b, double& err) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double g = 0.0, k = 0.0;
    {
        double y = f(c);
        g += gk_nodes[0][1] * y;
        k += gk_nodes[0][2] * y;
    }
    for (int i = 1; i < 8; ++i) {
        double y1 = f(c - hw * gk_nodes[i][0]);
        double y2 = f(c + hw * gk_nodes[i][0]);
        g += gk_nodes[i][1] * (y1 + y2);
        k += gk_nodes[i][2] * (y1 + y2);
    }
    err = std::abs(k - g) * hw;
    return k * hw;
}

template <class F>
double adapt(const F& f, double a, double b, double tol, double rel_tol, int depth) {
    double err = 0.0;
    double whole = gk15(f, a, b, err);
    if (err <= std::max(tol, rel_tol * std::abs(whole)) ||
        b - a < 1e-14 * (1.0 + std::abs(a))) {
        return whole;
    }
    if (depth <= 0) throw QuadratureError("adaptive quadrature: tolerance not met");
    double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, rel_tol, depth - 1) +
           adapt(f, m, b, 0.5 * tol, rel_tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].  A panel is
/// accepted when its error estimate meets the absolute tolerance or the
/// relative one.  Throws QuadratureError when neither can be met within
/// the recursion budget.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                 double rel_tol = 1e-13) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, abs_tol, rel_tol);
    return detail::adapt(f, a, b, abs_tol, rel_tol, 60);
}

}  // namespace taem
