#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace taem {

/// Scalar SDE  dX_t = b(X_t) dt + sigma(X_t) dW_t  together with the
/// assumption constants the scheme and its analysis depend on.
///
/// Immutable after construction; the coefficient callables must be pure so
/// problems can be shared across concurrent workers.
struct SdeProblem {
    std::string name;
    std::function<double(double)> drift;      // b
    std::function<double(double)> diffusion;  // sigma
    std::vector<double> xi;                   // drift discontinuity points, strictly increasing
    double x0 = 0.0;

    // Growth / regularity constants.
    double l = 1.0;        // drift local-growth exponent
    double m = 0.0;        // diffusion growth exponent
    double alpha = 0.5;    // Hoelder exponent of sigma, in [0, 1/2]
    double p0 = 2.0;       // moment exponent
    double gamma = 0.0;    // dissipativity constant
    double eta = 0.0;      // additive constant in the dissipativity bound
    std::optional<double> one_sided_lipschitz;  // L1 when it applies globally
    std::string table_constant_label;           // "L1" or "L2", as printed

    // Non-degeneracy of sigma around the discontinuities:
    // inf_{|x - xi_i| <= mu} sigma(x) >= nu.
    double mu = 0.5;
    double nu = 1.0;
};

/// min_i |x - xi_i|; +infinity when the discontinuity set is empty.
inline double dist_to_xi(double x, const SdeProblem& problem) {
    double d = std::numeric_limits<double>::infinity();
    for (double xi : problem.xi) {
        d = std::min(d, std::abs(x - xi));
    }
    return d;
}

/// eps0 = mu /\ min_i (xi_{i+1} - xi_i).  Requires a nonempty
/// discontinuity set; with a single point the gap minimum is vacuous.
inline double epsilon0(const SdeProblem& problem) {
    if (problem.xi.empty()) {
        throw std::invalid_argument(
            "epsilon0: problem '" + problem.name + "' has no discontinuity points");
    }
    double e0 = problem.mu;
    for (std::size_t i = 1; i < problem.xi.size(); ++i) {
        e0 = std::min(e0, problem.xi[i] - problem.xi[i - 1]);
    }
    return e0;
}

}  // namespace taem
