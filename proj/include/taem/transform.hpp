#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "taem/problem.hpp"
#include "taem/quadrature.hpp"

namespace taem {

struct PositivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SignSearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monotone change of state variable straightening a drift that is only
/// piecewise one-sided Lipschitz.  On the core interval [xi0, xi_k1] the
/// map solves  phi' b + (1/2) phi'' sigma^2 = R  with R the chord of b
/// between the endpoints; outside it continues either with an
/// exponentially decaying correction (when the drift keeps the matching
/// sign) or linearly.
///
/// All cumulative quantities are tabulated on a breakpoint-aware grid;
/// point evaluation completes the tabulated values with local adaptive
/// quadrature from the nearest node, so phi and phi' stay continuous by
/// construction.
class DriftTransform {
public:
    DriftTransform(const SdeProblem& problem, int grid_resolution = 4096,
                   double quad_tol = 1e-10, double span = 3.0, double search_window = 50.0)
        : problem_(problem), quad_tol_(quad_tol) {
        if (problem_.xi.empty()) {
            throw std::invalid_argument("DriftTransform: problem has no discontinuity points");
        }
        select_endpoints(search_window);
        build_grid(grid_resolution, span);
        check_positivity();
        tabulate();
    }

    double xi0() const { return xi0_; }
    double xi_k1() const { return xik1_; }
    bool pb1() const { return pb1_; }
    bool pb2() const { return pb2_; }
    double K_const() const { return K_; }
    double H_bound() const { return H_; }
    double l_psi() const { return l_psi_; }
    double L_psi() const { return L_psi_; }
    const std::vector<double>& grid() const { return xs_; }

    /// Chord of b over [xi0, xi_k1].
    double R(double x) const {
        return b0_ + (x - xi0_) * (bk1_ - b0_) / (xik1_ - xi0_);
    }

    double phi(double x) const {
        std::size_t i = node_at_or_below(x);
        if (x >= xi0_ && x <= xik1_) {
            return Phi_[i] + integrate([this, i](double t) { return phi_prime_inner(t, i); },
                                       xs_[i], x, quad_tol_);
        }
        if (x > xik1_) {
            if (!pb1_) return Phi_[ik1_] + (x - xik1_) * Pp_[ik1_];
            return Phi_[i] + integrate([this, i](double t) { return phi_prime_right(t, i); },
                                       xs_[i], x, quad_tol_);
        }
        if (!pb2_) return Phi_[i0_] + (x - xi0_) * Pp_[i0_];
        // Left of the grid node: integrate backwards from the node above.
        std::size_t j = std::min(i + 1, i0_);
        return Phi_[j] - integrate([this, j](double t) { return phi_prime_left(t, j); }, x,
                                   xs_[j], quad_tol_);
    }

    double phi_prime(double x) const {
        if (x >= xi0_ && x <= xik1_) {
            std::size_t i = node_at_or_below(x);
            return phi_prime_inner(x, i);
        }
        if (x > xik1_) {
            if (!pb1_) return Pp_[ik1_];
            return phi_prime_right(x, node_at_or_below(x));
        }
        if (!pb2_) return Pp_[i0_];
        std::size_t j = std::min(node_at_or_below(x) + 1, i0_);
        return phi_prime_left(x, j);
    }

    /// phi'' from the closed-form derivative of phi', not from differences.
    double phi_second(double x) const {
        if (x >= xi0_ && x <= xik1_) {
            double fp = phi_prime(x);
            double s = problem_.diffusion(x);
            return -g(x) * fp + 2.0 * R(x) / (s * s);
        }
        if (x > xik1_) {
            if (!pb1_) return 0.0;
            double decay = phi_prime(x) - 1.0;  // (phi'(xi_k1)-1) exp(-int g)
            return -g(x) * decay;
        }
        if (!pb2_) return 0.0;
        double decay = phi_prime(x) - 1.0;
        return -g(x) * decay;
    }

    /// The transformed drift: phi' b + (1/2) phi'' sigma^2 equals this
    /// everywhere off Xi.
    double Psi(double x) const {
        if (x >= xi0_ && x <= xik1_) return R(x);
        if (x < xi0_) return pb2_ ? problem_.drift(x) : Pp_[i0_] * problem_.drift(x);
        return pb1_ ? problem_.drift(x) : Pp_[ik1_] * problem_.drift(x);
    }

private:
    double g(double x) const {
        double s = problem_.diffusion(x);
        return 2.0 * problem_.drift(x) / (s * s);
    }

    // G(t) = int_{xi0}^t g, completed locally from node i (xs_[i] <= t).
    double G_at(double t, std::size_t i) const {
        return G_[i] + integrate([this](double u) { return g(u); }, xs_[i], t, quad_tol_);
    }

    // B(t) = int_{xi0}^t exp(G) 2R/sigma^2, completed locally from node i.
    double B_at(double t, std::size_t i) const {
        double base = G_[i];
        double local = integrate(
            [this, i, base](double u) {
                double s = problem_.diffusion(u);
                return std::exp(G_at(u, i) - base) * 2.0 * R(u) / (s * s);
            },
            xs_[i], t, quad_tol_);
        return B_[i] + std::exp(base) * local;
    }

    double phi_prime_inner(double t, std::size_t i) const {
        return std::exp(-G_at(t, i)) * (B_at(t, i) + K_);
    }

    double phi_prime_right(double t, std::size_t i) const {
        // 1 + (phi'(xi_k1) - 1) exp(-int_{xi_k1}^t g)
        return 1.0 + (Pp_[ik1_] - 1.0) * std::exp(G_[ik1_] - G_at(t, i));
    }

    // Valid for t <= xs_[j], j <= i0_: completes G backwards from node j.
    double phi_prime_left(double t, std::size_t j) const {
        double Gt = G_[j] - integrate([this](double u) { return g(u); }, t, xs_[j], quad_tol_);
        return 1.0 + (Pp_[i0_] - 1.0) * std::exp(-Gt);
    }

    std::size_t node_at_or_below(double x) const {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        if (it == xs_.begin()) return 0;
        return static_cast<std::size_t>(it - xs_.begin()) - 1;
    }

    void select_endpoints(double window) {
        const double xi_first = problem_.xi.front();
        const double xi_last = problem_.xi.back();
        const int certify_points = 4001;

        pb1_ = true;
        for (int i = 1; i <= certify_points; ++i) {
            double y = xi_last + window * i / certify_points;
            if (problem_.drift(y) < 0.0) {
                pb1_ = false;
                break;
            }
        }
        if (pb1_) {
            xik1_ = xi_last + 1.0;
        } else {
            bool found = false;
            for (int j = 1; j <= static_cast<int>(window); ++j) {
                if (problem_.drift(xi_last + j) < 0.0) {
                    xik1_ = xi_last + j;
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw SignSearchError(
                    "DriftTransform: no point right of Xi with negative drift in search window");
            }
        }

        pb2_ = true;
        for (int i = 1; i <= certify_points; ++i) {
            double y = xi_first - window * i / certify_points;
            if (problem_.drift(y) > 0.0) {
                pb2_ = false;
                break;
            }
        }
        if (pb2_) {
            xi0_ = xi_first - 1.0;
        } else {
            bool found = false;
            for (int j = 1; j <= static_cast<int>(window); ++j) {
                if (problem_.drift(xi_first - j) > 0.0) {
                    xi0_ = xi_first - j;
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw SignSearchError(
                    "DriftTransform: no point left of Xi with positive drift in search window");
            }
        }

        b0_ = problem_.drift(xi0_);
        bk1_ = problem_.drift(xik1_);
    }

    void build_grid(int resolution, double span) {
        double lo = xi0_ - span;
        double hi = xik1_ + span;
        // Breakpoints partition the grid into smoothness pieces.
        std::vector<double> brk = {lo, xi0_};
        for (double xi : problem_.xi) brk.push_back(xi);
        brk.push_back(xik1_);
        brk.push_back(hi);
        std::sort(brk.begin(), brk.end());
        brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

        xs_.clear();
        for (std::size_t p = 0; p + 1 < brk.size(); ++p) {
            double a = brk[p], b = brk[p + 1];
            int n = std::max(2, static_cast<int>(std::lround(resolution * (b - a) / (hi - lo))));
            for (int i = 0; i < n; ++i) xs_.push_back(a + (b - a) * i / n);
        }
        xs_.push_back(hi);
        i0_ = static_cast<std::size_t>(
            std::lower_bound(xs_.begin(), xs_.end(), xi0_) - xs_.begin());
        ik1_ = static_cast<std::size_t>(
            std::lower_bound(xs_.begin(), xs_.end(), xik1_) - xs_.begin());
    }

    void check_positivity() {
        double lo = std::numeric_limits<double>::infinity();
        for (double x : xs_) lo = std::min(lo, problem_.diffusion(x));
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
            lo = std::min(lo, problem_.diffusion(0.5 * (xs_[i] + xs_[i + 1])));
        }
        if (!(lo > 0.0)) {
            throw PositivityError("DriftTransform: sigma not positive on the working interval");
        }
    }

    void tabulate() {
        const std::size_t n = xs_.size();
        G_.assign(n, 0.0);
        B_.assign(n, 0.0);
        Pp_.assign(n, 0.0);
        Phi_.assign(n, 0.0);

        // G(x) = int_{xi0}^x 2b/sigma^2, cumulative over the whole grid.
        for (std::size_t i = i0_ + 1; i < n; ++i) {
            G_[i] = G_[i - 1] +
                    integrate([this](double u) { return g(u); }, xs_[i - 1], xs_[i], quad_tol_);
        }
        for (std::size_t i = i0_; i-- > 0;) {
            G_[i] = G_[i + 1] -
                    integrate([this](double u) { return g(u); }, xs_[i], xs_[i + 1], quad_tol_);
        }

        // K strictly above its lower bound, with margin.
        double abs_inner = 0.0;
        for (std::size_t i = i0_ + 1; i <= ik1_; ++i) {
            double base = G_[i - 1];
            std::size_t left = i - 1;
            abs_inner += std::exp(base) *
                         integrate(
                             [this, left, base](double u) {
                                 double s = problem_.diffusion(u);
                                 return std::abs(std::exp(G_at(u, left) - base) * 2.0 * R(u) /
                                                 (s * s));
                             },
                             xs_[i - 1], xs_[i], quad_tol_);
        }
        double abs_g = integrate([this](double u) { return std::abs(g(u)); }, xi0_, xik1_,
                                 1e-8, 1e-10);
        double lower = 2.0 * abs_inner + 2.0 * std::exp(abs_g) + 2.0;
        K_ = 1.01 * lower + 1.0;

        // B cumulative on the core interval.
        for (std::size_t i = i0_ + 1; i <= ik1_; ++i) {
            B_[i] = B_at(xs_[i], i - 1);
        }
        for (std::size_t i = i0_; i <= ik1_; ++i) {
            Pp_[i] = std::exp(-G_[i]) * (B_[i] + K_);
        }
        for (std::size_t i = ik1_ + 1; i < n; ++i) {
            Pp_[i] = pb1_ ? 1.0 + (Pp_[ik1_] - 1.0) * std::exp(G_[ik1_] - G_[i]) : Pp_[ik1_];
        }
        for (std::size_t i = i0_; i-- > 0;) {
            Pp_[i] = pb2_ ? 1.0 + (Pp_[i0_] - 1.0) * std::exp(-G_[i]) : Pp_[i0_];
        }

        // phi cumulative; phi(xi0) = b(xi0) by definition.
        Phi_[i0_] = b0_;
        for (std::size_t i = i0_ + 1; i <= ik1_; ++i) {
            std::size_t left = i - 1;
            Phi_[i] = Phi_[i - 1] +
                      integrate([this, left](double t) { return phi_prime_inner(t, left); },
                                xs_[i - 1], xs_[i], quad_tol_, 1e-12);
        }
        for (std::size_t i = ik1_ + 1; i < n; ++i) {
            if (pb1_) {
                std::size_t left = i - 1;
                Phi_[i] = Phi_[i - 1] +
                          integrate([this, left](double t) { return phi_prime_right(t, left); },
                                    xs_[i - 1], xs_[i], quad_tol_);
            } else {
                Phi_[i] = Phi_[ik1_] + (xs_[i] - xik1_) * Pp_[ik1_];
            }
        }
        for (std::size_t i = i0_; i-- > 0;) {
            if (pb2_) {
                std::size_t up = i + 1;
                Phi_[i] = Phi_[i + 1] -
                          integrate([this, up](double t) { return phi_prime_left(t, up); },
                                    xs_[i], xs_[i + 1], quad_tol_);
            } else {
                Phi_[i] = Phi_[i0_] + (xs_[i] - xi0_) * Pp_[i0_];
            }
        }

        H_ = *std::max_element(Pp_.begin(), Pp_.end()) + quad_tol_;

        // Empirical one-sided constant of Psi from within-piece secants.
        l_psi_ = -std::numeric_limits<double>::infinity();
        auto piece_of = [this](double x) {
            if (x < xi0_) return 0;
            if (x <= xik1_) return 1;
            return 2;
        };
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
            double a = xs_[i], b = xs_[i + 1];
            if (piece_of(a) != piece_of(b)) continue;
            double slope = (Psi(b) - Psi(a)) / (b - a);
            l_psi_ = std::max(l_psi_, slope);
        }
        L_psi_ = l_psi_ < 0.0 ? l_psi_ / H_ : l_psi_;
    }

    SdeProblem problem_;
    double quad_tol_;
    double xi0_ = 0.0, xik1_ = 0.0;
    double b0_ = 0.0, bk1_ = 0.0;
    bool pb1_ = false, pb2_ = false;
    double K_ = 0.0, H_ = 0.0;
    double l_psi_ = 0.0, L_psi_ = 0.0;
    std::size_t i0_ = 0, ik1_ = 0;
    std::vector<double> xs_, G_, B_, Pp_, Phi_;
};

/// Grid diagnostics for the transform properties.
struct TransformReport {
    double min_phi_prime = 0.0;                  // P2 lower side
    double max_phi_prime = 0.0;                  // P2 upper side (= H up to tol)
    double max_p4_residual_scaled = 0.0;         // |phi' b + phi'' sigma^2/2 - Psi| / (1+|b|+sigma^2)
    double junction_gap_xi0 = 0.0;               // |phi(xi0-) - phi(xi0+)|
    double junction_gap_xik1 = 0.0;
    double junction_gap_prime_xi0 = 0.0;
    double junction_gap_prime_xik1 = 0.0;
};

inline TransformReport verify_transform(const DriftTransform& tr, const SdeProblem& problem,
                                        double xi_exclusion = 1e-2) {
    TransformReport rep;
    rep.min_phi_prime = std::numeric_limits<double>::infinity();
    rep.max_phi_prime = -std::numeric_limits<double>::infinity();
    for (double x : tr.grid()) {
        double fp = tr.phi_prime(x);
        rep.min_phi_prime = std::min(rep.min_phi_prime, fp);
        rep.max_phi_prime = std::max(rep.max_phi_prime, fp);
        if (dist_to_xi(x, problem) <= xi_exclusion) continue;
        double b = problem.drift(x);
        double s = problem.diffusion(x);
        double res = std::abs(fp * b + 0.5 * tr.phi_second(x) * s * s - tr.Psi(x));
        rep.max_p4_residual_scaled =
            std::max(rep.max_p4_residual_scaled, res / (1.0 + std::abs(b) + s * s));
    }
    // One-sided limits at the junctions via linear extrapolation, so both
    // evaluation paths (outer formula vs core formula) are exercised.
    const double h = 1e-7;
    auto gap = [&](double xj) {
        double left = tr.phi(xj - h) + h * tr.phi_prime(xj - h);
        double right = tr.phi(xj + h) - h * tr.phi_prime(xj + h);
        return std::abs(left - right);
    };
    rep.junction_gap_xi0 = gap(tr.xi0());
    rep.junction_gap_xik1 = gap(tr.xi_k1());
    auto gap_prime = [&](double xj) {
        double left = tr.phi_prime(xj - h) + h * tr.phi_second(xj - h);
        double right = tr.phi_prime(xj + h) - h * tr.phi_second(xj + h);
        return std::abs(left - right);
    };
    rep.junction_gap_prime_xi0 = gap_prime(tr.xi0());
    rep.junction_gap_prime_xik1 = gap_prime(tr.xi_k1());
    return rep;
}

}  // namespace taem
