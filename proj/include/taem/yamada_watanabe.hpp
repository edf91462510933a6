#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "taem/quadrature.hpp"

namespace taem {

struct YwParams {
    double delta;  // > 1
    double eps;    // > 0
};

/// Concrete Yamada-Watanabe pair (psi, phi).
///
/// psi(z) = c w(z) / (z log delta) on [eps/delta, eps], where w is a
/// piecewise-linear taper (1 on the middle of the support, 0 at the
/// endpoints) and c renormalizes the integral to 1.  Since the untapered
/// mass is exactly 1 and the taper removes little of it, c stays below 2
/// and the pointwise bound psi <= 2/(z log delta) holds.
class YamadaWatanabe {
public:
    explicit YamadaWatanabe(YwParams params, double quad_tol = 1e-12, double taper = 0.1)
        : p_(params), quad_tol_(quad_tol) {
        if (!(p_.delta > 1.0)) throw std::invalid_argument("YamadaWatanabe: delta must be > 1");
        if (!(p_.eps > 0.0)) throw std::invalid_argument("YamadaWatanabe: eps must be > 0");
        lo_ = p_.eps / p_.delta;
        hi_ = p_.eps;
        taper_lo_ = lo_ * (1.0 + taper);
        taper_hi_ = hi_ * (1.0 - taper);
        if (taper_lo_ >= taper_hi_) throw std::invalid_argument("YamadaWatanabe: taper too wide");
        double mass = integrate([this](double z) { return unnormalized(z); }, lo_, hi_, quad_tol_);
        if (!(mass > 0.5)) {
            throw std::logic_error("YamadaWatanabe: taper removed too much mass");
        }
        norm_ = 1.0 / mass;
    }

    const YwParams& params() const { return p_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }

    double psi(double z) const { return norm_ * unnormalized(z); }

    /// phi'(|x|) = int_0^{|x|} psi(z) dz, extended oddly in x.
    double phi_prime(double x) const {
        if (x == 0.0) return 0.0;
        double ax = std::abs(x);
        double v = ax <= lo_ ? 0.0
                             : integrate([this](double z) { return psi(z); }, lo_,
                                         std::min(ax, hi_), quad_tol_);
        return x > 0.0 ? v : -v;
    }

    /// phi(x) = int_0^{|x|} int_0^y psi(z) dz dy, by nested quadrature.
    double phi(double x) const {
        double ax = std::abs(x);
        if (ax <= lo_) return 0.0;
        // Beyond the support the inner integral saturates to 1.
        double core = integrate([this](double y) { return phi_prime(y); }, lo_,
                                std::min(ax, hi_), 10.0 * quad_tol_);
        if (ax > hi_) core += ax - hi_;
        return core;
    }

    double phi_second(double x) const { return psi(std::abs(x)); }

private:
    double unnormalized(double z) const {
        if (z <= lo_ || z >= hi_) return 0.0;
        double w;
        if (z < taper_lo_) {
            w = (z - lo_) / (taper_lo_ - lo_);
        } else if (z > taper_hi_) {
            w = (hi_ - z) / (hi_ - taper_hi_);
        } else {
            w = 1.0;
        }
        return w / (z * std::log(p_.delta));
    }

    YwParams p_;
    double quad_tol_;
    double lo_, hi_, taper_lo_, taper_hi_;
    double norm_ = 1.0;
};

/// Max violation per property over sampled points.  Negative or zero
/// entries mean the property holds with margin at every sample.
struct YwReport {
    double mass_error = 0.0;  // |int psi - 1|
    double yw1 = 0.0;         // |phi'(x) - sign(x) phi'(|x|)|
    double yw2 = 0.0;         // |phi'| - 1 and -|phi'|
    double yw3 = 0.0;         // |x| - eps - phi(x)
    double yw4 = 0.0;         // phi'(|x|)/|x| - delta/eps
    double yw5 = 0.0;         // psi(|x|) - bound
};

inline YwReport verify_yw(const YwParams& params, int sample_count, double quad_tol = 1e-12) {
    YamadaWatanabe yw(params, quad_tol);
    YwReport r;
    double mass = integrate([&](double z) { return yw.psi(z); }, yw.support_lo(),
                            yw.support_hi(), quad_tol);
    r.mass_error = std::abs(mass - 1.0);
    double span = 2.0 * params.eps;
    double logd = std::log(params.delta);
    for (int i = 0; i < sample_count; ++i) {
        double x = -span + 2.0 * span * (i + 0.5) / sample_count;
        if (x == 0.0) continue;
        double ax = std::abs(x);
        double dp = yw.phi_prime(x);
        double dpa = yw.phi_prime(ax);
        r.yw1 = std::max(r.yw1, std::abs(dp - (x > 0 ? dpa : -dpa)));
        r.yw2 = std::max(r.yw2, std::abs(dp) - 1.0);
        r.yw3 = std::max(r.yw3, ax - params.eps - yw.phi(x));
        r.yw4 = std::max(r.yw4, dpa / ax - params.delta / params.eps);
        double psi = yw.phi_second(x);
        double bound = (ax >= yw.support_lo() && ax <= yw.support_hi())
                           ? 2.0 / (ax * logd)
                           : 0.0;
        r.yw5 = std::max(r.yw5, psi - bound);
        r.yw5 = std::max(r.yw5, psi - 2.0 * params.delta / (params.eps * logd));
    }
    return r;
}

}  // namespace taem
