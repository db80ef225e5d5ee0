#pragma once

// Bistable reaction terms: a cubic family plus tabulated and perturbed variants.
// A Bistable f lives on [lower, upper] with zeros exactly at lower, theta, upper,
// f < 0 on (lower, theta), f > 0 on (theta, upper), and is extended linearly
// outside [lower, upper] so that F(t) = integral_t^upper f grows quadratically.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace frontlab {

struct ValidityReport {
    bool ok = true;
    std::vector<std::string> violations;
    void flag(const std::string& what) {
        ok = false;
        violations.push_back(what);
    }
};

class Bistable {
  public:
    enum class Kind { Cubic, Perturbed, Tabulated };

    static Bistable cubic(double a) {
        if (!(a > 0.0 && a < 1.0)) throw FrontlabError("cubic: a must lie in (0,1)");
        Bistable b;
        b.kind_ = Kind::Cubic;
        b.a_ = a;
        b.lo_ = 0.0;
        b.hi_ = 1.0;
        b.theta_ = a;
        b.slope_lo_ = -a;
        b.slope_hi_ = -(1.0 - a);
        b.finish_();
        return b;
    }

    // Piecewise-linear interpolation through (u_k, f_k); first and last f_k must
    // be 0 at u=0 and u=1. Only sign structure is validated, not smoothness.
    static Bistable tabulated(std::vector<double> u, std::vector<double> fu, double theta) {
        if (u.size() < 4 || u.size() != fu.size())
            throw FrontlabError("tabulated: need matching knot vectors, >= 4 knots");
        for (size_t k = 1; k < u.size(); ++k)
            if (!(u[k] > u[k - 1])) throw FrontlabError("tabulated: knots must increase");
        Bistable b;
        b.kind_ = Kind::Tabulated;
        b.tab_u_ = std::move(u);
        b.tab_f_ = std::move(fu);
        b.lo_ = b.tab_u_.front();
        b.hi_ = b.tab_u_.back();
        b.theta_ = theta;
        b.slope_lo_ = (b.tab_f_[1] - b.tab_f_[0]) / (b.tab_u_[1] - b.tab_u_[0]);
        size_t n = b.tab_u_.size();
        b.slope_hi_ = (b.tab_f_[n - 1] - b.tab_f_[n - 2]) / (b.tab_u_[n - 1] - b.tab_u_[n - 2]);
        b.finish_();
        return b;
    }

    // lambda * f, same zeros. Lengths in any derived problem scale as 1/sqrt(lambda).
    Bistable scaled(double lambda) const {
        if (!(lambda > 0)) throw FrontlabError("scaled: lambda must be positive");
        Bistable b = *this;
        b.scale_ *= lambda;
        b.slope_lo_ *= lambda;
        b.slope_hi_ *= lambda;
        b.finish_();
        return b;
    }

    double operator()(double u) const {
        if (u < lo_) return slope_lo_ * (u - lo_);
        if (u > hi_) return slope_hi_ * (u - hi_);
        return scale_ * raw_(u);
    }

    double dfdu(double u) const {
        if (u < lo_) return slope_lo_;
        if (u > hi_) return slope_hi_;
        return scale_ * raw_prime_(u);
    }

    Kind kind() const { return kind_; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    double theta() const { return theta_; }
    double cubic_a() const { return a_; }
    double scale() const { return scale_; }
    double eta() const { return eta_; }
    double fprime_lo() const { return slope_lo_; }
    double fprime_hi() const { return slope_hi_; }

    // integral_lower^upper f; positive mass is what makes 1 the invading state.
    double mass() const { return mass_; }

    // F(t) = integral_t^upper f. Nonnegative, F(upper) = 0, quadratic outside.
    double F(double t) const {
        if (t >= hi_) return -0.5 * slope_hi_ * sq(t - hi_);
        if (t <= lo_) return mass_ - 0.5 * slope_lo_ * sq(t - lo_);
        // cumulative table at nodes, local Simpson for the sub-node remainder
        double s = (t - lo_) / (hi_ - lo_) * kNodes;
        int k = std::min(static_cast<int>(s), kNodes - 1);
        double tk = lo_ + (hi_ - lo_) * k / kNodes;
        double seg = adaptive_simpson([this](double x) { return (*this)(x); }, tk, t, 1e-13);
        return Fnodes_[k] - seg;
    }

    // inf{ x : integral_lower^x f > 0 }; NaN when mass <= 0 (no such point).
    double beta() const { return beta_; }

    // Largest |f'| over [lower, upper]; explicit time steps use it for the
    // reaction part of the stability budget.
    double lipschitz() const { return lip_; }

  private:
    Kind kind_ = Kind::Cubic;
    double a_ = 0.0, scale_ = 1.0, eta_ = 0.0;
    double lo_ = 0, hi_ = 1, theta_ = 0.5;
    double slope_lo_ = -1, slope_hi_ = -1;
    double mass_ = 0, beta_ = 0, lip_ = 1;
    std::vector<double> tab_u_, tab_f_;
    // Hermite patches for the perturbed variant, on [eta,2eta] and [1-eta,1+eta]
    struct Patch {
        double x0 = 0, x1 = 0, v0 = 0, d0 = 0, v1 = 0, d1 = 0;
        bool contains(double u) const { return u >= x0 && u <= x1; }
        double eval(double u) const {
            double h = x1 - x0, s = (u - x0) / h;
            double s2 = s * s, s3 = s2 * s;
            return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * h * d0 +
                   (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * h * d1;
        }
        double deriv(double u) const {
            double h = x1 - x0, s = (u - x0) / h;
            double s2 = s * s;
            return ((6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * h * d0 +
                    (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * h * d1) /
                   h;
        }
    };
    Patch plo_, phi_;

    static constexpr int kNodes = 4096;
    std::vector<double> Fnodes_;  // Fnodes_[k] = F(lo + k/kNodes*(hi-lo))

    friend Bistable perturb_eta(const Bistable& base, double eta);

    double raw_(double u) const {
        switch (kind_) {
            case Kind::Cubic:
                return u * (1.0 - u) * (u - a_);
            case Kind::Perturbed:
                if (plo_.contains(u)) return plo_.eval(u);
                if (phi_.contains(u)) return phi_.eval(u);
                return u * (1.0 - u) * (u - a_);
            case Kind::Tabulated: {
                auto it = std::upper_bound(tab_u_.begin(), tab_u_.end(), u);
                size_t k = std::clamp<size_t>(it - tab_u_.begin(), 1, tab_u_.size() - 1) - 1;
                double w = (u - tab_u_[k]) / (tab_u_[k + 1] - tab_u_[k]);
                return tab_f_[k] + w * (tab_f_[k + 1] - tab_f_[k]);
            }
        }
        return 0.0;
    }

    double raw_prime_(double u) const {
        switch (kind_) {
            case Kind::Cubic:
                return -3.0 * u * u + 2.0 * (1.0 + a_) * u - a_;
            case Kind::Perturbed:
                if (plo_.contains(u)) return plo_.deriv(u);
                if (phi_.contains(u)) return phi_.deriv(u);
                return -3.0 * u * u + 2.0 * (1.0 + a_) * u - a_;
            case Kind::Tabulated: {
                auto it = std::upper_bound(tab_u_.begin(), tab_u_.end(), u);
                size_t k = std::clamp<size_t>(it - tab_u_.begin(), 1, tab_u_.size() - 1) - 1;
                return (tab_f_[k + 1] - tab_f_[k]) / (tab_u_[k + 1] - tab_u_[k]);
            }
        }
        return 0.0;
    }

    // mass, F-node table, beta (bisection to 1e-10), Lipschitz sample.
    void finish_() {
        auto f = [this](double x) { return (*this)(x); };
        Fnodes_.assign(kNodes + 1, 0.0);
        double acc = 0.0;
        std::vector<double> G(kNodes + 1, 0.0);
        for (int k = 1; k <= kNodes; ++k) {
            double u0 = lo_ + (hi_ - lo_) * (k - 1) / kNodes;
            double u1 = lo_ + (hi_ - lo_) * k / kNodes;
            acc += adaptive_simpson(f, u0, u1, 1e-14);
            G[k] = acc;
        }
        mass_ = acc;
        for (int k = 0; k <= kNodes; ++k) Fnodes_[k] = mass_ - G[k];
        lip_ = 0.0;
        for (int k = 0; k <= 4096; ++k)
            lip_ = std::max(lip_, std::abs(dfdu(lo_ + (hi_ - lo_) * k / 4096.0)));
        if (mass_ > 0) {
            auto cum = [&](double x) {
                return adaptive_simpson(f, lo_, x, 1e-13);
            };
            beta_ = bisect(cum, theta_, hi_, 1e-11);
        } else {
            beta_ = std::numeric_limits<double>::quiet_NaN();
        }
    }
};

// Sign-structure check by dense sampling; returns diagnostics, never throws.
inline ValidityReport validate(const Bistable& b, int n_samples = 4096) {
    ValidityReport rep;
    double lo = b.lower(), hi = b.upper(), th = b.theta();
    auto near_zero = [&](double v) { return std::abs(v) < 1e-12; };
    if (!near_zero(b(lo))) rep.flag("f(lower) != 0");
    if (!near_zero(b(hi))) rep.flag("f(upper) != 0");
    if (std::abs(b(th)) > 1e-9) rep.flag("f(theta) != 0");
    if (!(b.dfdu(lo) < 0)) rep.flag("f'(lower) >= 0");
    if (!(b.dfdu(hi) < 0)) rep.flag("f'(upper) >= 0");
    if (!(th > lo && th < hi)) rep.flag("theta outside (lower, upper)");
    bool neg_ok = true, pos_ok = true;
    for (int k = 1; k < n_samples; ++k) {
        double u = lo + (hi - lo) * k / n_samples;
        double margin = 1e-12;
        if (u < th - 1e-9 && b(u) > margin) neg_ok = false;
        if (u > th + 1e-9 && u < hi - 1e-9 && b(u) < -margin) pos_ok = false;
    }
    if (!neg_ok) rep.flag("f not <= 0 on (lower, theta)");
    if (!pos_ok) rep.flag("f not >= 0 on (theta, upper)");
    if (!(b.mass() > 0)) rep.flag("integral of f over [lower, upper] is not positive");
    // F must stay positive across the linear-extension range too
    for (int k = 0; k <= n_samples; ++k) {
        double t = (lo - 1.0) + (hi - lo + 2.0) * k / n_samples;
        if (std::abs(t - hi) < 1e-6) continue;
        if (!(b.F(t) > 0)) {
            rep.flag("F(t) not positive at t != upper");
            break;
        }
    }
    return rep;
}

// Shifted variant f_eta: zeros at eta, theta, 1+eta; identical to f on
// [2 eta, 1-eta]; >= f on [eta, 2 eta) and (1, 1+eta]. Wave speeds for f_eta
// bound the original speed from above and converge to it as eta -> 0.
inline Bistable perturb_eta(const Bistable& base, double eta) {
    if (base.kind() != Bistable::Kind::Cubic && base.kind() != Bistable::Kind::Perturbed)
        throw FrontlabError("perturb_eta: supported for the cubic family");
    if (!(eta > 0 && eta < 0.5 * base.theta()))
        throw FrontlabError("perturb_eta: need 0 < eta < theta/2");
    if (!(base.dfdu(eta) < 0))
        throw FrontlabError("perturb_eta: f'(eta) must be negative; eta too large");
    Bistable b;
    b.kind_ = Bistable::Kind::Perturbed;
    b.a_ = base.a_;
    b.scale_ = base.scale_;
    b.eta_ = eta;
    b.lo_ = eta;
    b.hi_ = 1.0 + eta;
    b.theta_ = base.theta_;
    // lower patch: zero at eta with slope f'(eta), rejoin f at 2 eta
    b.plo_ = {eta, 2 * eta, 0.0, base.raw_prime_(eta), base.raw_(2 * eta),
              base.raw_prime_(2 * eta)};
    // upper patch: leave f at 1-eta, reach zero at 1+eta with a mild negative
    // slope so the cubic stays positive across (1-eta, 1+eta)
    double d1 = -base.raw_(1.0 - eta) / (2.0 * eta) * 0.5;
    b.phi_ = {1.0 - eta, 1.0 + eta, base.raw_(1.0 - eta), base.raw_prime_(1.0 - eta), 0.0, d1};
    b.slope_lo_ = b.scale_ * b.plo_.d0;
    b.slope_hi_ = b.scale_ * d1;
    b.finish_();
    return b;
}

}  // namespace frontlab
