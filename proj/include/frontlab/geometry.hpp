#pragma once

// Cylinder-like planar domains Omega = { (x1, x2) : hbot(x1) < x2 < htop(x1) },
// straight for x1 < 0. Walls are piecewise-linear graphs mollified by
// convolution with a C^2 bump, so boundary normals are well defined. The
// convolution is evaluated exactly (the integrand is a polynomial between
// breakpoints), which keeps every predicate deterministic.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace frontlab {

// Piecewise-linear graph with constant extension beyond the end breakpoints.
struct WallProfile {
    std::vector<double> x, h;  // strictly increasing x

    double raw(double xq) const {
        if (xq <= x.front()) return h.front();
        if (xq >= x.back()) return h.back();
        auto it = std::upper_bound(x.begin(), x.end(), xq);
        size_t k = (it - x.begin()) - 1;
        double w = (xq - x[k]) / (x[k + 1] - x[k]);
        return h[k] + w * (h[k + 1] - h[k]);
    }
};

namespace detail {

// Antiderivatives of the normalized bump psi(s) = (35/32) (1-s^2)^3 on [-1,1]
// (unit half-width; rescaled by ell at the call site).
inline double bump_cdf(double s) {  // integral_{-1}^{s} psi
    s = std::clamp(s, -1.0, 1.0);
    double s3 = s * s * s, s5 = s3 * s * s, s7 = s5 * s * s;
    return 0.5 + (35.0 / 32.0) * (s - s3 + 0.6 * s5 - s7 / 7.0);
}

inline double bump_x_moment(double s) {  // integral_{-1}^{s} t psi(t) dt
    s = std::clamp(s, -1.0, 1.0);
    double s2 = s * s, s4 = s2 * s2, s6 = s4 * s2, s8 = s4 * s4;
    return (35.0 / 32.0) * (s2 / 2.0 - 3.0 * s4 / 4.0 + s6 / 2.0 - s8 / 8.0) -
           (35.0 / 32.0) * (0.5 - 0.75 + 0.5 - 0.125);
}

}  // namespace detail

class DomainSpec {
  public:
    WallProfile top, bot;
    double smoothing = 0.1;
    double x1_min = 0, x1_max = 0;
    std::string preset_name = "custom";

    // Mollified walls: (h * psi_ell)(x). Exact piecewise-polynomial quadrature:
    // between breakpoints the raw wall is linear, so the convolution reduces to
    // the bump's cdf and first moment.
    double htop(double xq) const { return mollify_(top, xq); }
    double hbot(double xq) const { return mollify_(bot, xq); }
    double htop_prime(double xq) const { return mollify_prime_(top, xq); }
    double hbot_prime(double xq) const { return mollify_prime_(bot, xq); }

    double width(double xq) const { return htop(xq) - hbot(xq); }
    double left_width() const { return width(x1_min); }

    void check() const {
        if (!(x1_max > x1_min)) throw FrontlabError("domain: empty truncation window");
        int n = 4096;
        for (int k = 0; k <= n; ++k) {
            double xq = x1_min + (x1_max - x1_min) * k / n;
            if (!(htop(xq) > 0.0) || !(hbot(xq) < 0.0))
                throw FrontlabError("domain: walls must satisfy hbot < 0 < htop");
        }
    }

  private:
    double mollify_(const WallProfile& w, double xq) const {
        double ell = smoothing;
        if (ell <= 0) return w.raw(xq);
        // integral h(xq - s) psi_ell(s) ds = integral h(t) psi_ell(xq - t) dt
        // over t in [xq - ell, xq + ell], split at breakpoints; h linear in t.
        double a = xq - ell, b = xq + ell;
        double acc = 0;
        auto add_piece = [&](double t0, double t1) {
            if (t1 <= t0) return;
            double h0 = w.raw(t0), h1 = w.raw(t1);
            // h(t) = h0 + slope (t - t0); substitute s = (xq - t)/ell
            double slope = (h1 - h0) / (t1 - t0);
            double s0 = (xq - t1) / ell, s1 = (xq - t0) / ell;  // s0 < s1
            double c0 = detail::bump_cdf(s1) - detail::bump_cdf(s0);
            double c1 = detail::bump_x_moment(s1) - detail::bump_x_moment(s0);
            // t = xq - ell s  ->  h(t) = h0 + slope (xq - ell s - t0)
            acc += (h0 + slope * (xq - t0)) * c0 - slope * ell * c1;
        };
        double prev = a;
        for (size_t k = 0; k < w.x.size(); ++k) {
            if (w.x[k] <= a) continue;
            if (w.x[k] >= b) break;
            add_piece(prev, w.x[k]);
            prev = w.x[k];
        }
        add_piece(prev, b);
        return acc;
    }

    double mollify_prime_(const WallProfile& w, double xq) const {
        double ell = smoothing;
        if (ell <= 0) throw FrontlabError("domain: derivative needs smoothing > 0");
        // h' is piecewise constant; (h * psi)' = h' * psi integrates the bump cdf
        double a = xq - ell, b = xq + ell;
        double acc = 0;
        auto slope_at = [&](double t0, double t1) {
            return (w.raw(t1) - w.raw(t0)) / (t1 - t0);
        };
        auto add_piece = [&](double t0, double t1) {
            if (t1 <= t0) return;
            double s0 = (xq - t1) / ell, s1 = (xq - t0) / ell;
            acc += slope_at(t0, t1) * (detail::bump_cdf(s1) - detail::bump_cdf(s0));
        };
        double prev = a;
        for (size_t k = 0; k < w.x.size(); ++k) {
            if (w.x[k] <= a) continue;
            if (w.x[k] >= b) break;
            add_piece(prev, w.x[k]);
            prev = w.x[k];
        }
        add_piece(prev, b);
        return acc;
    }
};

// ---- presets ----------------------------------------------------------------
// All presets are symmetric about the axis and straight for x1 < 0.

inline DomainSpec make_symmetric(std::vector<double> xs, std::vector<double> hs, double x1_min,
                                 double x1_max, double smoothing, std::string name) {
    DomainSpec d;
    d.top.x = xs;
    d.top.h = hs;
    d.bot.x = std::move(xs);
    d.bot.h = std::move(hs);
    for (auto& v : d.bot.h) v = -v;
    d.smoothing = smoothing;
    d.x1_min = x1_min;
    d.x1_max = x1_max;
    d.preset_name = std::move(name);
    d.check();
    return d;
}

inline DomainSpec straight_cylinder(double halfwidth, double x1_min, double x1_max,
                                    double smoothing = 0.1) {
    return make_symmetric({0.0, 1.0}, {halfwidth, halfwidth}, x1_min, x1_max, smoothing,
                          "straight");
}

// Width decreases monotonically from w_left to w_right over [0, ramp].
inline DomainSpec funnel_down(double w_left, double w_right, double ramp, double x1_min,
                              double x1_max, double smoothing = 0.1) {
    if (!(w_left >= w_right)) throw FrontlabError("funnel_down: needs w_left >= w_right");
    return make_symmetric({0.0, ramp}, {w_left, w_right}, x1_min, x1_max, smoothing, "funnel_down");
}

// Straight tube of half-width r jumping to half-width R_wide at x1 = 0.
inline DomainSpec abrupt_widen(double r, double R_wide, double x1_min, double x1_max,
                               double smoothing = 0.1) {
    if (!(R_wide > r)) throw FrontlabError("abrupt_widen: needs R_wide > r");
    return make_symmetric({0.0, 0.02}, {r, R_wide}, x1_min, x1_max, smoothing, "abrupt_widen");
}

// Wide left part; taper down to a throat of half-width eps and length len,
// then back out. The raw profile is constant for x1 <= 0 so the left part
// stays a straight cylinder.
inline DomainSpec narrow_passage(double eps, double len, double w_left, double w_right,
                                 double x1_min, double x1_max, double smoothing = 0.1) {
    double taper = std::max(4.0 * smoothing, 0.5);
    return make_symmetric({0.0, taper, taper + len, 2.0 * taper + len},
                          {w_left, eps, eps, w_right}, x1_min, x1_max, smoothing,
                          "narrow_passage");
}

// Wide - waist - wide.
inline DomainSpec hourglass(double w_wide, double w_waist, double x1_min, double x1_max,
                            double smoothing = 0.1) {
    return make_symmetric({0.0, 1.0, 2.0}, {w_wide, w_waist, w_wide}, x1_min, x1_max,
                          smoothing, "hourglass");
}

// ---- boundary samples and predicates ----------------------------------------

struct NormalSample {
    double x1, x2;
    double nu1, nu2;  // outward unit normal
};

inline std::vector<NormalSample> normals(const DomainSpec& d, int n_samples = 2048) {
    std::vector<NormalSample> out;
    out.reserve(2 * static_cast<size_t>(n_samples) + 2);
    for (int k = 0; k <= n_samples; ++k) {
        double xq = d.x1_min + (d.x1_max - d.x1_min) * k / n_samples;
        double tp = d.htop_prime(xq);
        double norm = std::sqrt(1.0 + tp * tp);
        out.push_back({xq, d.htop(xq), -tp / norm, 1.0 / norm});
        double bp = d.hbot_prime(xq);
        norm = std::sqrt(1.0 + bp * bp);
        out.push_back({xq, d.hbot(xq), bp / norm, -1.0 / norm});
    }
    return out;
}

// nu1 >= -tol everywhere: the cross-section never widens (complete invasion).
inline bool is_decreasing(const DomainSpec& d, double tol = 1e-9, int n_samples = 2048) {
    for (const auto& s : normals(d, n_samples))
        if (s.nu1 < -tol) return false;
    return true;
}

// nu' . x' >= -tol on the boundary. For graph domains containing the axis this
// always holds; kept explicit so the prediction report states what it checked.
inline bool is_star_shaped_axis(const DomainSpec& d, double tol = 1e-9, int n_samples = 2048) {
    for (const auto& s : normals(d, n_samples))
        if (s.nu2 * s.x2 < -tol) return false;
    return true;
}

// |Omega ∩ {a < x1 < b}| by adaptive quadrature of the mollified width.
inline double passage_measure(const DomainSpec& d, double a, double b) {
    if (!(b > a)) return 0.0;
    return adaptive_simpson([&](double xq) { return d.width(xq); }, a, b, 1e-10);
}

inline double min_halfwidth(const DomainSpec& d, int n_samples = 4096) {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n_samples; ++k) {
        double xq = d.x1_min + (d.x1_max - d.x1_min) * k / n_samples;
        m = std::min(m, std::min(d.htop(xq), -d.hbot(xq)));
    }
    return m;
}

inline double max_halfwidth(const DomainSpec& d, double up_to, int n_samples = 4096) {
    double m = 0;
    for (int k = 0; k <= n_samples; ++k) {
        double xq = d.x1_min + (up_to - d.x1_min) * k / n_samples;
        m = std::max(m, std::max(d.htop(xq), -d.hbot(xq)));
    }
    return m;
}

// Hypotheses of the widening-domain completeness criterion: a straight core of
// radius R, convex right part beyond L, bounded left part, walls not narrowing
// before L + R.
struct IncreasingReport {
    bool strip_ok = false;    // min half-width >= R
    bool convex_ok = false;   // htop concave / hbot convex on (L, x1_max)
    bool bounded_ok = false;  // Omega ∩ {x1 < L+R} inside a ball of radius C
    bool widening_ok = false; // nu1 <= tol for x1 < L + R
    double R = 0, L = 0, C = 0;
    bool ok() const { return strip_ok && convex_ok && bounded_ok && widening_ok; }
};

inline IncreasingReport check_increasing_hypotheses(const DomainSpec& d, double L, double R,
                                                    double C, int n_samples = 2048,
                                                    double tol = 1e-7) {
    IncreasingReport rep;
    rep.R = R;
    rep.L = L;
    rep.C = C;
    rep.strip_ok = min_halfwidth(d, n_samples) >= R;
    rep.convex_ok = true;
    double dh = (d.x1_max - std::max(L, d.x1_min)) / n_samples;
    for (int k = 1; k < n_samples; ++k) {
        double xq = std::max(L, d.x1_min) + dh * k;
        double d2top = (d.htop(xq + dh) - 2 * d.htop(xq) + d.htop(xq - dh)) / (dh * dh);
        double d2bot = (d.hbot(xq + dh) - 2 * d.hbot(xq) + d.hbot(xq - dh)) / (dh * dh);
        if (d2top > tol || d2bot < -tol) rep.convex_ok = false;
    }
    double lim = std::min(L + R, d.x1_max);
    rep.bounded_ok = true;
    for (int k = 0; k <= n_samples; ++k) {
        double xq = d.x1_min + (lim - d.x1_min) * k / n_samples;
        if (std::max(d.htop(xq), -d.hbot(xq)) > C) rep.bounded_ok = false;
    }
    rep.widening_ok = true;
    for (int k = 0; k <= n_samples; ++k) {
        double xq = d.x1_min + (lim - d.x1_min) * k / n_samples;
        // top wall: nu1 <= 0 means htop' >= 0; bottom mirrored
        if (d.htop_prime(xq) < -tol || d.hbot_prime(xq) > tol) rep.widening_ok = false;
    }
    return rep;
}

}  // namespace frontlab
