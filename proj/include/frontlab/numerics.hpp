#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frontlab {

struct FrontlabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : FrontlabError {
    using FrontlabError::FrontlabError;
};

// Recursive adaptive Simpson. Integrand must be smooth on [a,b] up to finitely
// many kinks; tolerance is absolute.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int depth = 40) {
    auto simp = [](double fa, double fm, double fb, double h) {
        return h / 6.0 * (fa + 4.0 * fm + fb);
    };
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double a_, double m_, double b_, double fa, double fm, double fb, double whole,
            int d) -> double {
        double lm = 0.5 * (a_ + m_), rm = 0.5 * (m_ + b_);
        double flm = f(lm), frm = f(rm);
        double left = simp(fa, flm, fm, m_ - a_);
        double right = simp(fm, frm, fb, b_ - m_);
        double delta = left + right - whole;
        if (d <= 0 || std::abs(delta) <= 15.0 * tol)
            return left + right + delta / 15.0;
        return rec(a_, lm, m_, fa, flm, fm, left, d - 1) +
               rec(m_, rm, b_, fm, frm, fb, right, d - 1);
    };
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    return rec(a, m, b, fa, fm, fb, simp(fa, fm, fb, b - a), depth);
}

// Bisection on a sign change of g; requires g(lo) and g(hi) of opposite sign
// (zero counts as either side). Returns the midpoint of the final bracket.
template <class G>
double bisect(G&& g, double lo, double hi, double xtol, int max_iter = 200) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0) == (ghi > 0))
        throw NonConvergence("bisect: no sign change in bracket");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (ghi > 0)) {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    return 0.5 * (lo + hi);
}

// One classic fourth-order Runge-Kutta step for y' = rhs(x, y), y a 2-vector.
template <class Rhs>
inline void rk4_step2(Rhs&& rhs, double x, double h, double& y0, double& y1) {
    double k10, k11, k20, k21, k30, k31, k40, k41;
    rhs(x, y0, y1, k10, k11);
    rhs(x + 0.5 * h, y0 + 0.5 * h * k10, y1 + 0.5 * h * k11, k20, k21);
    rhs(x + 0.5 * h, y0 + 0.5 * h * k20, y1 + 0.5 * h * k21, k30, k31);
    rhs(x + h, y0 + h * k30, y1 + h * k31, k40, k41);
    y0 += h / 6.0 * (k10 + 2 * k20 + 2 * k30 + k40);
    y1 += h / 6.0 * (k11 + 2 * k21 + 2 * k31 + k41);
}

// Number formatting used by every CSV writer: 12 significant digits, locale-free.
inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double sq(double x) { return x * x; }

}  // namespace frontlab
