#pragma once

// Dirichlet problem -Delta z = f(z) on a ball B_R: radial shooting on the
// center value m of w'' + (N-1)/r w' + f(w) = 0, w'(0) = 0, picking the
// maximal solution (largest m whose first zero lands exactly on R). R0 is the
// existence threshold, R1 additionally asks the center value to clear
// beta + 2 delta. A small embedded-disc gradient flow provides an independent
// N=2 cross-check of R0.

#include <cmath>
#include <optional>
#include <vector>

#include "bistable.hpp"
#include "numerics.hpp"

namespace frontlab {

struct BallSolution {
    double R = 0;
    int N = 2;
    double h = 0;            // radial table step
    std::vector<double> w;   // w[k] at r = k h, w[0] = center value
    double center() const { return w.front(); }
    double operator()(double r) const {
        if (r <= 0) return w.front();
        double s = r / h;
        size_t k = static_cast<size_t>(s);
        if (k + 1 >= w.size()) return 0.0;
        double t = s - k;
        return w[k] + t * (w[k + 1] - w[k]);
    }
};

namespace detail {

// Integrate from the regular center; the r=0 singularity is started with the
// series w(r) = m - f(m) r^2 / (2N). Returns the first-zero radius, +inf when
// the profile turns around while still positive, and stops early once r > rcap.
template <class Rec>
double first_zero_radius(const Bistable& b, double m, int N, double hstep, double rcap,
                         Rec&& record) {
    double r = hstep;
    double w = m - b(m) * r * r / (2.0 * N);
    double wp = -b(m) * r / N;
    record(m);
    record(w);
    auto rhs = [&](double rr, double y0, double y1, double& d0, double& d1) {
        d0 = y1;
        d1 = -(N - 1) / rr * y1 - b(y0);
    };
    while (r < rcap) {
        double w0 = w;
        rk4_step2(rhs, r, hstep, w, wp);
        r += hstep;
        if (w <= 0.0) return (r - hstep) + hstep * w0 / (w0 - w);
        record(w);
        if (wp >= 0.0) return std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::infinity();
}

inline double first_zero_radius(const Bistable& b, double m, int N, double hstep, double rcap) {
    return first_zero_radius(b, m, N, hstep, rcap, [](double) {});
}

}  // namespace detail

struct RadialOpts {
    double h = 1e-3;      // RK4 radial step
    double mtol = 1e-10;  // bisection width on the center value
    int ladder = 512;     // scan resolution when bracketing the upper branch
};

// Maximal positive radial solution vanishing at R, or nullopt below threshold.
inline std::optional<BallSolution> solve_ball(const Bistable& b, double R, int N,
                                              RadialOpts opt = {}) {
    if (!(R > 0) || N < 1) throw FrontlabError("solve_ball: need R > 0, N >= 1");
    double lo = b.lower(), hi = b.upper();
    double mfloor = std::isnan(b.beta()) ? b.theta() : b.beta();
    // hits_R(m): first zero strictly inside [0, R]? upper branch = largest m
    // for which the zero lands beyond R.
    auto zero_before = [&](double m) {
        return detail::first_zero_radius(b, m, N, opt.h, R) <= R;
    };
    double mtop = hi - 1e-9 * (hi - lo);
    if (zero_before(mtop)) return std::nullopt;  // degenerate: R tiny
    double mhi = mtop, mlo = -1;
    for (int k = 1; k <= opt.ladder; ++k) {
        double m = mtop - (mtop - (mfloor + 1e-9)) * k / opt.ladder;
        if (zero_before(m)) {
            mlo = m;
            break;
        }
        mhi = m;
    }
    if (mlo < 0) return std::nullopt;  // no positive solution at this radius
    while (mhi - mlo > opt.mtol) {
        double mid = 0.5 * (mlo + mhi);
        (zero_before(mid) ? mlo : mhi) = mid;
    }
    double m = mhi;  // zero lands at/just beyond R
    BallSolution sol;
    sol.R = R;
    sol.N = N;
    sol.h = opt.h;
    sol.w.clear();
    detail::first_zero_radius(b, m, N, opt.h, R, [&](double w) { sol.w.push_back(w); });
    // clamp the tail: the recorded profile may stop a hair short of R
    while (sol.w.size() < static_cast<size_t>(R / opt.h) + 1) sol.w.push_back(0.0);
    for (auto& v : sol.w) v = std::max(v, 0.0);
    return sol;
}

// Existence threshold: bisection on R between a radius with no positive
// solution and one with a solution. Brackets are exact by construction.
inline double find_R0(const Bistable& b, int N, double rtol = 1e-5, RadialOpts opt = {}) {
    if (!(b.mass() > 0))
        throw FrontlabError("find_R0: requires positive integral of f");
    double Rlo = 0.5, Rhi = 1.0;
    while (!solve_ball(b, Rhi, N, opt).has_value()) {
        Rlo = Rhi;
        Rhi *= 2.0;
        if (Rhi > 1e4) throw NonConvergence("find_R0: no solution up to R = 1e4");
    }
    while (solve_ball(b, Rlo, N, opt).has_value()) {
        Rlo *= 0.5;
        if (Rlo < 1e-6) break;
    }
    while (Rhi - Rlo > rtol) {
        double mid = 0.5 * (Rlo + Rhi);
        (solve_ball(b, mid, N, opt).has_value() ? Rhi : Rlo) = mid;
    }
    return 0.5 * (Rlo + Rhi);
}

// Smallest R whose maximal solution clears beta + 2 delta at the center.
inline double find_R1(const Bistable& b, int N, double delta, double rtol = 1e-5,
                      RadialOpts opt = {}) {
    double target = b.beta() + 2.0 * delta;
    if (!(target < b.upper()))
        throw FrontlabError("find_R1: beta + 2 delta must stay below the upper zero");
    double R0 = find_R0(b, N, rtol, opt);
    auto center_above = [&](double R) {
        auto s = solve_ball(b, R, N, opt);
        return s && s->center() > target;
    };
    double Rlo = R0 + rtol;
    if (center_above(Rlo)) return Rlo;
    double Rhi = std::max(2.0 * R0, Rlo + 1.0);
    while (!center_above(Rhi)) {
        Rhi *= 2.0;
        if (Rhi > 1e4) throw NonConvergence("find_R1: center value never clears target");
    }
    while (Rhi - Rlo > rtol) {
        double mid = 0.5 * (Rlo + Rhi);
        (center_above(mid) ? Rhi : Rlo) = mid;
    }
    return 0.5 * (Rlo + Rhi);
}

// Independent N=2 cross-check: explicit gradient flow of
// J(w) = int 1/2 |grad w|^2 + F(w) on a pixelated disc with zero Dirichlet
// data, started from w = 1. A positive solution exists iff the flow settles
// above theta. Bisection on R.
inline double find_R0_energy2d(const Bistable& b, double R_hint, double dx = 0.15,
                               double rel_width = 0.05, double t_settle = 300.0) {
    auto exists = [&](double R) {
        int n = static_cast<int>(2.0 * R / dx) + 4;
        auto inside = [&](int i, int j) {
            double x = (i - 0.5 * n + 0.5) * dx, y = (j - 0.5 * n + 0.5) * dx;
            return x * x + y * y < R * R;
        };
        std::vector<double> u(static_cast<size_t>(n) * n, 0.0);
        std::vector<char> in(static_cast<size_t>(n) * n, 0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) in[static_cast<size_t>(j) * n + i] = inside(i, j);
        for (size_t k = 0; k < u.size(); ++k) u[k] = in[k] ? 1.0 : 0.0;
        std::vector<double> v = u;
        double tau = 0.9 * dx * dx / 4.0;
        long steps = static_cast<long>(t_settle / tau);
        long check = std::max<long>(1, static_cast<long>(5.0 / tau));
        auto peak = [&] {
            double umax = 0;
            for (size_t k = 0; k < u.size(); ++k)
                if (in[k]) umax = std::max(umax, u[k]);
            return umax;
        };
        double prev_peak = 1.0;
        for (long s = 0; s < steps; ++s) {
            for (int j = 1; j + 1 < n; ++j) {
                for (int i = 1; i + 1 < n; ++i) {
                    size_t k = static_cast<size_t>(j) * n + i;
                    if (!in[k]) continue;
                    // Dirichlet 0 outside: absent neighbors contribute -u
                    double lap = (in[k - 1] ? u[k - 1] : 0.0) + (in[k + 1] ? u[k + 1] : 0.0) +
                                 (in[k - n] ? u[k - n] : 0.0) + (in[k + n] ? u[k + n] : 0.0) -
                                 4.0 * u[k];
                    v[k] = u[k] + tau * (lap / (dx * dx) + b(u[k]));
                }
            }
            std::swap(u, v);
            if (s % check == check - 1) {
                double p = peak();
                if (p < b.theta()) return false;  // below theta the flow can only decay
                if (std::abs(p - prev_peak) < 1e-7) return true;
                prev_peak = p;
            }
        }
        return peak() > b.theta();
    };
    double Rlo = 0.5 * R_hint, Rhi = 1.5 * R_hint;
    while (exists(Rlo)) Rlo *= 0.75;
    while (!exists(Rhi)) Rhi *= 1.5;
    while (Rhi - Rlo > rel_width * R_hint * 0.5) {
        double mid = 0.5 * (Rlo + Rhi);
        (exists(mid) ? Rhi : Rlo) = mid;
    }
    return 0.5 * (Rlo + Rhi);
}

}  // namespace frontlab
