#pragma once

// Planar front phi(x - c t) for a bistable f: phi'' + c phi' + f(phi) = 0,
// phi(-inf) = upper, phi(+inf) = lower, normalized phi(0) = theta. Solved by
// phase-plane shooting from the unstable manifold of (upper, 0) with bisection
// on c. Also: the exponential shift xi(t) and the sliding sub/supersolution
// pair built from phi, used to seed simulations with a front coming from -inf.

#include <cmath>
#include <vector>

#include "bistable.hpp"
#include "numerics.hpp"

namespace frontlab {

struct NoWave : FrontlabError {
    using FrontlabError::FrontlabError;
};
struct OutOfValidity : FrontlabError {
    using FrontlabError::FrontlabError;
};

struct WaveProfile {
    double c = 0;        // front speed
    double lambda = 0;   // decay rate of phi toward lower as xi -> +inf
    double mu = 0;       // decay rate of (upper - phi) as xi -> -inf
    double theta = 0;
    double lo = 0, hi = 1;
    double xi0 = 0, h = 0;      // uniform table: xi_k = xi0 + k h
    std::vector<double> phi;
    double amp_left = 0, amp_right = 0;  // tail amplitudes at the window ends

    double W() const { return std::max(-xi0, xi0 + h * (phi.size() - 1)); }

    double operator()(double xi) const {
        double xe = xi0 + h * (phi.size() - 1);
        if (xi <= xi0) return hi - amp_left * std::exp(mu * xi);
        if (xi >= xe) return lo + amp_right * std::exp(-lambda * xi);
        double s = (xi - xi0) / h;
        size_t k = std::min(static_cast<size_t>(s), phi.size() - 2);
        double w = s - k;
        return phi[k] + w * (phi[k + 1] - phi[k]);
    }
};

// lambda = (c + sqrt(c^2 - 4 f'(lower))) / 2; f'(lower) < 0 so this is real.
inline double decay_rate(double c, double fprime_lo) {
    return 0.5 * (c + std::sqrt(c * c - 4.0 * fprime_lo));
}

namespace detail {

// -1: crossed the lower state (c too small). +1: slope turned nonnegative
// before reaching it (c too large; includes levelling off).
inline int classify_shot(const Bistable& b, double c, double h, double xi_cap) {
    double lo = b.lower(), hi = b.upper(), amp = hi - lo;
    double mu = 0.5 * (-c + std::sqrt(c * c - 4.0 * b.fprime_hi()));
    double eps = 1e-8 * amp;
    double w = hi - eps, wp = -eps * mu;
    auto rhs = [&](double, double y0, double y1, double& d0, double& d1) {
        d0 = y1;
        d1 = -c * y1 - b(y0);
    };
    long n = static_cast<long>(xi_cap / h);
    for (long i = 0; i < n; ++i) {
        rk4_step2(rhs, 0.0, h, w, wp);
        if (w <= lo) return -1;
        if (wp >= 0.0 && w < hi - 1e-6 * amp) return +1;
    }
    return +1;
}

}  // namespace detail

struct WaveOpts {
    double ctol = 1e-10;    // bisection width on c
    double h = 1e-3;        // RK4 step in xi
    double tail = 1e-8;     // tabulate until within tail*(hi-lo) of both limits
    double xi_cap = 400.0;  // integration guard
};

inline WaveProfile solve_wave(const Bistable& b, WaveOpts opt = {}) {
    double lo = b.lower(), hi = b.upper(), amp = hi - lo;
    if (!(b.fprime_lo() < 0) || !(b.fprime_hi() < 0))
        throw NoWave("solve_wave: endpoint derivatives must be negative");
    double cmax = 2.0 * std::sqrt(b.lipschitz()) + 1.0;
    double clo = -cmax, chi = cmax;
    if (detail::classify_shot(b, clo, opt.h, opt.xi_cap) > 0 ||
        detail::classify_shot(b, chi, opt.h, opt.xi_cap) < 0)
        throw NoWave("solve_wave: speed bracket failed");
    while (chi - clo > opt.ctol) {
        double mid = 0.5 * (clo + chi);
        if (detail::classify_shot(b, mid, opt.h, opt.xi_cap) < 0)
            clo = mid;
        else
            chi = mid;
    }
    WaveProfile p;
    p.c = 0.5 * (clo + chi);
    p.lo = lo;
    p.hi = hi;
    p.theta = b.theta();
    p.lambda = decay_rate(p.c, b.fprime_lo());
    p.mu = 0.5 * (-p.c + std::sqrt(p.c * p.c - 4.0 * b.fprime_hi()));
    p.h = opt.h;

    // Re-integrate at the converged speed, recording the orbit until both
    // tails are within opt.tail of their limits.
    double eps = 1e-8 * amp;
    double w = hi - eps, wp = -eps * p.mu;
    auto rhs = [&](double, double y0, double y1, double& d0, double& d1) {
        d0 = y1;
        d1 = -p.c * y1 - b(y0);
    };
    p.phi.clear();
    p.phi.push_back(w);
    double xi_theta = -1.0;
    long n = static_cast<long>(opt.xi_cap / opt.h);
    for (long i = 0; i < n; ++i) {
        double wprev = w;
        rk4_step2(rhs, 0.0, opt.h, w, wp);
        if (w < lo + 0.5 * opt.tail * amp || wp >= 0.0) {
            // keep the last in-range point; the analytic tail takes over
            break;
        }
        p.phi.push_back(w);
        if (xi_theta < 0 && wprev >= p.theta && w < p.theta) {
            double k = static_cast<double>(p.phi.size() - 2);
            xi_theta = (k + (wprev - p.theta) / (wprev - w)) * opt.h;
        }
    }
    if (xi_theta < 0) throw NoWave("solve_wave: orbit never crossed theta");
    p.xi0 = -xi_theta;
    double xe = p.xi0 + opt.h * (p.phi.size() - 1);
    p.amp_left = (hi - p.phi.front()) * std::exp(-p.mu * p.xi0);
    p.amp_right = (p.phi.back() - lo) * std::exp(p.lambda * xe);
    return p;
}

// xi(t) = (1/lambda) ln( 1 / (1 - (M/c) e^{lambda c t}) ), the outward shift
// that turns the sliding fronts into sub/supersolutions. Defined for
// t <= valid_until = ln(c/M) / (lambda c); xi(-inf) = 0.
struct ShiftFunction {
    double M = 0, lambda = 0, c = 0;
    double valid_until = 0;

    double operator()(double t) const {
        if (t > valid_until)
            throw OutOfValidity("shift: t beyond validity window");
        double z = (M / c) * std::exp(lambda * c * t);
        return -std::log1p(-z) / lambda;
    }
};

// M defaults to c/2, which keeps t = 0 inside the validity window.
inline ShiftFunction make_shift(const WaveProfile& p, double M = -1.0) {
    if (!(p.c > 0)) throw OutOfValidity("shift: requires a positive speed");
    if (M <= 0) M = 0.5 * p.c;
    if (M >= p.c) throw OutOfValidity("shift: need M < c");
    ShiftFunction s;
    s.M = M;
    s.lambda = p.lambda;
    s.c = p.c;
    s.valid_until = std::log(p.c / M) / (p.lambda * p.c);
    return s;
}

// Supersolution: 2 phi(-c t - xi) ahead of the opening, a pair of mirrored
// fronts behind it. Subsolution: 0 ahead, the mirrored difference behind.
inline double supersolution(const WaveProfile& p, const ShiftFunction& s, double t, double x1) {
    double xi = s(t);
    if (x1 > 0) return 2.0 * p(-p.c * t - xi);
    return p(x1 - p.c * t - xi) + p(-x1 - p.c * t - xi);
}

inline double subsolution(const WaveProfile& p, const ShiftFunction& s, double t, double x1) {
    double xi = s(t);
    if (x1 > 0) return 0.0;
    double v = p(x1 - p.c * t + xi) - p(-x1 - p.c * t + xi);
    return std::max(v, 0.0);
}

}  // namespace frontlab
