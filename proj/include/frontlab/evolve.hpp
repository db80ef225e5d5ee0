#pragma once

// Explicit gradient-flow time stepping for u_t = Lap u + f(u) with zero-flux
// walls. The step obeys dt (4/dx^2 + Lip f) < 1, which makes the update map
// monotone: comparison arguments transfer to the discrete solution verbatim.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "bistable.hpp"
#include "grid.hpp"
#include "wave1d.hpp"

namespace frontlab {

struct StabilityViolation : FrontlabError {
    using FrontlabError::FrontlabError;
};
struct FrontTooClose : FrontlabError {
    using FrontlabError::FrontlabError;
};

// Largest step that keeps the update monotone (and well inside the diffusive
// stability limit).
inline double stable_dt(const Grid& g, const Bistable& f, double safety = 0.9) {
    double inv = 1.0 / (g.dx * g.dx);
    return std::min(safety / (4.0 * inv), 0.98 / (4.0 * inv + f.lipschitz()));
}

namespace detail {

struct CubicRate {
    double s, a;
    double operator()(double u) const { return s * (u * (1.0 - u) * (u - a)); }
};
struct AnyRate {
    const Bistable* f;
    double operator()(double u) const { return (*f)(u); }
};

// v = u + dt (Lap u + f(u)). Interior segments are branch-free and contiguous;
// the remainder walks the boundary cells with per-face openness checks.
template <class F>
void step_field(const Grid& g, const F& f, const std::vector<double>& u, std::vector<double>& v,
                double dt) {
    const double alpha = dt / (g.dx * g.dx);
    const int nx = g.nx;
    const double* ub = u.data();
    double* vb = v.data();
    for (const auto& s : g.fast) {
        const double* row = ub + static_cast<size_t>(s.j) * nx;
        double* out = vb + static_cast<size_t>(s.j) * nx;
        for (int i = s.i_begin; i < s.i_end; ++i) {
            double c = row[i];
            out[i] = c + alpha * (row[i - 1] + row[i + 1] + row[i - nx] + row[i + nx] - 4.0 * c) +
                     dt * f(c);
        }
    }
    for (int32_t id : g.slow) {
        int i = static_cast<int>(id % nx), j = static_cast<int>(id / nx);
        double c = ub[id], acc = 0;
        if (g.is_inside(i - 1, j)) acc += ub[id - 1] - c;
        if (g.is_inside(i + 1, j)) acc += ub[id + 1] - c;
        if (g.is_inside(i, j - 1)) acc += ub[id - nx] - c;
        if (g.is_inside(i, j + 1)) acc += ub[id + nx] - c;
        vb[id] = c + alpha * acc + dt * f(c);
    }
}

template <class Fn>
void with_rate(const Bistable& f, Fn&& fn) {
    if (f.kind() == Bistable::Kind::Cubic)
        fn(CubicRate{f.scale(), f.cubic_a()});
    else
        fn(AnyRate{&f});
}

}  // namespace detail

// The sliding subsolution at time T, the canonical initial state: evolving it
// approximates the entire solution that converges to the planar front as
// T -> -infinity. Columns are constant in x2; the profile vanishes for x1 > 0.
inline std::vector<double> init_entire(const Grid& g, const WaveProfile& p,
                                       const ShiftFunction& s, double T,
                                       double guard_distance = 2.0) {
    auto u = g.make_field();
    double level = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.nx; ++i) {
        double v = std::max(subsolution(p, s, T, g.xc(i)), 0.0);
        if (v >= p.theta) level = g.xc(i);
        for (int j = 0; j < g.ny; ++j)
            if (g.inside[g.id(i, j)]) u[g.id(i, j)] = v;
    }
    if (!(level >= g.x1_min() + guard_distance))
        throw FrontTooClose("init: the theta level of the initial state sits within the guard "
                            "distance of the left truncation wall; move T or widen the window");
    return u;
}

// Planar front profile stamped onto the grid with its theta level at x_front;
// the cheap initializer for scans and command-line runs.
inline std::vector<double> init_front(const Grid& g, const WaveProfile& p, double x_front,
                                      double guard_distance = 2.0) {
    if (x_front < g.x1_min() + guard_distance)
        throw FrontTooClose("init: front too close to the left truncation wall");
    auto u = g.make_field();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.inside[g.id(i, j)]) u[g.id(i, j)] = p(g.xc(i) - x_front);
    return u;
}

// Rightmost axis crossing of the half level, linearly interpolated. NaN when
// the level is never reached.
inline double front_position(const Grid& g, const std::vector<double>& u, double level = 0.5) {
    int j = g.axis_row;
    if (j < 0 || j >= g.ny) return std::numeric_limits<double>::quiet_NaN();
    for (int i = g.nx - 1; i >= 0; --i) {
        if (!g.inside[g.id(i, j)]) continue;
        double c = u[g.id(i, j)];
        if (c >= level) {
            if (g.is_inside(i + 1, j)) {
                double r = u[g.id(i + 1, j)];
                if (r < level) return g.xc(i) + g.dx * (c - level) / (c - r);
            }
            return g.xc(i);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

enum class StopReason { Stationary, FrontReached, TimeLimit };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Stationary: return "stationary";
        case StopReason::FrontReached: return "front_reached";
        default: return "time_limit";
    }
}

struct RunSample {
    double t = 0, residual = 0, front = 0;
    double umin = 0, umax = 0, axis_min = 0, right_max = 0;
};

struct EvolveOpts {
    double t_max = 400.0;
    double check_interval = 1.0;
    double tol_stat = 1e-7;  // max |u_t| for stationarity
    int n_confirm = 3;
    double safety = 0.9;
    double dt_override = 0;  // 0: use stable_dt
    double front_target = std::numeric_limits<double>::quiet_NaN();
    double guard_level = 0.1;  // truncation guard: activity this high ...
    int guard_cells = 5;       // ... within this many columns of x1_max
    std::function<void(double, const std::vector<double>&)> observer;
};

struct RunResult {
    StopReason reason = StopReason::TimeLimit;
    double t_end = 0, dt = 0;
    bool truncation_touched = false;
    double min_check_delta = 0;  // most negative pointwise change between checks
    std::vector<RunSample> trace;
    std::vector<double> u;
};

inline RunResult evolve(const Grid& g, const Bistable& f, std::vector<double> u0,
                        const EvolveOpts& opt = {}) {
    double dtmax = stable_dt(g, f, opt.safety);
    double dt = dtmax;
    if (opt.dt_override > 0) {
        if (opt.dt_override > dtmax + 1e-15)
            throw StabilityViolation("evolve: requested dt exceeds the monotone stability bound");
        dt = opt.dt_override;
    }
    long per_check = std::max(1L, static_cast<long>(std::ceil(opt.check_interval / dt - 1e-12)));
    dt = opt.check_interval / per_check;

    RunResult res;
    res.dt = dt;
    res.u = std::move(u0);
    std::vector<double> v = g.make_field();
    std::vector<double> prev = res.u;

    int right_begin = std::max(0, g.nx - std::max(1, g.nx / 10));
    int guard_begin = std::max(0, g.nx - opt.guard_cells);
    int confirmed = 0;
    long n_checks = std::max(1L, std::lround(opt.t_max / opt.check_interval));

    auto sample = [&](double t) {
        RunSample s;
        s.t = t;
        s.umin = std::numeric_limits<double>::infinity();
        s.umax = -s.umin;
        s.axis_min = std::numeric_limits<double>::infinity();
        s.right_max = 0;
        double dmax = 0, dmin = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                size_t id = g.id(i, j);
                if (!g.inside[id]) continue;
                double c = res.u[id];
                s.umin = std::min(s.umin, c);
                s.umax = std::max(s.umax, c);
                if (j == g.axis_row) s.axis_min = std::min(s.axis_min, c);
                if (i >= right_begin) s.right_max = std::max(s.right_max, c);
                double d = c - prev[id];
                dmax = std::max(dmax, std::abs(d));
                dmin = std::min(dmin, d);
            }
        s.residual = dmax / opt.check_interval;
        s.front = front_position(g, res.u);
        res.min_check_delta = std::min(res.min_check_delta, dmin);
        if (!std::isfinite(s.umax) || !std::isfinite(s.umin))
            throw StabilityViolation("evolve: field blew up");
        return s;
    };

    detail::with_rate(f, [&](auto rate) {
        for (long k = 1; k <= n_checks; ++k) {
            for (long s = 0; s < per_check; ++s) {
                detail::step_field(g, rate, res.u, v, dt);
                res.u.swap(v);
            }
            double t = k * opt.check_interval;
            RunSample s = sample(t);
            // truncation guard: activity near the right wall voids any later
            // blocking verdict, so latch it
            for (int j = 0; j < g.ny && !res.truncation_touched; ++j)
                for (int i = guard_begin; i < g.nx; ++i)
                    if (g.inside[g.id(i, j)] && res.u[g.id(i, j)] >= opt.guard_level) {
                        res.truncation_touched = true;
                        break;
                    }
            res.trace.push_back(s);
            if (opt.observer) opt.observer(t, res.u);
            prev = res.u;
            res.t_end = t;
            if (s.residual < opt.tol_stat) {
                if (++confirmed >= opt.n_confirm) {
                    res.reason = StopReason::Stationary;
                    return;
                }
            } else {
                confirmed = 0;
            }
            if (std::isfinite(opt.front_target) && std::isfinite(s.front) &&
                s.front >= opt.front_target) {
                res.reason = StopReason::FrontReached;
                return;
            }
        }
        res.reason = StopReason::TimeLimit;
    });
    return res;
}

// Least-squares slope of the front track over the trailing window; NaN when
// fewer than two finite samples.
inline double estimate_speed(const std::vector<RunSample>& trace, int window = 10) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t k = trace.size() >= static_cast<size_t>(window) ? trace.size() - window : 0;
         k < trace.size(); ++k) {
        if (!std::isfinite(trace[k].front)) continue;
        sx += trace[k].t;
        sy += trace[k].front;
        sxx += trace[k].t * trace[k].t;
        sxy += trace[k].t * trace[k].front;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double det = n * sxx - sx * sx;
    if (det == 0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / det;
}

}  // namespace frontlab
