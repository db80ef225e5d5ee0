#pragma once

// Discrete energy J[u] = sum_faces (u_a - u_b)^2 / 2 - dx^2 sum_cells F(u),
// its gradient, and the constrained gradient flow that produces blocking
// profiles: pinned to 1 along the left columns, optionally to 0 along the
// rightmost column, free elsewhere. The step keeps tau (8/dx^2 + Lip) < 2 so
// every step strictly decreases J until stationarity.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "evolve.hpp"
#include "grid.hpp"

namespace frontlab {

struct LeftBasin : FrontlabError {
    using FrontlabError::FrontlabError;
};
struct SeamMismatch : FrontlabError {
    using FrontlabError::FrontlabError;
};
struct NotStationary : FrontlabError {
    using FrontlabError::FrontlabError;
};

struct EnergyReport {
    double total = 0;      // dirichlet + potential
    double dirichlet = 0;  // integral of |grad u|^2 / 2
    double potential = 0;  // integral of F(u), F(t) = integral_t^1 f >= 0
    double measure = 0;    // area accounted for
};

// Energy over the part of the domain with x1 in [x_lo, x_hi]; faces count when
// both cell centers are in range. Both parts are nonnegative, so J >= 0 with
// equality only at u = 1.
inline EnergyReport energy(const Grid& g, const Bistable& f, const std::vector<double>& u,
                           double x_lo = -std::numeric_limits<double>::infinity(),
                           double x_hi = std::numeric_limits<double>::infinity()) {
    EnergyReport rep;
    double grad2 = 0, pot = 0;
    long cells = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.inside[g.id(i, j)]) continue;
            double x = g.xc(i);
            if (x < x_lo || x > x_hi) continue;
            double c = u[g.id(i, j)];
            pot += f.F(c);
            ++cells;
            if (g.is_inside(i + 1, j) && g.xc(i + 1) <= x_hi)
                grad2 += sq(u[g.id(i + 1, j)] - c);
            if (g.is_inside(i, j + 1)) grad2 += sq(u[g.id(i, j + 1)] - c);
        }
    rep.dirichlet = 0.5 * grad2;
    rep.potential = g.dx * g.dx * pot;
    rep.measure = g.dx * g.dx * cells;
    rep.total = rep.dirichlet + rep.potential;
    return rep;
}

// dJ/du_c = -dx^2 (Lap u + f(u))_c; zero outside the domain.
inline std::vector<double> energy_gradient(const Grid& g, const Bistable& f,
                                           const std::vector<double>& u) {
    std::vector<double> out;
    laplacian(g, u, out);
    double dx2 = g.dx * g.dx;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            size_t id = g.id(i, j);
            if (g.inside[id])
                out[id] = -dx2 * (out[id] + f(u[id]));
            else
                out[id] = 0;
        }
    return out;
}

// max |Lap u + f(u)| over the domain (optionally skipping listed cells).
inline double residual_inf(const Grid& g, const Bistable& f, const std::vector<double>& u,
                           const std::vector<uint8_t>* skip = nullptr) {
    std::vector<double> lap;
    laplacian(g, u, lap);
    double r = 0;
    for (size_t id = 0; id < u.size(); ++id) {
        if (!g.inside[id]) continue;
        if (skip && (*skip)[id]) continue;
        r = std::max(r, std::abs(lap[id] + f(u[id])));
    }
    return r;
}

inline void assert_stationary(const Grid& g, const Bistable& f, const std::vector<double>& u,
                              double tol = 1e-5) {
    double r = residual_inf(g, f, u);
    if (!(r <= tol))
        throw NotStationary("field is not a steady state: |Lap u + f(u)| reaches " +
                            std::to_string(r));
}

// Discrete H1 distance restricted to x1 <= x_hi.
inline double h1_distance(const Grid& g, const std::vector<double>& u,
                          const std::vector<double>& v,
                          double x_hi = std::numeric_limits<double>::infinity()) {
    double acc = 0;
    double dx2 = g.dx * g.dx;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.inside[g.id(i, j)] || g.xc(i) > x_hi) continue;
            double d = u[g.id(i, j)] - v[g.id(i, j)];
            acc += dx2 * d * d;
            if (g.is_inside(i + 1, j) && g.xc(i + 1) <= x_hi)
                acc += sq((u[g.id(i + 1, j)] - v[g.id(i + 1, j)]) - d);
            if (g.is_inside(i, j + 1)) acc += sq((u[g.id(i, j + 1)] - v[g.id(i, j + 1)]) - d);
        }
    return std::sqrt(acc);
}

// The invading ramp: |x1 - b| / (b - a) on [a, b), 0 beyond b, capped at 1 to
// the left. Cheap competitor whose energy is linear in the slab measure.
inline double w0_profile(double a, double b, double x1) {
    if (x1 >= b) return 0.0;
    return std::min(std::abs(x1 - b) / (b - a), 1.0);
}

inline std::vector<double> ramp_field(const Grid& g, double a, double b) {
    auto u = g.make_field();
    for (int i = 0; i < g.nx; ++i) {
        double val = w0_profile(a, b, g.xc(i));
        for (int j = 0; j < g.ny; ++j)
            if (g.inside[g.id(i, j)]) u[g.id(i, j)] = val;
    }
    return u;
}

struct MinimizeOpts {
    double pin_left = 0.0;   // columns with xc <= pin_left held at 1
    bool zero_right = true;  // rightmost column held at 0
    double ramp_width = 2.0;
    double tol_stat = 1e-8;
    int n_confirm = 2;
    double check_interval = 1.0;
    double t_max = 3000.0;
    double delta_ball = 0.5;  // basin radius around the ramp, in H1
};

struct MinimizeResult {
    std::vector<double> w;
    EnergyReport energy;
    double residual = 0;  // |Lap w + f(w)| away from pinned cells
    double t_end = 0;
    double basin_distance = 0;  // H1 distance of the limit from the ramp
    std::vector<std::array<double, 2>> energy_trace;  // (t, J)
};

// Constrained gradient flow from the left-invading ramp. A blocking profile is
// a local minimizer near the ramp; when the flow drifts out of the configured
// H1 ball around it, the geometry does not block and LeftBasin is thrown
// (informative, not a solver failure).
inline MinimizeResult minimize_blocking(const Grid& g, const Bistable& f,
                                        const MinimizeOpts& opt = {}) {
    std::vector<uint8_t> pinned(g.inside.size(), 0);
    std::vector<double> pin_value(g.inside.size(), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            size_t id = g.id(i, j);
            if (!g.inside[id]) continue;
            if (g.xc(i) <= opt.pin_left) {
                pinned[id] = 1;
                pin_value[id] = 1.0;
            } else if (opt.zero_right && i == g.nx - 1) {
                pinned[id] = 1;
                pin_value[id] = 0.0;
            }
        }

    MinimizeResult res;
    res.w = ramp_field(g, opt.pin_left, opt.pin_left + opt.ramp_width);
    auto project = [&](std::vector<double>& u) {
        for (size_t id = 0; id < u.size(); ++id)
            if (pinned[id]) u[id] = pin_value[id];
    };
    project(res.w);

    double tau = stable_dt(g, f);
    long per_check = std::max(1L, static_cast<long>(std::ceil(opt.check_interval / tau - 1e-12)));
    tau = opt.check_interval / per_check;
    long n_checks = std::lround(opt.t_max / opt.check_interval);

    std::vector<double> v = g.make_field();
    std::vector<double> prev = res.w;
    res.energy_trace.push_back({0.0, energy(g, f, res.w).total});

    int confirmed = 0;
    bool done = false;
    detail::with_rate(f, [&](auto rate) {
        for (long k = 1; k <= n_checks && !done; ++k) {
            for (long s = 0; s < per_check; ++s) {
                detail::step_field(g, rate, res.w, v, tau);
                res.w.swap(v);
                project(res.w);
            }
            double t = k * opt.check_interval;
            double dmax = 0;
            for (size_t id = 0; id < res.w.size(); ++id)
                if (g.inside[id]) dmax = std::max(dmax, std::abs(res.w[id] - prev[id]));
            if (!std::isfinite(dmax)) throw StabilityViolation("minimize: field blew up");
            prev = res.w;
            res.t_end = t;
            res.energy_trace.push_back({t, energy(g, f, res.w).total});
            if (dmax / opt.check_interval < opt.tol_stat) {
                if (++confirmed >= opt.n_confirm) done = true;
            } else {
                confirmed = 0;
            }
        }
    });
    if (!done)
        throw NonConvergence("minimize: gradient flow still moving at t = " +
                             std::to_string(res.t_end));

    res.energy = energy(g, f, res.w);
    res.residual = residual_inf(g, f, res.w, &pinned);
    res.basin_distance =
        h1_distance(g, res.w, ramp_field(g, opt.pin_left, opt.pin_left + opt.ramp_width));
    if (res.basin_distance > opt.delta_ball)
        throw LeftBasin("minimize: flow left the basin of the invading ramp (H1 distance " +
                        std::to_string(res.basin_distance) +
                        "); this geometry does not block");
    return res;
}

struct SteadyState {
    std::vector<double> u;
    double residual = 0;  // |Lap u + f(u)|_inf
};

// Accept a finished run as a stationary state; only stationarity-stopped runs
// qualify.
inline SteadyState steady_state(const Grid& g, const Bistable& f, const RunResult& run) {
    if (run.reason != StopReason::Stationary)
        throw NotStationary(std::string("steady_state: run ended by ") + to_string(run.reason) +
                            ", not by stationarity");
    return {run.u, residual_inf(g, f, run.u)};
}

// Paste a blocking profile computed on a longer aligned grid onto the
// evolution grid, extending by 1 to the left. The result is a discrete
// supersolution wherever the donor profile is stationary.
inline std::vector<double> extend_supersolution(const Grid& g, const Grid& donor,
                                                const std::vector<double>& w,
                                                double seam_tol = 1e-9) {
    if (std::abs(donor.dx - g.dx) > 1e-14 * g.dx)
        throw SeamMismatch("extend: grids use different dx");
    if (donor.j0 != g.j0 || donor.ny != g.ny)
        throw SeamMismatch("extend: grids use different cross-section layouts");
    if (donor.x1_max() < g.x1_max() - 1e-12)
        throw SeamMismatch("extend: donor grid does not cover the evolution window");
    long shift = donor.i0 - g.i0;  // donor column 0 sits at evolution column -shift

    // Left of the donor window the extension is identically 1; the donor must
    // agree there, i.e. its first column is pinned at 1.
    for (int j = 0; j < donor.ny; ++j)
        if (donor.inside[donor.id(0, j)] && std::abs(w[donor.id(0, j)] - 1.0) > seam_tol)
            throw SeamMismatch("extend: donor profile leaves 1 at the seam");

    auto v = g.make_field();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.inside[g.id(i, j)]) continue;
            long di = static_cast<long>(i) - shift;  // donor column index
            if (di < 0) {
                v[g.id(i, j)] = 1.0;
                continue;
            }
            if (di >= donor.nx || !donor.inside[donor.id(static_cast<int>(di), j)])
                throw SeamMismatch("extend: domain masks disagree on the overlap");
            v[g.id(i, j)] = w[donor.id(static_cast<int>(di), j)];
        }
    return v;
}

}  // namespace frontlab
