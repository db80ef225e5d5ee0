#pragma once

// The phenomenology layer: turn a finished evolution into a verdict, predict
// the verdict from geometry alone via checkable hypotheses, certify invasion
// lower bounds by dominating a compactly supported sub-state, locate blocking
// thresholds along one-parameter geometry families, and compare evolutions
// under a nonlinearity and its perturbation.

#include <functional>
#include <string>
#include <vector>

#include "evolve.hpp"
#include "geometry.hpp"
#include "radial.hpp"
#include "steady.hpp"

namespace frontlab {

enum class Verdict { Complete, Blocked, AxialPartial, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Complete: return "complete";
        case Verdict::Blocked: return "blocked";
        case Verdict::AxialPartial: return "axial_partial";
        default: return "inconclusive";
    }
}

struct ClassifyOpts {
    double level_hi = 0.95;  // complete: the whole domain ends above this
    double level_lo = 0.05;  // blocked: the right tail stays below this
    double level_mid = 0.1;  // axial: the axis ends above this
};

struct Classification {
    Verdict verdict = Verdict::Inconclusive;
    double global_min = 0, axis_min = 0, right_max = 0;
    bool truncation_touched = false;
    std::string note;
};

// Verdicts only ever strengthen with better resolution/longer windows:
// complete needs the field up everywhere, blocked needs a genuine stationary
// limit with an empty right tail and no activity ever near the right wall.
inline Classification classify(const RunResult& run, const ClassifyOpts& opt = {}) {
    Classification c;
    if (run.trace.empty()) {
        c.note = "no samples";
        return c;
    }
    const RunSample& s = run.trace.back();
    c.global_min = s.umin;
    c.axis_min = s.axis_min;
    c.right_max = s.right_max;
    c.truncation_touched = run.truncation_touched;
    if (s.umin > opt.level_hi) {
        c.verdict = Verdict::Complete;
        c.note = "field above " + std::to_string(opt.level_hi) + " everywhere";
        return c;
    }
    bool stationary = run.reason == StopReason::Stationary;
    if (stationary && !run.truncation_touched && s.right_max < opt.level_lo) {
        c.verdict = Verdict::Blocked;
        c.note = "stationary limit with empty right tail";
        return c;
    }
    if (stationary && s.axis_min > opt.level_mid) {
        c.verdict = Verdict::AxialPartial;
        c.note = "axis invaded but the field is not close to 1 everywhere";
        return c;
    }
    c.note = stationary ? "stationary limit fits no category"
             : run.truncation_touched
                 ? "activity reached the right truncation wall before a verdict"
                 : "no stationary limit before the time horizon";
    return c;
}

// ---- certified lower bound ----------------------------------------------------

struct HypothesisUnmet : FrontlabError {
    using FrontlabError::FrontlabError;
};
struct SupportViolation : FrontlabError {
    using FrontlabError::FrontlabError;
};

struct LowerBoundReport {
    bool holds = false;
    double margin = 0;  // min over the strip of u - w(|x2|); delta of the bound
    double worst_x1 = 0, worst_x2 = 0;
    long cells = 0;
};

// Check u >= w(|x2|) - tol on the strip |x2| <= ball.R, the stationary floor
// that pins the axis away from 0. The strip must fit inside the domain.
inline LowerBoundReport verify_lower_bound(const Grid& g, const std::vector<double>& u,
                                           const BallSolution& ball, double tol = 0.0) {
    if (min_halfwidth(g.domain) < ball.R - 1e-12)
        throw HypothesisUnmet("lower bound: the strip of half-width " + std::to_string(ball.R) +
                              " does not fit inside the domain");
    LowerBoundReport rep;
    rep.margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.inside[g.id(i, j)]) continue;
            double y = std::abs(g.yc(j));
            if (y > ball.R) continue;
            double m = u[g.id(i, j)] - ball(y);
            ++rep.cells;
            if (m < rep.margin) {
                rep.margin = m;
                rep.worst_x1 = g.xc(i);
                rep.worst_x2 = g.yc(j);
            }
        }
    if (rep.cells == 0) throw HypothesisUnmet("lower bound: strip contains no cell centers");
    rep.holds = rep.margin >= -tol;
    return rep;
}

// ---- geometric prediction ------------------------------------------------------

struct PredictionRule {
    std::string name;
    bool fired = false;
    std::string detail;
};

struct Prediction {
    Verdict expected = Verdict::Inconclusive;
    double R0 = 0, R1 = 0, min_hw = 0;
    std::vector<PredictionRule> rules;
};

struct PredictOpts {
    double delta = 0.05;  // margin above the trapping level for R1
    int n_samples = 2048;
};

inline Prediction predict(const DomainSpec& d, const Bistable& f, const PredictOpts& opt = {}) {
    Prediction p;
    p.R0 = find_R0(f, 2);
    p.R1 = find_R1(f, 2, opt.delta);
    p.min_hw = min_halfwidth(d, opt.n_samples);

    auto add = [&](std::string name, bool fired, std::string detail) {
        p.rules.push_back({std::move(name), fired, std::move(detail)});
        return fired;
    };

    bool complete = false;
    complete |= add("nonincreasing_width", is_decreasing(d, 1e-9, opt.n_samples),
                    "outward normal never points backward: invasion sweeps the whole domain");

    bool star = is_star_shaped_axis(d, 1e-9, opt.n_samples);
    complete |= add("star_shaped_wide", star && p.min_hw > p.R0,
                    "cross-sections star-shaped and wider than the persistence radius");

    // widening right part: straight core of radius min_hw, convexity beyond the
    // last wall breakpoint, bounded spread before it
    double L = std::max(d.top.x.back(), d.bot.x.back()) + d.smoothing;
    double C = std::hypot(std::max(std::abs(d.x1_min), std::abs(L + p.min_hw)),
                          max_halfwidth(d, std::min(L + p.min_hw, d.x1_max))) +
               1.0;
    auto rep = check_increasing_hypotheses(d, L, p.min_hw, C, opt.n_samples);
    complete |= add("widening_convex_wide", p.min_hw > p.R1 && rep.ok(),
                    "straight core wider than the trapping radius and convex widening tail");

    bool axial = add("wide_axial_tube", p.min_hw > p.R0,
                     "a tube wider than the persistence radius fits: the axis is invaded");

    // existential note: a genuine constriction blocks once it is narrow enough
    double lead = std::min(d.htop(d.x1_min), -d.hbot(d.x1_min));
    bool constricted = p.min_hw < lead - 1e-9;
    if (constricted) {
        double arg = d.x1_min, best = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= opt.n_samples; ++k) {
            double x = d.x1_min + (d.x1_max - d.x1_min) * k / opt.n_samples;
            double hw = std::min(d.htop(x), -d.hbot(x));
            if (hw < best) {
                best = hw;
                arg = x;
            }
        }
        constricted = max_halfwidth(d, d.x1_max) > best + 1e-9 && arg > d.x1_min;
    }
    add("narrow_passage_blocking_exists", constricted,
        "the family obtained by shrinking this constriction blocks for small enough size; "
        "no verdict at this size");

    if (complete)
        p.expected = Verdict::Complete;
    else if (axial)
        p.expected = Verdict::AxialPartial;
    return p;
}

// ---- threshold scan -------------------------------------------------------------

struct BudgetExceeded : FrontlabError {
    using FrontlabError::FrontlabError;
};

struct ScanOpts {
    double eps_lo = 0, eps_hi = 0;  // must bracket: blocked at lo, complete at hi
    double eps_tol = 1e-2;
    std::function<double(double)> dx_rule;  // default: min(eps/4, 0.1)
    double x_front = -3.0;
    int max_probes = 64;
    EvolveOpts evolve;
};

struct ScanProbe {
    double eps = 0;
    Verdict verdict = Verdict::Inconclusive;
    double t_end = 0;
    double speed = 0;     // trailing front speed of the probe run
    double tail_max = 0;  // final right-tail max
};

struct ScanResult {
    double lo = 0, hi = 0;  // final bracket: blocked at lo, complete at hi
    std::vector<ScanProbe> probes;
    double eps_star() const { return 0.5 * (lo + hi); }
};

// Bisect the blocking threshold of a one-parameter geometry family (parameter
// monotone by construction: larger eps, wider passage). Probes must come back
// decisive; anything but blocked/complete aborts the scan.
inline ScanResult threshold_scan(const std::function<DomainSpec(double)>& family,
                                 const Bistable& f, const ScanOpts& opt) {
    if (!(opt.eps_lo < opt.eps_hi)) throw FrontlabError("scan: empty bracket");
    auto dx_of = opt.dx_rule ? opt.dx_rule : [](double e) { return std::min(e / 4.0, 0.1); };
    auto wave = solve_wave(f);

    ScanResult res;
    auto probe = [&](double eps) {
        if (static_cast<int>(res.probes.size()) >= opt.max_probes)
            throw BudgetExceeded("scan: probe budget exhausted with bracket [" +
                                 std::to_string(res.lo) + ", " + std::to_string(res.hi) + "]");
        Grid g = make_grid(family(eps), dx_of(eps));
        auto run = evolve(g, f, init_front(g, wave, opt.x_front), opt.evolve);
        Classification c = classify(run);
        double sp = estimate_speed(run.trace);
        res.probes.push_back({eps, c.verdict, run.t_end, std::isfinite(sp) ? sp : 0.0,
                              c.right_max});
        if (c.verdict == Verdict::Blocked) return false;
        if (c.verdict == Verdict::Complete) return true;
        throw FrontlabError("scan: probe at eps = " + std::to_string(eps) + " came back " +
                            to_string(c.verdict) + " (" + c.note + ")");
    };

    if (probe(opt.eps_lo))
        throw FrontlabError("scan: lower endpoint already lets the front through");
    if (!probe(opt.eps_hi)) throw FrontlabError("scan: upper endpoint blocks");
    res.lo = opt.eps_lo;
    res.hi = opt.eps_hi;
    while (res.hi - res.lo > opt.eps_tol) {
        double mid = 0.5 * (res.lo + res.hi);
        (probe(mid) ? res.hi : res.lo) = mid;
    }
    return res;
}

// ---- Cauchy data ----------------------------------------------------------------

// Plateau initial state: height on [lo, hi] along x1, 0 elsewhere.
inline std::vector<double> make_plateau(const Grid& g, double lo, double hi, double height) {
    auto u = g.make_field();
    for (int i = 0; i < g.nx; ++i) {
        if (g.xc(i) < lo || g.xc(i) > hi) continue;
        for (int j = 0; j < g.ny; ++j)
            if (g.inside[g.id(i, j)]) u[g.id(i, j)] = height;
    }
    return u;
}

struct CauchyOutcome {
    Classification cls;
    RunResult run;
};

// Evolve arbitrary initial data supported left of x1 = support_bound and
// classify the outcome. Geometries that block the traveling front block every
// such datum; propagation additionally needs a large enough super-threshold
// region in u0.
inline CauchyOutcome cauchy(const Grid& g, const Bistable& f, std::vector<double> u0,
                            double support_bound, const EvolveOpts& opt = {}) {
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            size_t id = g.id(i, j);
            if (!g.inside[id]) continue;
            if (u0[id] < 0.0 || u0[id] > 1.0)
                throw SupportViolation("cauchy: initial data must take values in [0, 1]");
            if (u0[id] != 0.0 && g.xc(i) >= support_bound)
                throw SupportViolation("cauchy: initial data must vanish right of x1 = " +
                                       std::to_string(support_bound));
        }
    CauchyOutcome out;
    out.run = evolve(g, f, std::move(u0), opt);
    out.cls = classify(out.run);
    return out;
}

}  // namespace frontlab
