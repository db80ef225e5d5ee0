#pragma once

// Cell-centered finite-volume grid on the bounding box of a domain. Faces sit
// on integer multiples of dx (so x1 = 0 and x2 = 0 are faces and the straight
// left part of half-width k dx resolves to exactly 2k cells); cell centers at
// (i + 1/2) dx. A cell belongs to the domain iff its center does; a face is
// open iff both adjacent cells belong. Closed faces carry zero flux, which is
// the homogeneous Neumann condition.

#include <cstdint>
#include <queue>
#include <vector>

#include "geometry.hpp"
#include "numerics.hpp"

namespace frontlab {

struct TooCoarse : FrontlabError {
    using FrontlabError::FrontlabError;
};
struct DisconnectedDomain : FrontlabError {
    using FrontlabError::FrontlabError;
};

class Grid {
  public:
    DomainSpec domain;
    double dx = 0;
    int nx = 0, ny = 0;
    long i0 = 0, j0 = 0;  // global face offsets: cell (i,j) centers at ((i0+i)+1/2) dx

    std::vector<uint8_t> inside;  // nx*ny, row-major in i (x contiguous)
    int axis_row = -1;            // local j of the first row above x2 = 0
    long n_inside = 0;
    std::vector<std::string> warnings;

    // Maximal runs of cells whose four neighbors are all inside: the pure
    // five-point stencil applies and the update loop vectorizes.
    struct Segment {
        int j, i_begin, i_end;
    };
    std::vector<Segment> fast;
    std::vector<int32_t> slow;  // flat ids of inside cells not covered by fast

    size_t id(int i, int j) const { return static_cast<size_t>(j) * nx + i; }
    double xc(int i) const { return (i0 + i + 0.5) * dx; }
    double yc(int j) const { return (j0 + j + 0.5) * dx; }
    double x1_min() const { return i0 * dx; }
    double x1_max() const { return (i0 + nx) * dx; }
    bool is_inside(int i, int j) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && inside[id(i, j)];
    }

    std::vector<double> make_field(double fill = 0.0) const {
        return std::vector<double>(static_cast<size_t>(nx) * ny, fill);
    }
};

inline Grid make_grid(const DomainSpec& d, double dx) {
    if (!(dx > 0)) throw FrontlabError("grid: dx must be positive");
    Grid g;
    g.domain = d;
    g.dx = dx;

    g.i0 = std::lround(d.x1_min / dx);
    long i1 = std::lround(d.x1_max / dx);
    if (i1 <= g.i0) throw FrontlabError("grid: truncation window shorter than dx");
    g.nx = static_cast<int>(i1 - g.i0);

    double bot_min = 0, top_max = 0;
    for (int i = 0; i < g.nx; ++i) {
        double x = (g.i0 + i + 0.5) * dx;
        bot_min = std::min(bot_min, d.hbot(x));
        top_max = std::max(top_max, d.htop(x));
    }
    g.j0 = static_cast<long>(std::floor(bot_min / dx - 0.5)) + 1;
    long j1 = static_cast<long>(std::ceil(top_max / dx + 0.5)) - 1;
    g.ny = static_cast<int>(j1 - g.j0);
    g.axis_row = static_cast<int>(-g.j0);

    g.inside.assign(static_cast<size_t>(g.nx) * g.ny, 0);
    for (int i = 0; i < g.nx; ++i) {
        double x = g.xc(i);
        double lo = d.hbot(x), hi = d.htop(x);
        for (int j = 0; j < g.ny; ++j) {
            double y = g.yc(j);
            if (y > lo && y < hi) g.inside[g.id(i, j)] = 1;
        }
    }

    int narrowest = g.ny;
    for (int i = 0; i < g.nx; ++i) {
        int count = 0;
        for (int j = 0; j < g.ny; ++j) count += g.inside[g.id(i, j)];
        if (count == 0)
            throw TooCoarse("grid: no cell centers inside the domain at x1 = " +
                            std::to_string(g.xc(i)) + "; refine dx");
        narrowest = std::min(narrowest, count);
    }
    if (narrowest < 8)
        g.warnings.push_back("narrowest passage resolved by only " + std::to_string(narrowest) +
                             " cells across; results may be resolution-limited");

    // Every inside cell must be face-connected to the axis row.
    std::vector<uint8_t> seen(g.inside.size(), 0);
    std::queue<std::pair<int, int>> bfs;
    for (int i = 0; i < g.nx; ++i)
        if (g.axis_row >= 0 && g.axis_row < g.ny && g.inside[g.id(i, g.axis_row)]) {
            seen[g.id(i, g.axis_row)] = 1;
            bfs.emplace(i, g.axis_row);
        }
    while (!bfs.empty()) {
        auto [i, j] = bfs.front();
        bfs.pop();
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (g.is_inside(ii, jj) && !seen[g.id(ii, jj)]) {
                seen[g.id(ii, jj)] = 1;
                bfs.emplace(ii, jj);
            }
        }
    }
    for (size_t k = 0; k < g.inside.size(); ++k)
        if (g.inside[k] && !seen[k])
            throw DisconnectedDomain(
                "grid: the inside region splits into disconnected components at this "
                "resolution; refine dx or adjust the domain");

    for (int j = 0; j < g.ny; ++j) {
        int run = -1;
        for (int i = 0; i < g.nx; ++i) {
            bool fast_cell = g.inside[g.id(i, j)] && g.is_inside(i - 1, j) &&
                             g.is_inside(i + 1, j) && g.is_inside(i, j - 1) &&
                             g.is_inside(i, j + 1);
            if (fast_cell && run < 0) run = i;
            if (!fast_cell && run >= 0) {
                g.fast.push_back({j, run, i});
                run = -1;
            }
            if (g.inside[g.id(i, j)]) {
                ++g.n_inside;
                if (!fast_cell) g.slow.push_back(static_cast<int32_t>(g.id(i, j)));
            }
        }
        if (run >= 0) g.fast.push_back({j, run, g.nx});
    }
    return g;
}

// Five-point Laplacian with zero flux through closed faces.
inline void laplacian(const Grid& g, const std::vector<double>& u, std::vector<double>& out) {
    double inv = 1.0 / (g.dx * g.dx);
    out.assign(u.size(), 0.0);
    for (const auto& s : g.fast) {
        const double* row = u.data() + g.id(0, s.j);
        double* o = out.data() + g.id(0, s.j);
        for (int i = s.i_begin; i < s.i_end; ++i)
            o[i] = (row[i - 1] + row[i + 1] + row[i - g.nx] + row[i + g.nx] - 4.0 * row[i]) * inv;
    }
    for (int32_t f : g.slow) {
        int i = static_cast<int>(f % g.nx), j = static_cast<int>(f / g.nx);
        double c = u[f], acc = 0;
        if (g.is_inside(i - 1, j)) acc += u[f - 1] - c;
        if (g.is_inside(i + 1, j)) acc += u[f + 1] - c;
        if (g.is_inside(i, j - 1)) acc += u[f - g.nx] - c;
        if (g.is_inside(i, j + 1)) acc += u[f + g.nx] - c;
        out[f] = acc * inv;
    }
}

}  // namespace frontlab
