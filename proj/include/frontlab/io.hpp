#pragma once

// Artifact writers. Reproducibility notes: every float goes through fmt12 (12
// significant digits), rows follow grid/index order, so identical configs give
// byte-identical files.

#include <fstream>
#include <string>
#include <vector>

#include "evolve.hpp"
#include "grid.hpp"
#include "numerics.hpp"

namespace frontlab {

constexpr double kBlank = -1.0;  // marks outside cells in exported fields

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // no platform newline translation
    if (!out) throw FrontlabError("cannot open for writing: " + path);
    return out;
}

// Legacy VTK structured points; cell-centered data exported as point data at
// the cell centers, outside cells blanked.
inline void write_vtk(const std::string& path, const Grid& g, const std::vector<double>& u,
                      const std::string& name = "u") {
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\n";
    out << name << "\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << g.nx << " " << g.ny << " 1\n";
    out << "ORIGIN " << fmt12(g.xc(0)) << " " << fmt12(g.yc(0)) << " 0\n";
    out << "SPACING " << fmt12(g.dx) << " " << fmt12(g.dx) << " 1\n";
    out << "POINT_DATA " << static_cast<size_t>(g.nx) * g.ny << "\n";
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            size_t id = g.id(i, j);
            out << fmt12(g.inside[id] ? u[id] : kBlank) << "\n";
        }
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    auto out = open_out(path);
    for (size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << fmt12(row[k]);
        out << "\n";
    }
}

// The axis-row slice (x1, u) of a field.
inline void write_axis_csv(const std::string& path, const Grid& g,
                           const std::vector<double>& u) {
    std::vector<std::vector<double>> rows;
    int j = g.axis_row;
    for (int i = 0; i < g.nx; ++i)
        if (j >= 0 && j < g.ny && g.inside[g.id(i, j)])
            rows.push_back({g.xc(i), u[g.id(i, j)]});
    write_csv(path, {"x1", "u"}, rows);
}

inline void write_trace_csv(const std::string& path, const std::vector<RunSample>& trace) {
    std::vector<std::vector<double>> rows;
    rows.reserve(trace.size());
    for (const auto& s : trace)
        rows.push_back({s.t, s.front, s.residual, s.umin, s.umax, s.axis_min, s.right_max});
    write_csv(path, {"t", "front", "residual", "umin", "umax", "axis_min", "right_max"}, rows);
}

}  // namespace frontlab
