#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "waveinv/errors.hpp"

namespace waveinv {

/// Space-time discretization of Omega x [0,T].
///
/// Omega is an interval (n=1) or an axis-aligned rectangle (n=2) with `nx`
/// nodes per spatial axis; there are `nt` time levels including t=0 and t=T.
struct Grid {
    int n = 1;                            // spatial dimension, 1 or 2
    std::array<double, 2> box = {1.0, 1.0};  // spatial extents of Omega
    double T = 1.0;                       // final time
    int nx = 3;                           // nodes per spatial axis
    int nt = 3;                           // time levels
    double cfl_safety = 0.9;              // in (0, 1]

    double dx(int axis = 0) const { return box[static_cast<size_t>(axis)] / (nx - 1); }
    double dt() const { return T / (nt - 1); }

    long space_count() const {
        long c = nx;
        if (n == 2) c *= nx;
        return c;
    }
    long sample_count() const { return static_cast<long>(nt) * space_count(); }

    // Explicit-scheme stability limit: dt <= cfl_safety / sqrt(sum 1/dx_i^2).
    // For equal spacings this is cfl_safety * dx / sqrt(n).
    double dt_limit() const {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += 1.0 / (dx(a) * dx(a));
        return cfl_safety / std::sqrt(s);
    }

    long space_index(int i, int j = 0) const {
        return (n == 1) ? i : static_cast<long>(j) * nx + i;
    }
    double x_of(int i, int axis = 0) const { return i * dx(axis); }
    double t_of(int k) const { return k * dt(); }

    // Number of lateral-boundary nodes: the two endpoints in 1D, the
    // rectangle perimeter in 2D.
    int boundary_count() const { return (n == 1) ? 2 : 4 * (nx - 1); }

    // Perimeter enumeration (2D): bottom row left-to-right, right column
    // upward, top row right-to-left, left column downward; 1D: {x=0, x=L}.
    std::array<int, 2> boundary_node(int b) const {
        if (n == 1) return {b == 0 ? 0 : nx - 1, 0};
        const int m = nx - 1;
        if (b < m) return {b, 0};
        if (b < 2 * m) return {m, b - m};
        if (b < 3 * m) return {m - (b - 2 * m), m};
        return {0, m - (b - 3 * m)};
    }

    // Quadrature weight of a lateral node: counting measure in 1D, arc
    // length along the perimeter polyline in 2D.
    double boundary_weight(int b) const {
        if (n == 1) return 1.0;
        const int m = nx - 1;
        const double hx = dx(0), hy = dx(1);
        const bool corner = (b % m) == 0;
        if (corner) return 0.5 * (hx + hy);
        if (b < m || (b >= 2 * m && b < 3 * m)) return hx;  // bottom/top
        return hy;                                          // left/right
    }

    bool same_shape(const Grid& o) const {
        return n == o.n && nx == o.nx && nt == o.nt && box == o.box && T == o.T;
    }

    void validate() const;
};

inline void Grid::validate() const {
    if (n != 1 && n != 2) throw DimensionUnsupported("grid: n must be 1 or 2, got " + std::to_string(n));
    if (nx < 3 || nt < 3) throw ShapeMismatch("grid: nx and nt must be >= 3");
    if (!(T > 0) || !(box[0] > 0) || (n == 2 && !(box[1] > 0)))
        throw ShapeMismatch("grid: nonpositive extent");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw CflViolation("grid: cfl_safety must lie in (0,1]");
    if (dt() > dt_limit() * (1.0 + 1e-12))
        throw CflViolation("grid: dt=" + std::to_string(dt()) + " exceeds stability limit " +
                           std::to_string(dt_limit()));
}

inline Grid make_grid(int n, std::array<double, 2> box, double T, int nx, int nt,
                      double cfl_safety = 0.9) {
    Grid g;
    g.n = n;
    g.box = box;
    g.T = T;
    g.nx = nx;
    g.nt = nt;
    g.cfl_safety = cfl_safety;
    g.validate();
    return g;
}

enum class FieldRole : std::uint8_t { Solution, Source, LinearTerm, BilinearTerm, Remainder, Auxiliary };
enum class SignalRole : std::uint8_t { Dirichlet, Neumann, Instrument, Noise };

/// Real samples at every (space node, time level); time-major storage.
struct SpaceTimeField {
    Grid grid;
    FieldRole role = FieldRole::Solution;
    std::vector<double> values;

    SpaceTimeField() = default;
    SpaceTimeField(const Grid& g, FieldRole r)
        : grid(g), role(r), values(static_cast<size_t>(g.sample_count()), 0.0) {}

    double& at(int k, int i, int j = 0) {
        return values[static_cast<size_t>(k) * grid.space_count() + grid.space_index(i, j)];
    }
    double at(int k, int i, int j = 0) const {
        return values[static_cast<size_t>(k) * grid.space_count() + grid.space_index(i, j)];
    }
    const double* level(int k) const { return values.data() + static_cast<size_t>(k) * grid.space_count(); }
    double* level(int k) { return values.data() + static_cast<size_t>(k) * grid.space_count(); }

    void require_shape(const Grid& g, const char* what) const {
        if (!grid.same_shape(g) || values.size() != static_cast<size_t>(g.sample_count()))
            throw ShapeMismatch(std::string("field/grid mismatch in ") + what);
    }
    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Real samples at every (lateral-boundary node, time level); node-major
/// storage so each node's time signal is contiguous.
struct BoundarySignal {
    Grid grid;
    SignalRole role = SignalRole::Dirichlet;
    std::vector<double> values;

    BoundarySignal() = default;
    BoundarySignal(const Grid& g, SignalRole r)
        : grid(g), role(r), values(static_cast<size_t>(g.boundary_count()) * g.nt, 0.0) {}

    double& at(int b, int k) { return values[static_cast<size_t>(b) * grid.nt + k]; }
    double at(int b, int k) const { return values[static_cast<size_t>(b) * grid.nt + k]; }
    const double* node(int b) const { return values.data() + static_cast<size_t>(b) * grid.nt; }
    double* node(int b) { return values.data() + static_cast<size_t>(b) * grid.nt; }

    void require_shape(const Grid& g, const char* what) const {
        if (!grid.same_shape(g) ||
            values.size() != static_cast<size_t>(g.boundary_count()) * static_cast<size_t>(g.nt))
            throw ShapeMismatch(std::string("boundary signal/grid mismatch in ") + what);
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

inline BoundarySignal operator+(const BoundarySignal& a, const BoundarySignal& b) {
    a.require_shape(b.grid, "signal sum");
    BoundarySignal r = a;
    for (size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
    return r;
}

inline BoundarySignal operator*(double c, const BoundarySignal& a) {
    BoundarySignal r = a;
    for (double& v : r.values) v *= c;
    return r;
}

}  // namespace waveinv
