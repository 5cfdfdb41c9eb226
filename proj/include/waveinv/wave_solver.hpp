#pragma once

#include <cmath>
#include <vector>

#include "waveinv/grid.hpp"
#include "waveinv/norms.hpp"

namespace waveinv {

/// Spatial initial data (position, velocity); empty vectors mean zero.
struct InitialData {
    std::vector<double> pos;
    std::vector<double> vel;
};

/// Index bounding box of the nonzero source samples; lets the update loop
/// skip streaming the (large, mostly zero) source field outside it.
struct SourceSupport {
    int k0 = 0, k1 = -1;  // time levels, inclusive
    int i0 = 0, i1 = -1;
    int j0 = 0, j1 = -1;
    bool empty() const { return k1 < k0 || i1 < i0 || j1 < j0; }
};

namespace detail {

inline void apply_laplacian(const Grid& g, const double* u, double* out) {
    if (g.n == 1) {
        const double ih2 = 1.0 / (g.dx(0) * g.dx(0));
        out[0] = 0.0;
        out[g.nx - 1] = 0.0;
        for (int i = 1; i < g.nx - 1; ++i) out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * ih2;
    } else {
        const double ihx2 = 1.0 / (g.dx(0) * g.dx(0));
        const double ihy2 = 1.0 / (g.dx(1) * g.dx(1));
        for (int j = 0; j < g.nx; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const long c = static_cast<long>(j) * g.nx + i;
                if (i == 0 || j == 0 || i == g.nx - 1 || j == g.nx - 1) {
                    out[c] = 0.0;
                    continue;
                }
                out[c] = (u[c - 1] - 2.0 * u[c] + u[c + 1]) * ihx2 +
                         (u[c - g.nx] - 2.0 * u[c] + u[c + g.nx]) * ihy2;
            }
    }
}

inline void impose_dirichlet(const Grid& g, double* lvl, const BoundarySignal& f, int k) {
    for (int b = 0; b < g.boundary_count(); ++b) {
        const auto ij = g.boundary_node(b);
        lvl[g.space_index(ij[0], ij[1])] = f.at(b, k);
    }
}

}  // namespace detail

/// Explicit leapfrog solve of  u_tt - Lap(u) = F  on Omega x [0,T] with
/// Dirichlet data on the lateral boundary and initial data (pos, vel).
/// Second order in space and time; the first step is the Taylor start
///   u^1 = pos + dt*vel + dt^2/2 * (Lap(pos) + F^0).
inline SpaceTimeField solve_linear_wave(const Grid& grid, const SpaceTimeField* source,
                                        const BoundarySignal& dirichlet, const InitialData& init = {},
                                        const SourceSupport* support = nullptr) {
    grid.validate();
    dirichlet.require_shape(grid, "solve_linear_wave dirichlet");
    if (source) source->require_shape(grid, "solve_linear_wave source");
    const long sc = grid.space_count();
    if (!init.pos.empty() && init.pos.size() != static_cast<size_t>(sc))
        throw ShapeMismatch("solve_linear_wave: init position size");
    if (!init.vel.empty() && init.vel.size() != static_cast<size_t>(sc))
        throw ShapeMismatch("solve_linear_wave: init velocity size");

    SpaceTimeField u(grid, FieldRole::Solution);
    const double dt = grid.dt();
    const double dt2 = dt * dt;

    // Level 0 from the initial position, boundary values imposed exactly.
    double* u0 = u.level(0);
    if (!init.pos.empty())
        for (long s = 0; s < sc; ++s) u0[s] = init.pos[static_cast<size_t>(s)];
    detail::impose_dirichlet(grid, u0, dirichlet, 0);

    // Compatibility at t=0: Dirichlet trace must match the initial position.
    {
        double scale = dirichlet.max_abs();
        for (long s = 0; s < sc && !init.pos.empty(); ++s)
            scale = std::max(scale, std::abs(init.pos[static_cast<size_t>(s)]));
        const double tol = 1e-9 * std::max(1.0, scale);
        for (int b = 0; b < grid.boundary_count(); ++b) {
            const auto ij = grid.boundary_node(b);
            const double want = init.pos.empty() ? 0.0 : init.pos[static_cast<size_t>(grid.space_index(ij[0], ij[1]))];
            if (std::abs(dirichlet.at(b, 0) - want) > tol)
                throw CompatibilityViolation("solve_linear_wave: Dirichlet data incompatible with initial data at t=0");
        }
    }

    if (grid.nt >= 2) {
        std::vector<double> lap(static_cast<size_t>(sc));
        detail::apply_laplacian(grid, u0, lap.data());
        double* u1 = u.level(1);
        for (long s = 0; s < sc; ++s) {
            const double p = init.pos.empty() ? u0[s] : init.pos[static_cast<size_t>(s)];
            const double v = init.vel.empty() ? 0.0 : init.vel[static_cast<size_t>(s)];
            const double f0 = source ? source->level(0)[s] : 0.0;
            u1[s] = p + dt * v + 0.5 * dt2 * (lap[static_cast<size_t>(s)] + f0);
        }
        detail::impose_dirichlet(grid, u1, dirichlet, 1);
    }

    SourceSupport box;
    if (source) {
        box = support ? *support
                      : SourceSupport{0, grid.nt - 1, 0, grid.nx - 1, 0,
                                      grid.n == 2 ? grid.nx - 1 : 0};
    }
    if (grid.n == 1) {
        const double cx = dt2 / (grid.dx(0) * grid.dx(0));
        for (int k = 1; k + 1 < grid.nt; ++k) {
            const double* um = u.level(k - 1);
            const double* uc = u.level(k);
            double* up = u.level(k + 1);
            for (int i = 1; i < grid.nx - 1; ++i)
                up[i] = 2.0 * uc[i] - um[i] + cx * (uc[i - 1] - 2.0 * uc[i] + uc[i + 1]);
            if (source && k >= box.k0 && k <= box.k1) {
                const double* fk = source->level(k);
                const int ia = std::max(1, box.i0), ib = std::min(grid.nx - 2, box.i1);
                for (int i = ia; i <= ib; ++i) up[i] += dt2 * fk[i];
            }
            detail::impose_dirichlet(grid, up, dirichlet, k + 1);
        }
    } else {
        const double cx = dt2 / (grid.dx(0) * grid.dx(0));
        const double cy = dt2 / (grid.dx(1) * grid.dx(1));
        const int nx = grid.nx;
        for (int k = 1; k + 1 < grid.nt; ++k) {
            const double* um = u.level(k - 1);
            const double* uc = u.level(k);
            double* up = u.level(k + 1);
            for (int j = 1; j < nx - 1; ++j) {
                const long row = static_cast<long>(j) * nx;
                for (int i = 1; i < nx - 1; ++i) {
                    const long c = row + i;
                    up[c] = 2.0 * uc[c] - um[c] + cx * (uc[c - 1] - 2.0 * uc[c] + uc[c + 1]) +
                            cy * (uc[c - nx] - 2.0 * uc[c] + uc[c + nx]);
                }
            }
            if (source && k >= box.k0 && k <= box.k1) {
                const double* fk = source->level(k);
                const int ja = std::max(1, box.j0), jb = std::min(nx - 2, box.j1);
                const int ia = std::max(1, box.i0), ib = std::min(nx - 2, box.i1);
                for (int j = ja; j <= jb; ++j) {
                    const long row = static_cast<long>(j) * nx;
                    for (int i = ia; i <= ib; ++i) up[row + i] += dt2 * fk[row + i];
                }
            }
            detail::impose_dirichlet(grid, up, dirichlet, k + 1);
        }
    }

    if (!u.all_finite()) throw NonFiniteValue("solve_linear_wave: update produced NaN/Inf");
    return u;
}

inline SpaceTimeField solve_linear_wave(const Grid& grid, const SpaceTimeField& source,
                                        const BoundarySignal& dirichlet, const InitialData& init = {}) {
    return solve_linear_wave(grid, &source, dirichlet, init);
}

/// Outward normal derivative on every lateral node and time level, one-sided
/// second-order stencil (exact on quadratics). At the 2D corners the two
/// face stencils are averaged.
inline BoundarySignal normal_derivative(const SpaceTimeField& u) {
    const Grid& g = u.grid;
    u.require_shape(g, "normal_derivative");
    BoundarySignal out(g, SignalRole::Neumann);

    auto one_sided = [](double v0, double v1, double v2, double h) {
        // derivative at the boundary node pointing inward; caller flips sign
        return (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * h);
    };

    for (int k = 0; k < g.nt; ++k) {
        const double* lvl = u.level(k);
        if (g.n == 1) {
            const double h = g.dx(0);
            // x = 0: outward normal is -x, so d_nu u = -d_x u
            out.at(0, k) = -one_sided(lvl[0], lvl[1], lvl[2], h);
            out.at(1, k) = -one_sided(lvl[g.nx - 1], lvl[g.nx - 2], lvl[g.nx - 3], h);
        } else {
            const int m = g.nx - 1;
            for (int b = 0; b < g.boundary_count(); ++b) {
                const auto ij = g.boundary_node(b);
                const int i = ij[0], j = ij[1];
                double acc = 0.0;
                int faces = 0;
                auto val = [&](int ii, int jj) { return lvl[g.space_index(ii, jj)]; };
                if (i == 0) {
                    acc += -one_sided(val(0, j), val(1, j), val(2, j), g.dx(0));
                    ++faces;
                }
                if (i == m) {
                    acc += -one_sided(val(m, j), val(m - 1, j), val(m - 2, j), g.dx(0));
                    ++faces;
                }
                if (j == 0) {
                    acc += -one_sided(val(i, 0), val(i, 1), val(i, 2), g.dx(1));
                    ++faces;
                }
                if (j == m) {
                    acc += -one_sided(val(i, m), val(i, m - 1), val(i, m - 2), g.dx(1));
                    ++faces;
                }
                out.at(b, k) = acc / faces;
            }
        }
    }
    return out;
}

}  // namespace waveinv
