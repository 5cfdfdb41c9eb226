#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "waveinv/grid.hpp"

namespace waveinv {

/// Jung-ball diameter surrogate of Omega: twice the radius of the smallest
/// enclosing ball (exact for intervals and rectangles).
inline double jung_diameter(const Grid& g) {
    if (g.n == 1) return g.box[0];
    return std::sqrt(g.box[0] * g.box[0] + g.box[1] * g.box[1]);
}

/// Admissible coefficient a(x,t): compactly supported in a strict sub-box of
/// Omega x [t1,t2] with t1 = d + lambda, t2 = T - d - lambda, and |a| <= L.
struct Potential {
    Grid grid;
    std::vector<double> values;  // time-major samples, same layout as SpaceTimeField
    int m = 2;                   // nonlinearity power, >= 2
    double L = 1.0;              // C^{s+1} bound certificate
    double t1 = 0.0, t2 = 0.0;
    double lam = 0.0;  // margin lambda > 0
    double d = 0.0;    // Jung diameter of Omega

    double at(int k, int i, int j = 0) const {
        return values[static_cast<size_t>(k) * grid.space_count() + grid.space_index(i, j)];
    }
    double& at(int k, int i, int j = 0) {
        return values[static_cast<size_t>(k) * grid.space_count() + grid.space_index(i, j)];
    }
    double max_abs() const {
        double v = 0.0;
        for (double x : values) v = std::max(v, std::abs(x));
        return v;
    }
    bool is_zero() const {
        for (double x : values)
            if (x != 0.0) return false;
        return true;
    }

    void validate() const {
        if (m < 2) throw ShapeMismatch("potential: m must be >= 2");
        if (values.size() != static_cast<size_t>(grid.sample_count()))
            throw ShapeMismatch("potential: sample count");
        if (!(lam > 0)) throw GeometryViolation("potential: lambda must be positive");
        if (is_zero()) return;  // empty support: the admissibility window is vacuous
        if (grid.T < 2.0 * d + 2.0 * lam - 1e-12)
            throw GeometryViolation("potential: T < 2d + 2*lambda");
        if (std::abs(t1 - (d + lam)) > 1e-12 || std::abs(t2 - (grid.T - d - lam)) > 1e-12)
            throw GeometryViolation("potential: t1/t2 inconsistent with d and lambda");
        if (max_abs() > L * (1.0 + 1e-12)) throw GeometryViolation("potential: |a| exceeds bound L");
        // Support must vanish on the spatial boundary and outside (t1, t2).
        for (int k = 0; k < grid.nt; ++k) {
            const double t = grid.t_of(k);
            const bool t_outside = (t <= t1 + 1e-14) || (t >= t2 - 1e-14);
            for (int j = 0; j < (grid.n == 2 ? grid.nx : 1); ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    const double v = at(k, i, j);
                    if (v == 0.0) continue;
                    if (t_outside)
                        throw GeometryViolation("potential: support leaves Omega x (t1,t2) in time");
                    const bool on_bdry = i == 0 || i == grid.nx - 1 ||
                                         (grid.n == 2 && (j == 0 || j == grid.nx - 1));
                    if (on_bdry) throw GeometryViolation("potential: support touches the spatial boundary");
                }
        }
    }
};

/// Standard C-infinity bump profile: b(0)=1, supported on |r|<1.
inline double bump_profile(double r) {
    const double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
}

inline Potential make_potential(const Grid& grid, int m, double lam,
                                const std::function<double(double, double, double)>& f,
                                double L = 0.0) {
    Potential a;
    a.grid = grid;
    a.m = m;
    a.lam = lam;
    a.d = jung_diameter(grid);
    a.t1 = a.d + lam;
    a.t2 = grid.T - a.d - lam;
    a.values.assign(static_cast<size_t>(grid.sample_count()), 0.0);
    for (int k = 0; k < grid.nt; ++k)
        for (int j = 0; j < (grid.n == 2 ? grid.nx : 1); ++j)
            for (int i = 0; i < grid.nx; ++i)
                a.at(k, i, j) = f(grid.x_of(i, 0), grid.n == 2 ? grid.x_of(j, 1) : 0.0, grid.t_of(k));
    a.L = (L > 0.0) ? L : std::max(a.max_abs(), 1e-300);
    a.validate();
    return a;
}

inline Potential zero_potential(const Grid& grid, int m, double lam) {
    return make_potential(grid, m, lam, [](double, double, double) { return 0.0; }, 1.0);
}

/// Smooth separable bump A * b(|x-c|/wx) * b((t-tc)/wt).
inline Potential bump_potential(const Grid& grid, int m, double lam, double amplitude, double cx,
                                double cy, double ct, double wx, double wt) {
    auto f = [&, amplitude, cx, cy, ct, wx, wt](double x, double y, double t) {
        double rx2 = (x - cx) * (x - cx);
        if (grid.n == 2) rx2 += (y - cy) * (y - cy);
        return amplitude * bump_profile(std::sqrt(rx2) / wx) * bump_profile((t - ct) / wt);
    };
    return make_potential(grid, m, lam, f);
}

/// Lipschitz cone A * max(0, 1 - rho/w) with rho the space-time distance to
/// the apex; its gradient is discontinuous at the apex, so pointwise
/// smoothing errors of Gaussian averaging decay at the slowest C^1 rate.
inline Potential cone_potential(const Grid& grid, int m, double lam, double amplitude, double cx,
                                double cy, double ct, double w) {
    auto f = [&, amplitude, cx, cy, ct, w](double x, double y, double t) {
        double r2 = (x - cx) * (x - cx) + (t - ct) * (t - ct);
        if (grid.n == 2) r2 += (y - cy) * (y - cy);
        const double rho = std::sqrt(r2);
        return rho >= w ? 0.0 : amplitude * (1.0 - rho / w);
    };
    return make_potential(grid, m, lam, f);
}

}  // namespace waveinv
