#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "waveinv/fft.hpp"
#include "waveinv/grid.hpp"

namespace waveinv {

namespace detail {

inline double trapezoid_weight(int i, int count, double h) {
    return (i == 0 || i == count - 1) ? 0.5 * h : h;
}

// Second-order first derivative along one axis of a flat array with stride,
// centered in the interior, one-sided at the ends.
inline void differentiate(const double* in, double* out, int count, long stride, double h) {
    if (count < 3) throw OrderTooHigh("differentiate: need at least 3 samples");
    const double inv2h = 1.0 / (2.0 * h);
    out[0] = (-3.0 * in[0] + 4.0 * in[stride] - in[2 * stride]) * inv2h;
    for (int i = 1; i < count - 1; ++i)
        out[static_cast<long>(i) * stride] =
            (in[(i + 1) * stride] - in[(i - 1) * stride]) * inv2h;
    out[static_cast<long>(count - 1) * stride] =
        (3.0 * in[(count - 1) * stride] - 4.0 * in[(count - 2) * stride] + in[(count - 3) * stride]) * inv2h;
}

// d/dx^p of a spatial slice along the given axis, repeated first derivatives.
inline std::vector<double> axis_derivative(const Grid& g, const std::vector<double>& slice, int axis,
                                           int order) {
    std::vector<double> cur = slice, nxt(slice.size());
    const double h = g.dx(axis);
    for (int p = 0; p < order; ++p) {
        if (g.n == 1) {
            differentiate(cur.data(), nxt.data(), g.nx, 1, h);
        } else if (axis == 0) {
            for (int j = 0; j < g.nx; ++j)
                differentiate(cur.data() + static_cast<long>(j) * g.nx,
                              nxt.data() + static_cast<long>(j) * g.nx, g.nx, 1, h);
        } else {
            for (int i = 0; i < g.nx; ++i)
                differentiate(cur.data() + i, nxt.data() + i, g.nx, g.nx, h);
        }
        cur.swap(nxt);
    }
    return cur;
}

inline double spatial_l2_sq(const Grid& g, const std::vector<double>& slice) {
    KahanSum s;
    if (g.n == 1) {
        for (int i = 0; i < g.nx; ++i) {
            const double w = trapezoid_weight(i, g.nx, g.dx(0));
            s.add(w * slice[static_cast<size_t>(i)] * slice[static_cast<size_t>(i)]);
        }
    } else {
        for (int j = 0; j < g.nx; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double w = trapezoid_weight(i, g.nx, g.dx(0)) * trapezoid_weight(j, g.nx, g.dx(1));
                const double v = slice[static_cast<size_t>(j) * g.nx + i];
                s.add(w * v * v);
            }
    }
    return s.value();
}

// Discrete H^m(Omega) norm of a spatial slice: sum over all derivative
// multi-orders up to m of squared L^2 norms.
inline double spatial_sobolev_sq(const Grid& g, const std::vector<double>& slice, int m) {
    if (g.nx <= m + 1) throw OrderTooHigh("spatial Sobolev norm: grid too coarse for order");
    double total = 0.0;
    if (g.n == 1) {
        for (int p = 0; p <= m; ++p) total += spatial_l2_sq(g, axis_derivative(g, slice, 0, p));
    } else {
        for (int p = 0; p <= m; ++p)
            for (int q = 0; p + q <= m; ++q) {
                auto d = axis_derivative(g, slice, 0, p);
                d = axis_derivative(g, d, 1, q);
                total += spatial_l2_sq(g, d);
            }
    }
    return total;
}

// k-th time derivative of a field, repeated second-order first differences.
inline SpaceTimeField time_derivative(const SpaceTimeField& u, int k) {
    SpaceTimeField cur = u, nxt(u.grid, u.role);
    const long sc = u.grid.space_count();
    for (int p = 0; p < k; ++p) {
        for (long s = 0; s < sc; ++s)
            differentiate(cur.values.data() + s, nxt.values.data() + s, u.grid.nt, sc, u.grid.dt());
        cur.values.swap(nxt.values);
    }
    return cur;
}

}  // namespace detail

/// Discrete surrogate of the energy norm
///   ||u||_{E^s} = sup_t sum_{0<=k<=s} ||d_t^k u(.,t)||_{H^{s-k}(Omega)}.
inline double energy_norm(const SpaceTimeField& u, int s) {
    if (s < 0) throw OrderTooHigh("energy_norm: s must be >= 0");
    if (u.grid.nt <= s + 1 || u.grid.nx <= s + 1)
        throw OrderTooHigh("energy_norm: grid too coarse for requested order");
    std::vector<SpaceTimeField> dt_ders;
    dt_ders.reserve(static_cast<size_t>(s) + 1);
    dt_ders.push_back(u);
    for (int k = 1; k <= s; ++k) dt_ders.push_back(detail::time_derivative(u, k));

    const long sc = u.grid.space_count();
    std::vector<double> slice(static_cast<size_t>(sc));
    double sup = 0.0;
    for (int lvl = 0; lvl < u.grid.nt; ++lvl) {
        double level_sum = 0.0;
        for (int k = 0; k <= s; ++k) {
            const double* p = dt_ders[static_cast<size_t>(k)].level(lvl);
            std::copy(p, p + sc, slice.begin());
            level_sum += std::sqrt(detail::spatial_sobolev_sq(u.grid, slice, s - k));
        }
        sup = std::max(sup, level_sum);
    }
    return sup;
}

/// E^1 norm of the difference A - B in a single fused pass, without
/// materializing the difference field. Uses the same stencils and weights as
/// energy_norm(A-B, 1): trapezoidal L^2 in space, centered/one-sided
/// second-order first derivatives in x, y and t.
inline double energy_norm_e1_diff(const SpaceTimeField& A, const SpaceTimeField& B) {
    A.require_shape(B.grid, "energy_norm_e1_diff");
    const Grid& g = A.grid;
    if (g.nt <= 2 || g.nx <= 2) throw OrderTooHigh("energy_norm_e1_diff: grid too coarse");
    const long sc = g.space_count();
    const double dt = g.dt();
    const double i2dt = 1.0 / (2.0 * dt);
    auto d = [&](int k, long s) { return A.values[static_cast<size_t>(k) * sc + s] -
                                        B.values[static_cast<size_t>(k) * sc + s]; };
    double sup = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const int km = (k == 0) ? 0 : k - 1;
        const int kp = (k == g.nt - 1) ? g.nt - 1 : k + 1;
        double s00 = 0.0, sx = 0.0, sy = 0.0, st = 0.0;
        auto tder = [&](long s) {
            if (k == 0) return (-3.0 * d(0, s) + 4.0 * d(1, s) - d(2, s)) * i2dt;
            if (k == g.nt - 1)
                return (3.0 * d(k, s) - 4.0 * d(k - 1, s) + d(k - 2, s)) * i2dt;
            return (d(kp, s) - d(km, s)) * i2dt;
        };
        if (g.n == 1) {
            const double h = g.dx(0), i2h = 1.0 / (2.0 * h);
            for (int i = 0; i < g.nx; ++i) {
                const double w = detail::trapezoid_weight(i, g.nx, h);
                const double v = d(k, i);
                double ddx;
                if (i == 0)
                    ddx = (-3.0 * d(k, 0) + 4.0 * d(k, 1) - d(k, 2)) * i2h;
                else if (i == g.nx - 1)
                    ddx = (3.0 * d(k, i) - 4.0 * d(k, i - 1) + d(k, i - 2)) * i2h;
                else
                    ddx = (d(k, i + 1) - d(k, i - 1)) * i2h;
                const double vt = tder(i);
                s00 += w * v * v;
                sx += w * ddx * ddx;
                st += w * vt * vt;
            }
        } else {
            const double hx = g.dx(0), hy = g.dx(1);
            const double i2hx = 1.0 / (2.0 * hx), i2hy = 1.0 / (2.0 * hy);
            const int nx = g.nx;
            for (int j = 0; j < nx; ++j) {
                const double wj = detail::trapezoid_weight(j, nx, hy);
                const long row = static_cast<long>(j) * nx;
                for (int i = 0; i < nx; ++i) {
                    const double w = wj * detail::trapezoid_weight(i, nx, hx);
                    const long s = row + i;
                    const double v = d(k, s);
                    double ddx, ddy;
                    if (i == 0)
                        ddx = (-3.0 * d(k, s) + 4.0 * d(k, s + 1) - d(k, s + 2)) * i2hx;
                    else if (i == nx - 1)
                        ddx = (3.0 * d(k, s) - 4.0 * d(k, s - 1) + d(k, s - 2)) * i2hx;
                    else
                        ddx = (d(k, s + 1) - d(k, s - 1)) * i2hx;
                    if (j == 0)
                        ddy = (-3.0 * d(k, s) + 4.0 * d(k, s + nx) - d(k, s + 2 * nx)) * i2hy;
                    else if (j == nx - 1)
                        ddy = (3.0 * d(k, s) - 4.0 * d(k, s - nx) + d(k, s - 2 * nx)) * i2hy;
                    else
                        ddy = (d(k, s + nx) - d(k, s - nx)) * i2hy;
                    const double vt = tder(s);
                    s00 += w * v * v;
                    sx += w * ddx * ddx;
                    sy += w * ddy * ddy;
                    st += w * vt * vt;
                }
            }
        }
        const double level_sum = std::sqrt(s00 + sx + sy) + std::sqrt(st);
        sup = std::max(sup, level_sum);
    }
    return sup;
}

/// Discrete H^gamma norm along the lateral boundary: per-node time signals,
/// fractional order via the DFT multiplier (1+w^2)^(gamma/2) on the
/// zero-extended signal, summed over boundary nodes with their quadrature
/// weights. gamma = 0 reduces to the plain trapezoidal L^2(Sigma) norm so it
/// agrees with lateral_inner_product exactly.
inline double lateral_sobolev_norm(const BoundarySignal& g, double gamma) {
    if (gamma < 0) throw OrderTooHigh("lateral_sobolev_norm: gamma must be >= 0");
    const Grid& gr = g.grid;
    const int nb = gr.boundary_count();
    const double dt = gr.dt();
    KahanSum total;
    if (gamma == 0.0) {
        for (int b = 0; b < nb; ++b) {
            const double* x = g.node(b);
            KahanSum s;
            for (int k = 0; k < gr.nt; ++k)
                s.add(detail::trapezoid_weight(k, gr.nt, dt) * x[k] * x[k]);
            total.add(gr.boundary_weight(b) * s.value());
        }
        return std::sqrt(total.value());
    }
    const size_t N = next_pow2(2 * static_cast<size_t>(gr.nt));
    for (int b = 0; b < nb; ++b) {
        auto spec = real_dft_padded(g.node(b), static_cast<size_t>(gr.nt), N);
        KahanSum s;
        for (size_t k = 0; k < N; ++k) {
            const double w = dft_angular_frequency(k, N, dt);
            const double mult = std::pow(1.0 + w * w, gamma);
            s.add(mult * std::norm(spec[k]));
        }
        total.add(gr.boundary_weight(b) * s.value() * dt / static_cast<double>(N));
    }
    return std::sqrt(total.value());
}

/// Trapezoidal L^2(Sigma) pairing over all lateral nodes and time levels.
inline double lateral_inner_product(const BoundarySignal& g, const BoundarySignal& h) {
    g.require_shape(h.grid, "lateral_inner_product");
    const Grid& gr = g.grid;
    const double dt = gr.dt();
    KahanSum total;
    for (int b = 0; b < gr.boundary_count(); ++b) {
        const double* x = g.node(b);
        const double* y = h.node(b);
        KahanSum s;
        for (int k = 0; k < gr.nt; ++k) s.add(detail::trapezoid_weight(k, gr.nt, dt) * x[k] * y[k]);
        total.add(gr.boundary_weight(b) * s.value());
    }
    return total.value();
}

/// Trapezoidal integral of a field over Omega x [0,T].
inline double volume_integral(const SpaceTimeField& u) {
    const Grid& g = u.grid;
    const long sc = g.space_count();
    KahanSum total;
    for (int k = 0; k < g.nt; ++k) {
        const double wt = detail::trapezoid_weight(k, g.nt, g.dt());
        const double* lvl = u.level(k);
        if (g.n == 1) {
            for (int i = 0; i < g.nx; ++i)
                total.add(wt * detail::trapezoid_weight(i, g.nx, g.dx(0)) * lvl[i]);
        } else {
            for (long j = 0; j < g.nx; ++j)
                for (long i = 0; i < g.nx; ++i)
                    total.add(wt * detail::trapezoid_weight(static_cast<int>(i), g.nx, g.dx(0)) *
                              detail::trapezoid_weight(static_cast<int>(j), g.nx, g.dx(1)) *
                              lvl[j * g.nx + i]);
        }
        (void)sc;
    }
    return total.value();
}

}  // namespace waveinv
