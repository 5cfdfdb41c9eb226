#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "waveinv/norms.hpp"
#include "waveinv/potential.hpp"
#include "waveinv/wave_solver.hpp"

namespace waveinv {

/// Diagnostics of the fixed-point iteration u_{k+1} = S(-a u_k^m) with
/// Dirichlet data held fixed.
struct PicardReport {
    int iterations = 0;
    std::vector<double> residual_history;  // discrete E^1 norms of iterate differences
    bool converged = false;
    double contraction_ratio = 0.0;  // largest ratio of successive residuals
};

struct PicardOptions {
    double tol_abs = -1.0;   // if > 0, absolute E^1 stopping tolerance
    double tol_rel = 1e-10;  // otherwise tol = tol_rel * ||f||_{H^1(Sigma)}
    int max_iter = 60;
};

namespace detail {

// Index list of the potential's support, so the nonlinear source is only
// rebuilt where a is nonzero.
inline std::vector<size_t> support_indices(const Potential& a) {
    std::vector<size_t> idx;
    for (size_t s = 0; s < a.values.size(); ++s)
        if (a.values[s] != 0.0) idx.push_back(s);
    return idx;
}

inline SourceSupport support_box(const Potential& a) {
    SourceSupport b;
    b.k0 = a.grid.nt;
    b.i0 = a.grid.nx;
    b.j0 = a.grid.nx;
    b.k1 = b.i1 = b.j1 = -1;
    const long sc = a.grid.space_count();
    for (int k = 0; k < a.grid.nt; ++k)
        for (long s = 0; s < sc; ++s)
            if (a.values[static_cast<size_t>(k) * sc + s] != 0.0) {
                const int i = static_cast<int>(s % a.grid.nx);
                const int j = a.grid.n == 2 ? static_cast<int>(s / a.grid.nx) : 0;
                b.k0 = std::min(b.k0, k);
                b.k1 = std::max(b.k1, k);
                b.i0 = std::min(b.i0, i);
                b.i1 = std::max(b.i1, i);
                b.j0 = std::min(b.j0, j);
                b.j1 = std::max(b.j1, j);
            }
    return b;
}

inline double int_pow(double v, int m) {
    double p = v;
    for (int q = 1; q < m; ++q) p *= v;
    return p;
}

}  // namespace detail

/// Banach fixed-point solve of  box(u) + a u^m = 0,  u = f on Sigma, zero
/// initial data. Iterates whole-space-time linear solves with source
/// -a u_k^m from u_0 = 0 until the E^1 norm of the iterate difference drops
/// below tolerance. Residuals that stop decreasing signal that f lies
/// outside the contraction regime (NonContraction).
inline std::pair<SpaceTimeField, PicardReport> solve_semilinear(const Grid& grid, const Potential& a,
                                                                const BoundarySignal& dirichlet,
                                                                const PicardOptions& opt = {}) {
    dirichlet.require_shape(grid, "solve_semilinear");
    if (!a.grid.same_shape(grid)) throw ShapeMismatch("solve_semilinear: potential grid");
    if (a.m < 2) throw ShapeMismatch("solve_semilinear: m must be >= 2");

    const double tol =
        opt.tol_abs > 0.0 ? opt.tol_abs : opt.tol_rel * std::max(lateral_sobolev_norm(dirichlet, 1.0), 1e-300);

    const auto supp = detail::support_indices(a);
    const SourceSupport box = detail::support_box(a);
    SpaceTimeField u(grid, FieldRole::Solution);
    SpaceTimeField src(grid, FieldRole::Source);

    PicardReport rep;
    for (int it = 1; it <= opt.max_iter; ++it) {
        for (size_t s : supp) src.values[s] = -a.values[s] * detail::int_pow(u.values[s], a.m);
        SpaceTimeField next =
            solve_linear_wave(grid, supp.empty() ? nullptr : &src, dirichlet, {}, &box);
        const double res = energy_norm_e1_diff(next, u);
        rep.iterations = it;
        rep.residual_history.push_back(res);
        u.values.swap(next.values);

        if (res <= tol) {
            rep.converged = true;
            break;
        }
        if (it >= 2) {
            const double prev = rep.residual_history[static_cast<size_t>(it) - 2];
            if (res >= prev)
                throw NonContraction("solve_semilinear: residual " + std::to_string(res) +
                                     " did not decrease (data too large for the contraction regime)");
        }
    }
    if (!rep.converged)
        throw NonContraction("solve_semilinear: no convergence within max_iter=" +
                             std::to_string(opt.max_iter));
    for (size_t i = 1; i < rep.residual_history.size(); ++i) {
        const double prev = rep.residual_history[i - 1];
        if (prev > 0.0) rep.contraction_ratio = std::max(rep.contraction_ratio, rep.residual_history[i] / prev);
    }
    return {std::move(u), std::move(rep)};
}

/// Simulated Dirichlet-to-Neumann map of the semilinear problem.
inline BoundarySignal dn_map(const Grid& grid, const Potential& a, const BoundarySignal& f,
                             const PicardOptions& opt = {}) {
    auto [u, rep] = solve_semilinear(grid, a, f, opt);
    (void)rep;
    return normal_derivative(u);
}

/// One-dimensional instrument measurement <psi, Lambda(f)>_{L^2(Sigma)}.
inline double instrument_measurement(const BoundarySignal& psi, const BoundarySignal& neumann) {
    return lateral_inner_product(psi, neumann);
}

/// Terms of the amplitude expansion of the solution with data
/// eps_1 f_1 + ... + eps_m f_m: the free-wave terms v_j, the top multilinear
/// term w_top (source -a v_1...v_m, zero data), and the remainder
///   R = u - sum_j eps_j v_j - sum_k multinomial(k) eps^k w_k.
struct ExpansionTerms {
    std::vector<SpaceTimeField> v;
    SpaceTimeField w_top;
    SpaceTimeField remainder;
    SpaceTimeField u;
};

namespace detail {

inline void multi_indices(int m, int slots, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (slots == 1) {
        cur.push_back(m);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= m; ++k) {
        cur.push_back(k);
        multi_indices(m - k, slots - 1, cur, out);
        cur.pop_back();
    }
}

inline double multinomial_coeff(int m, const std::vector<int>& k) {
    double c = 1.0;
    int left = m;
    for (int kj : k) {
        for (int q = 1; q <= kj; ++q) c *= static_cast<double>(left - kj + q) / q;
        left -= kj;
    }
    return c;
}

}  // namespace detail

inline ExpansionTerms expansion_terms(const Grid& grid, const Potential& a,
                                      const std::vector<BoundarySignal>& packets,
                                      const std::vector<double>& eps, const PicardOptions& opt = {}) {
    const int m = a.m;
    if (static_cast<int>(packets.size()) != m || static_cast<int>(eps.size()) != m)
        throw SizeMismatch("expansion_terms: need m packets and m amplitudes");

    ExpansionTerms out;
    out.v.reserve(static_cast<size_t>(m));
    BoundarySignal mix(grid, SignalRole::Dirichlet);
    for (int j = 0; j < m; ++j) {
        packets[static_cast<size_t>(j)].require_shape(grid, "expansion_terms packet");
        out.v.push_back(solve_linear_wave(grid, nullptr, packets[static_cast<size_t>(j)]));
        out.v.back().role = FieldRole::LinearTerm;
        for (size_t i = 0; i < mix.values.size(); ++i)
            mix.values[i] += eps[static_cast<size_t>(j)] * packets[static_cast<size_t>(j)].values[i];
    }
    out.u = solve_semilinear(grid, a, mix, opt).first;

    out.remainder = out.u;
    out.remainder.role = FieldRole::Remainder;
    for (int j = 0; j < m; ++j)
        for (size_t i = 0; i < out.remainder.values.size(); ++i)
            out.remainder.values[i] -= eps[static_cast<size_t>(j)] * out.v[static_cast<size_t>(j)].values[i];

    std::vector<std::vector<int>> tuples;
    std::vector<int> cur;
    detail::multi_indices(m, m, cur, tuples);
    const auto supp = detail::support_indices(a);
    const SourceSupport box = detail::support_box(a);
    SpaceTimeField prod(grid, FieldRole::Source);
    BoundarySignal zero_data(grid, SignalRole::Dirichlet);
    for (const auto& k : tuples) {
        std::fill(prod.values.begin(), prod.values.end(), 0.0);
        for (size_t s : supp) {
            double p = 1.0;
            for (int j = 0; j < m; ++j)
                for (int q = 0; q < k[static_cast<size_t>(j)]; ++q)
                    p *= out.v[static_cast<size_t>(j)].values[s];
            prod.values[s] = -a.values[s] * p;
        }
        SpaceTimeField wk = solve_linear_wave(grid, &prod, zero_data, {}, &box);
        double coef = detail::multinomial_coeff(m, k);
        for (int j = 0; j < m; ++j)
            for (int q = 0; q < k[static_cast<size_t>(j)]; ++q) coef *= eps[static_cast<size_t>(j)];
        for (size_t i = 0; i < out.remainder.values.size(); ++i)
            out.remainder.values[i] -= coef * wk.values[i];
        bool top = true;
        for (int kj : k) top = top && (kj == 1);
        if (top) {
            out.w_top = std::move(wk);
            out.w_top.role = FieldRole::BilinearTerm;
        }
    }
    return out;
}

}  // namespace waveinv
