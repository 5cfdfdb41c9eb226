#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "waveinv/fft.hpp"
#include "waveinv/grid.hpp"

namespace waveinv {

namespace detail {

// Compensated accumulation of scaled values in the linear spaces the
// amplitude stencil ranges over. The stencil divides by eps_1...eps_m, which
// amplifies round-off, so sums are carried with Neumaier compensation.
struct ScalarAccum {
    KahanSum s;
    void add_scaled(double c, double v) { s.add(c * v); }
    double finish(double scale) { return s.value() * scale; }
};

template <class FieldLike>
struct FieldAccum {
    std::vector<KahanSum> cells;
    FieldLike proto;
    bool init = false;
    void add_scaled(double c, const FieldLike& v) {
        if (!init) {
            proto = v;
            cells.assign(v.values.size(), KahanSum{});
            init = true;
        }
        if (v.values.size() != cells.size()) throw ShapeMismatch("mixed_difference: value shapes differ");
        for (size_t i = 0; i < cells.size(); ++i) cells[i].add(c * v.values[i]);
    }
    FieldLike finish(double scale) {
        for (size_t i = 0; i < cells.size(); ++i) proto.values[i] = cells[i].value() * scale;
        return proto;
    }
};

template <class V>
struct AccumFor;
template <>
struct AccumFor<double> {
    using type = ScalarAccum;
};
template <>
struct AccumFor<BoundarySignal> {
    using type = FieldAccum<BoundarySignal>;
};
template <>
struct AccumFor<SpaceTimeField> {
    using type = FieldAccum<SpaceTimeField>;
};

}  // namespace detail

/// The m-th mixed finite difference acting on amplitude-indexed evaluations:
/// the evaluator is sampled at all 2^m vertices (sigma_1 eps_1,...,sigma_m
/// eps_m), sigma in {0,1}^m, combined with signs (-1)^(|sigma|+m) and divided
/// by eps_1...eps_m. Exactly 2^m evaluator calls, fixed sigma order.
template <class V>
struct AmplitudeStencil {
    int m = 2;
    std::vector<double> eps;
    std::function<V(const std::vector<double>&)> evaluator;
};

template <class V>
V mixed_difference(const AmplitudeStencil<V>& st) {
    if (st.m < 1 || static_cast<int>(st.eps.size()) != st.m)
        throw SizeMismatch("mixed_difference: eps size must equal m");
    for (double e : st.eps)
        if (!(e > 0.0)) throw SizeMismatch("mixed_difference: eps must be strictly positive");

    typename detail::AccumFor<V>::type acc;
    std::vector<double> amps(static_cast<size_t>(st.m));
    for (unsigned sigma = 0; sigma < (1u << st.m); ++sigma) {
        int pop = 0;
        for (int j = 0; j < st.m; ++j) {
            const bool on = (sigma >> j) & 1u;
            amps[static_cast<size_t>(j)] = on ? st.eps[static_cast<size_t>(j)] : 0.0;
            pop += on ? 1 : 0;
        }
        const double sign = ((pop + st.m) % 2 == 0) ? 1.0 : -1.0;
        try {
            acc.add_scaled(sign, st.evaluator(amps));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            std::string bits;
            for (int j = 0; j < st.m; ++j) bits += ((sigma >> j) & 1u) ? '1' : '0';
            throw EvaluatorFailure("mixed_difference: evaluator failed at sigma=" + bits + ": " + e.what());
        }
    }
    double prod = 1.0;
    for (double e : st.eps) prod *= e;
    return acc.finish(1.0 / prod);
}

/// Direct sigma-enumeration of I(x) = sum_sigma (-1)^(m+|sigma|) (sigma.x)^m,
/// which equals m! x_1...x_m. Serves as the combinatorial oracle for the
/// mixed difference.
inline double multinomial_identity(int m, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m) throw SizeMismatch("multinomial_identity: |x| must equal m");
    KahanSum acc;
    for (unsigned sigma = 0; sigma < (1u << m); ++sigma) {
        KahanSum dot;
        int pop = 0;
        for (int j = 0; j < m; ++j)
            if ((sigma >> j) & 1u) {
                dot.add(x[static_cast<size_t>(j)]);
                ++pop;
            }
        double p = 1.0;
        const double base = dot.value();
        for (int q = 0; q < m; ++q) p *= base;
        acc.add(((pop + m) % 2 == 0) ? p : -p);
    }
    return acc.value();
}

}  // namespace waveinv
