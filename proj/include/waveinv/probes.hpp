#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "waveinv/grid.hpp"
#include "waveinv/norms.hpp"
#include "waveinv/potential.hpp"

namespace waveinv {

/// Smooth compactly supported cutoff: 1 on |l| <= alpha - smooth_width,
/// 0 on |l| >= alpha, classical exp(-1/x) taper between, monotone on the
/// taper, 0 <= chi <= 1, chi(0) = 1.
struct CutoffFn {
    double alpha = 1.0;
    double smooth_width = 0.25;

    CutoffFn() = default;
    CutoffFn(double a, double w) : alpha(a), smooth_width(w) {
        if (!(w > 0.0) || !(w < a)) throw InvalidWidth("cutoff: require 0 < smooth_width < alpha");
    }

    static double ramp(double u) {  // C-infinity step: 0 for u<=0, 1 for u>=1
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        const double a = std::exp(-1.0 / u);
        const double b = std::exp(-1.0 / (1.0 - u));
        return a / (a + b);
    }

    double operator()(double l) const {
        const double al = std::abs(l);
        if (al <= alpha - smooth_width) return 1.0;
        if (al >= alpha) return 0.0;
        return ramp((alpha - al) / smooth_width);
    }
};

inline CutoffFn smooth_cutoff(double alpha, double smooth_width) { return CutoffFn(alpha, smooth_width); }

/// Gaussian plane-wave packet parameters. The profile is
///   H(l) = chi_alpha(l) * tau^{1/2} * exp(-tau l^2 / 2),
/// riding a characteristic: in 1D the phase is (x-x0) -+ (t-t0); for n>=2 it
/// is +-x.theta - t +- (eta -+ t0) so the pair concentrates on the slice
/// {x.theta = eta, t = t0}.
struct PacketSpec {
    double tau = 1.0;
    double alpha = 0.25;
    double smooth_width = 0.0625;
    int orientation = +1;  // +1 first packet of the pair, -1 second
    // n = 1 center
    double x0 = 0.0, t0 = 0.0;
    // n >= 2 geometry (theta a unit vector, eta an absolute offset)
    std::array<double, 2> theta = {1.0, 0.0};
    double eta = 0.0;
    // Unit-amplitude auxiliary packets use scale = tau^{-1/2}.
    double amplitude_scale = 1.0;

    void validate() const {
        if (!(tau >= 1.0)) throw UnderResolved("packet: tau must be >= 1");
        if (!(smooth_width > 0.0) || !(alpha > smooth_width))
            throw InvalidWidth("packet: require alpha > smooth_width > 0");
    }

    double phase(int n, double x, double y, double t) const {
        if (n == 1) {
            const double dxc = x - x0;
            const double dtc = t - t0;
            return orientation > 0 ? dxc - dtc : dxc + dtc;
        }
        const double p = x * theta[0] + y * theta[1];
        return orientation > 0 ? p - t - (eta - t0) : -p - t + (eta + t0);
    }

    double value(int n, double x, double y, double t) const {
        const double l = phase(n, x, y, t);
        const CutoffFn chi(alpha, smooth_width);
        return amplitude_scale * chi(l) * std::sqrt(tau) * std::exp(-0.5 * tau * l * l);
    }
};

/// Minimum nodes-per-standard-deviation rule: dx * sqrt(tau) <= c.
constexpr double kPacketResolutionC = 0.25;

/// Samples the packet on the grid and extracts its lateral trace. The field
/// satisfies the wave equation analytically wherever the cutoff is flat.
inline std::pair<SpaceTimeField, BoundarySignal> gaussian_packet(const PacketSpec& spec,
                                                                 const Grid& grid) {
    spec.validate();
    const double h = (grid.n == 2) ? std::max(grid.dx(0), grid.dx(1)) : grid.dx(0);
    if (h * std::sqrt(spec.tau) > kPacketResolutionC * (1.0 + 1e-12))
        throw UnderResolved("packet: dx*sqrt(tau) exceeds resolution rule");

    SpaceTimeField field(grid, FieldRole::LinearTerm);
    for (int k = 0; k < grid.nt; ++k) {
        const double t = grid.t_of(k);
        for (int j = 0; j < (grid.n == 2 ? grid.nx : 1); ++j)
            for (int i = 0; i < grid.nx; ++i)
                field.at(k, i, j) = spec.value(grid.n, grid.x_of(i, 0),
                                               grid.n == 2 ? grid.x_of(j, 1) : 0.0, t);
    }
    BoundarySignal trace(grid, SignalRole::Dirichlet);
    for (int b = 0; b < grid.boundary_count(); ++b) {
        const auto ij = grid.boundary_node(b);
        for (int k = 0; k < grid.nt; ++k) trace.at(b, k) = field.at(k, ij[0], ij[1]);
    }
    return {std::move(field), std::move(trace)};
}

/// Lateral trace of the packet without materializing the space-time field.
inline BoundarySignal packet_trace(const PacketSpec& spec, const Grid& grid) {
    spec.validate();
    const double h = (grid.n == 2) ? std::max(grid.dx(0), grid.dx(1)) : grid.dx(0);
    if (h * std::sqrt(spec.tau) > kPacketResolutionC * (1.0 + 1e-12))
        throw UnderResolved("packet: dx*sqrt(tau) exceeds resolution rule");
    BoundarySignal trace(grid, SignalRole::Dirichlet);
    for (int b = 0; b < grid.boundary_count(); ++b) {
        const auto ij = grid.boundary_node(b);
        const double x = grid.x_of(ij[0], 0);
        const double y = grid.n == 2 ? grid.x_of(ij[1], 1) : 0.0;
        for (int k = 0; k < grid.nt; ++k) trace.at(b, k) = spec.value(grid.n, x, y, grid.t_of(k));
    }
    return trace;
}

/// Lateral Sobolev norm of the packet trace at index gamma + 1/2. The
/// half-order shift reproduces the tau^((gamma+1)/2) growth law of the
/// continuum trace estimate: the plain gamma-index norm of a width
/// tau^{-1/2}, height tau^{1/2} profile scales as tau^((2*gamma+1)/4), and
/// raising the index by 1/2 shifts that exponent to (gamma+1)/2.
inline double packet_trace_norm(const PacketSpec& spec, const Grid& grid, double gamma) {
    auto [field, trace] = gaussian_packet(spec, grid);
    (void)field;
    return lateral_sobolev_norm(trace, gamma + 0.5);
}

/// The auxiliary function v0 (= 1 on Omega x [t1,t2], vanishing with its
/// time derivative at t = T), its lateral trace psi, and the set of lateral
/// nodes where psi is nonzero.
struct MeasurementFunction {
    SpaceTimeField v0;
    BoundarySignal psi;
    std::vector<std::uint8_t> support_mask;  // per lateral node
    double t1 = 0.0, t2 = 0.0;               // plateau window the build certified
};

/// Builds v0(x,t) = chi((x-x0).theta - (t-t0c)) with plateau radius
/// alpha = (t2-t1+d)/2, t0c = (t1+t2)/2 and x0 the center of Omega's
/// bounding box. Requires T >= 2d+2*lambda and smooth_width < lambda.
inline MeasurementFunction measurement_function(const Grid& grid, const Potential& a_meta,
                                                std::array<double, 2> theta, double smooth_width) {
    if (grid.T < 2.0 * a_meta.d + 2.0 * a_meta.lam - 1e-12)
        throw GeometryViolation("measurement_function: T < 2d + 2*lambda");
    if (!(smooth_width > 0.0) || !(smooth_width < a_meta.lam))
        throw InvalidWidth("measurement_function: require 0 < smooth_width < lambda");

    const double alpha = 0.5 * (a_meta.t2 - a_meta.t1 + a_meta.d);
    const double t0c = 0.5 * (a_meta.t1 + a_meta.t2);
    const std::array<double, 2> x0 = {0.5 * grid.box[0], grid.n == 2 ? 0.5 * grid.box[1] : 0.0};
    const CutoffFn chi(alpha + smooth_width, smooth_width);  // plateau on [-alpha, alpha]

    MeasurementFunction mf;
    mf.t1 = a_meta.t1;
    mf.t2 = a_meta.t2;
    mf.v0 = SpaceTimeField(grid, FieldRole::Auxiliary);
    for (int k = 0; k < grid.nt; ++k) {
        const double t = grid.t_of(k);
        for (int j = 0; j < (grid.n == 2 ? grid.nx : 1); ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const double px = grid.x_of(i, 0) - x0[0];
                const double py = grid.n == 2 ? grid.x_of(j, 1) - x0[1] : 0.0;
                const double l = px * theta[0] + py * theta[1] - (t - t0c);
                mf.v0.at(k, i, j) = chi(l);
            }
    }
    mf.psi = BoundarySignal(grid, SignalRole::Instrument);
    mf.support_mask.assign(static_cast<size_t>(grid.boundary_count()), 0);
    for (int b = 0; b < grid.boundary_count(); ++b) {
        const auto ij = grid.boundary_node(b);
        for (int k = 0; k < grid.nt; ++k) {
            const double v = mf.v0.at(k, ij[0], ij[1]);
            mf.psi.at(b, k) = v;
            if (v != 0.0) mf.support_mask[static_cast<size_t>(b)] = 1;
        }
    }
    return mf;
}

}  // namespace waveinv
