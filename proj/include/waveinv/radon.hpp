#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "waveinv/fft.hpp"
#include "waveinv/grid.hpp"
#include "waveinv/potential.hpp"

namespace waveinv {

/// Uniform 2D spatial field with explicit origin, used for time slices,
/// phantoms and reconstructions.
struct SpatialField2D {
    int nx = 0, ny = 0;
    double ox = 0.0, oy = 0.0;  // coordinates of sample (0,0)
    double dx = 0.0, dy = 0.0;
    std::vector<double> v;  // row-major, v[j*nx + i]

    double at(int i, int j) const { return v[static_cast<size_t>(j) * nx + i]; }
    double& at(int i, int j) { return v[static_cast<size_t>(j) * nx + i]; }
    double x_of(int i) const { return ox + i * dx; }
    double y_of(int j) const { return oy + j * dy; }
    std::array<double, 2> bbox_center() const {
        return {ox + 0.5 * dx * (nx - 1), oy + 0.5 * dy * (ny - 1)};
    }

    // Bilinear interpolation, zero outside the sampled box.
    double sample(double x, double y) const {
        const double fx = (x - ox) / dx, fy = (y - oy) / dy;
        if (fx < 0.0 || fy < 0.0 || fx > nx - 1 || fy > ny - 1) return 0.0;
        int i = static_cast<int>(fx), j = static_cast<int>(fy);
        if (i >= nx - 1) i = nx - 2;
        if (j >= ny - 1) j = ny - 2;
        const double ax = fx - i, ay = fy - j;
        return (1 - ax) * (1 - ay) * at(i, j) + ax * (1 - ay) * at(i + 1, j) +
               (1 - ax) * ay * at(i, j + 1) + ax * ay * at(i + 1, j + 1);
    }

    double l2_norm() const {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s * dx * dy);
    }
};

/// Extracts the spatial slice of a space-time field (2D grids only).
inline SpatialField2D spatial_slice(const SpaceTimeField& u, int time_level) {
    if (u.grid.n != 2) throw DimensionUnsupported("spatial_slice: spatial dimension must be 2");
    SpatialField2D s;
    s.nx = s.ny = u.grid.nx;
    s.ox = s.oy = 0.0;
    s.dx = u.grid.dx(0);
    s.dy = u.grid.dx(1);
    s.v.assign(u.level(time_level), u.level(time_level) + u.grid.space_count());
    return s;
}

inline SpatialField2D potential_slice(const Potential& a, int time_level) {
    if (a.grid.n != 2) throw DimensionUnsupported("potential_slice: spatial dimension must be 2");
    SpatialField2D s;
    s.nx = s.ny = a.grid.nx;
    s.ox = s.oy = 0.0;
    s.dx = a.grid.dx(0);
    s.dy = a.grid.dx(1);
    s.v.assign(a.values.begin() + static_cast<long>(time_level) * a.grid.space_count(),
               a.values.begin() + static_cast<long>(time_level + 1) * a.grid.space_count());
    return s;
}

/// Line integrals R(G)(theta, eta) = int_{(x-c).theta = eta} G dx of one
/// spatial slice. Offsets eta are measured from the given center so the
/// sinogram of a field supported in B_M(c) vanishes for |eta| > M.
struct RadonData {
    double t0 = 0.0;                       // time slice the data belongs to
    std::array<double, 2> center = {0, 0};  // offset origin
    std::vector<double> thetas;            // angles in [0, pi)
    std::vector<double> etas;              // uniform centered offsets
    std::vector<double> values;            // [theta][eta]

    double at(size_t it, size_t ie) const { return values[it * etas.size() + ie]; }
    double& at(size_t it, size_t ie) { return values[it * etas.size() + ie]; }
};

inline RadonData partial_radon(const SpatialField2D& G, const std::vector<double>& thetas,
                               const std::vector<double>& etas,
                               std::array<double, 2> center = {std::nan(""), 0.0},
                               double step_factor = 0.5) {
    RadonData rd;
    rd.center = std::isnan(center[0]) ? G.bbox_center() : center;
    rd.thetas = thetas;
    rd.etas = etas;
    rd.values.assign(thetas.size() * etas.size(), 0.0);
    const double width = G.dx * (G.nx - 1), height = G.dy * (G.ny - 1);
    const double smax = 0.5 * std::hypot(width, height) + std::max(G.dx, G.dy);
    const double ds = step_factor * std::min(G.dx, G.dy);
    const int nsteps = static_cast<int>(std::ceil(smax / ds));
    for (size_t it = 0; it < thetas.size(); ++it) {
        const double c = std::cos(thetas[it]), s = std::sin(thetas[it]);
        for (size_t ie = 0; ie < etas.size(); ++ie) {
            const double bx = rd.center[0] + etas[ie] * c;
            const double by = rd.center[1] + etas[ie] * s;
            KahanSum acc;
            // symmetric sample points ensure the evenness convention
            // R(-theta,-eta) = R(theta,eta) holds exactly
            for (int q = -nsteps; q <= nsteps; ++q) {
                const double w = (std::abs(q) == nsteps) ? 0.5 : 1.0;
                acc.add(w * G.sample(bx - q * s * ds, by + q * c * ds));
            }
            rd.at(it, ie) = acc.value() * ds;
        }
    }
    return rd;
}

namespace detail {

/// Continuum-scaled plain Fourier transform of a sinogram row:
///   F(sigma_k) = sum_j R(eta_j) e^{-i sigma_k (eta_j - eta_0)} * d_eta,
/// with sigma_k the padded DFT frequencies. The returned phase is relative
/// to the first offset.
inline std::vector<std::complex<double>> row_fourier(const std::vector<double>& row, double deta,
                                                     size_t pad_factor = 4) {
    auto spec = real_dft_padded(row.data(), row.size(), pad_factor * row.size());
    for (auto& z : spec) z *= deta;
    return spec;
}

}  // namespace detail

/// Structural self-test of the projection geometry: compares the 1D Fourier
/// transform of R(G)(theta, .) with the 2D Fourier transform of G along the
/// ray sigma*theta, both with the plain e^{-i x.xi} convention (under which
/// the two sides agree with constant 1). Returns the maximum deviation
/// relative to the spectral peak over |sigma| <= sigma_cut.
inline double fourier_slice_check(const SpatialField2D& G, double theta, double sigma_cut = 200.0,
                                  std::array<double, 2> center = {std::nan(""), 0.0}) {
    const std::array<double, 2> c = std::isnan(center[0]) ? G.bbox_center() : center;
    const double width = G.dx * (G.nx - 1), height = G.dy * (G.ny - 1);
    const double M = 0.5 * std::hypot(width, height) + 2.0 * std::max(G.dx, G.dy);
    const double deta = 0.5 * std::min(G.dx, G.dy);
    std::vector<double> etas;
    for (double e = -M; e <= M + 1e-12; e += deta) etas.push_back(e);
    RadonData rd = partial_radon(G, {theta}, etas, c);

    std::vector<double> row(etas.size());
    for (size_t ie = 0; ie < etas.size(); ++ie) row[ie] = rd.at(0, ie);
    auto lhs = detail::row_fourier(row, deta);
    const size_t N = lhs.size();

    const double ct = std::cos(theta), st = std::sin(theta);
    double peak = 0.0, worst = 0.0;
    for (size_t k = 0; k < N; ++k) {
        const double sigma = dft_angular_frequency(k, N, deta);
        if (std::abs(sigma) > sigma_cut) continue;
        // fold in the eta_0 phase so lhs refers to centered offsets
        const std::complex<double> phase(std::cos(-sigma * etas[0]), std::sin(-sigma * etas[0]));
        const std::complex<double> l = lhs[k] * phase;
        // rhs: plain 2D transform of G about the same center, by direct sum
        KahanSum re, im;
        for (int j = 0; j < G.ny; ++j)
            for (int i = 0; i < G.nx; ++i) {
                const double g = G.at(i, j);
                if (g == 0.0) continue;
                const double ph = -sigma * ((G.x_of(i) - c[0]) * ct + (G.y_of(j) - c[1]) * st);
                re.add(g * std::cos(ph));
                im.add(g * std::sin(ph));
            }
        const std::complex<double> r(re.value() * G.dx * G.dy, im.value() * G.dx * G.dy);
        peak = std::max(peak, std::abs(r));
        worst = std::max(worst, std::abs(l - r));
    }
    return peak > 0.0 ? worst / peak : worst;
}

/// Discrete H^{-beta}(R^2) norm via the DFT multiplier (1+|xi|^2)^(-beta/2)
/// on the zero-padded field. The normalization matches the plain-transform
/// Fourier-side definition ||f||^2 = int (1+|xi|^2)^(-beta) |fhat|^2 dxi.
inline double neg_sobolev_norm(const SpatialField2D& f, double beta) {
    if (beta < 0.5) throw BetaTooSmall("neg_sobolev_norm: beta must be >= (n-1)/2 = 1/2");
    const size_t NX = next_pow2(2 * static_cast<size_t>(f.nx));
    const size_t NY = next_pow2(2 * static_cast<size_t>(f.ny));
    std::vector<std::complex<double>> plane(NX * NY, {0.0, 0.0});
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) plane[static_cast<size_t>(j) * NX + i] = f.at(i, j);
    // row FFTs then column FFTs
    std::vector<std::complex<double>> tmp(std::max(NX, NY));
    for (size_t j = 0; j < NY; ++j) {
        std::vector<std::complex<double>> row(plane.begin() + static_cast<long>(j * NX),
                                              plane.begin() + static_cast<long>((j + 1) * NX));
        fft_pow2(row, -1);
        std::copy(row.begin(), row.end(), plane.begin() + static_cast<long>(j * NX));
    }
    for (size_t i = 0; i < NX; ++i) {
        std::vector<std::complex<double>> col(NY);
        for (size_t j = 0; j < NY; ++j) col[j] = plane[j * NX + i];
        fft_pow2(col, -1);
        for (size_t j = 0; j < NY; ++j) plane[j * NX + i] = col[j];
    }
    const double dxi_x = 2.0 * 3.14159265358979323846 / (static_cast<double>(NX) * f.dx);
    const double dxi_y = 2.0 * 3.14159265358979323846 / (static_cast<double>(NY) * f.dy);
    KahanSum s;
    for (size_t j = 0; j < NY; ++j)
        for (size_t i = 0; i < NX; ++i) {
            const double xx = dft_angular_frequency(i, NX, f.dx);
            const double yy = dft_angular_frequency(j, NY, f.dy);
            const double mult = std::pow(1.0 + xx * xx + yy * yy, -beta);
            s.add(mult * std::norm(plane[j * NX + i] * (f.dx * f.dy)));
        }
    return std::sqrt(s.value() * dxi_x * dxi_y);
}

struct FbpOptions {
    int min_angles = 120;
    bool cosine_apodization = true;
    int out_nx = 0;  // 0: caller must fill the output geometry from a template
};

/// Filtered back-projection with a Ram-Lak filter and cosine apodization.
/// The output is reconstructed on the template's sample geometry;
/// values outside the sinogram's bounding box remain zero.
inline SpatialField2D invert_radon(const RadonData& rd, const SpatialField2D& out_template,
                                   const FbpOptions& opt = {}) {
    if (static_cast<int>(rd.thetas.size()) < opt.min_angles)
        throw InsufficientAngles("invert_radon: need at least " + std::to_string(opt.min_angles) +
                                 " angles, got " + std::to_string(rd.thetas.size()));
    if (rd.etas.size() < 2) throw ShapeMismatch("invert_radon: need an offset grid");
    const double deta = rd.etas[1] - rd.etas[0];
    const size_t nE = rd.etas.size();
    const size_t N = next_pow2(4 * nE);
    const double pi = 3.14159265358979323846;
    const double sigma_max = pi / deta;

    // Filter each row: q = IFFT( FFT(row) * |sigma| * apod ). The filtered
    // profile has slowly decaying tails outside the measured offsets, and the
    // back-projection needs them across the whole image, so the full padded
    // length is kept. The row sits at indices [0, nE); the left tail wraps to
    // the end of the circular buffer.
    std::vector<std::vector<double>> filtered(rd.thetas.size(), std::vector<double>(N, 0.0));
    for (size_t it = 0; it < rd.thetas.size(); ++it) {
        std::vector<std::complex<double>> buf(N, {0.0, 0.0});
        for (size_t ie = 0; ie < nE; ++ie) buf[ie] = rd.at(it, ie);
        fft_pow2(buf, -1);
        for (size_t k = 0; k < N; ++k) {
            const double sigma = dft_angular_frequency(k, N, deta);
            double mult = std::abs(sigma);
            if (opt.cosine_apodization) mult *= std::cos(0.5 * pi * sigma / sigma_max);
            buf[k] *= mult;
        }
        fft_pow2(buf, +1);
        for (size_t q = 0; q < N; ++q) filtered[it][q] = buf[q].real();
    }

    SpatialField2D out = out_template;
    std::fill(out.v.begin(), out.v.end(), 0.0);
    const double dtheta = pi / static_cast<double>(rd.thetas.size());
    const double guard = 0.45 * static_cast<double>(N) * deta;  // stay off the wrap seam
    for (size_t it = 0; it < rd.thetas.size(); ++it) {
        const double c = std::cos(rd.thetas[it]), s = std::sin(rd.thetas[it]);
        for (int j = 0; j < out.ny; ++j)
            for (int i = 0; i < out.nx; ++i) {
                const double eta = (out.x_of(i) - rd.center[0]) * c + (out.y_of(j) - rd.center[1]) * s;
                if (std::abs(eta - rd.etas[0]) > guard && std::abs(eta - rd.etas[nE - 1]) > guard)
                    continue;
                double fe = (eta - rd.etas[0]) / deta;
                if (fe < 0.0) fe += static_cast<double>(N);  // circular left tail
                const size_t ie = static_cast<size_t>(fe) % N;
                const double a = fe - std::floor(fe);
                out.at(i, j) += (1.0 - a) * filtered[it][ie] + a * filtered[it][(ie + 1) % N];
            }
    }
    const double scale = dtheta / (2.0 * pi);
    for (double& x : out.v) x *= scale;
    return out;
}

}  // namespace waveinv
