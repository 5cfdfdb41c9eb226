#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "waveinv/radon.hpp"

using namespace waveinv;

namespace {

constexpr double kPi = 3.14159265358979323846;

SpatialField2D unit_square_field(int n) {
    SpatialField2D f;
    f.nx = f.ny = n;
    f.ox = f.oy = 0.0;
    f.dx = f.dy = 1.0 / (n - 1);
    f.v.assign(static_cast<size_t>(n) * n, 0.0);
    return f;
}

SpatialField2D gaussian_phantom(int n, double cx, double cy, double s) {
    SpatialField2D f = unit_square_field(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double dx = f.x_of(i) - cx, dy = f.y_of(j) - cy;
            f.at(i, j) = std::exp(-(dx * dx + dy * dy) / (s * s));
        }
    return f;
}

std::vector<double> uniform_etas(double M, double step) {
    std::vector<double> etas;
    const int half = static_cast<int>(std::floor(M / step));
    for (int q = -half; q <= half; ++q) etas.push_back(q * step);
    return etas;
}

std::vector<double> uniform_angles(int count) {
    std::vector<double> th(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) th[static_cast<size_t>(i)] = kPi * i / count;
    return th;
}

}  // namespace

TEST_CASE("partial radon: zero field, gaussian profile, disk chords") {
    SUBCASE("zero field gives a zero sinogram") {
        SpatialField2D z = unit_square_field(65);
        RadonData rd = partial_radon(z, uniform_angles(12), uniform_etas(0.6, 0.05));
        for (double v : rd.values) CHECK(v == 0.0);
    }
    SUBCASE("isotropic gaussian: R = sqrt(pi) s exp(-(eta - c.theta)^2/s^2)") {
        const double s = 0.18;
        SpatialField2D f = gaussian_phantom(257, 0.55, 0.45, s);
        const auto angles = std::vector<double>{0.0, 0.4, kPi / 2, 2.2};
        RadonData rd = partial_radon(f, angles, uniform_etas(0.5, 0.02));
        for (size_t it = 0; it < angles.size(); ++it) {
            const double ct = std::cos(angles[it]), st = std::sin(angles[it]);
            const double coff = (0.55 - rd.center[0]) * ct + (0.45 - rd.center[1]) * st;
            for (size_t ie = 0; ie < rd.etas.size(); ++ie) {
                const double want =
                    std::sqrt(kPi) * s * std::exp(-std::pow(rd.etas[ie] - coff, 2) / (s * s));
                CHECK(rd.at(it, ie) == doctest::Approx(want).epsilon(0.02).scale(0.3));
                // independent quadrature oracle along the same line
                const double bx = rd.center[0] + rd.etas[ie] * ct;
                const double by = rd.center[1] + rd.etas[ie] * st;
                const double oracle = oracles::quad_trapezoid(
                    [&](double q) {
                        const double x = bx - q * st, y = by + q * ct;
                        const double ddx = x - 0.55, ddy = y - 0.45;
                        return std::exp(-(ddx * ddx + ddy * ddy) / (s * s));
                    },
                    -0.9, 0.9, 3000);
                CHECK(rd.at(it, ie) == doctest::Approx(oracle).epsilon(0.01).scale(0.05));
            }
        }
    }
    SUBCASE("disk indicator: chord length 2 sqrt(rho^2 - eta^2)") {
        const double rho = 0.3;
        SpatialField2D f = unit_square_field(513);
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i) {
                const double dx = f.x_of(i) - 0.5, dy = f.y_of(j) - 0.5;
                f.at(i, j) = (dx * dx + dy * dy <= rho * rho) ? 1.0 : 0.0;
            }
        RadonData rd = partial_radon(f, {0.3, 1.1}, uniform_etas(0.45, 0.03));
        for (size_t it = 0; it < rd.thetas.size(); ++it)
            for (size_t ie = 0; ie < rd.etas.size(); ++ie) {
                const double eta = rd.etas[ie];
                const double want =
                    std::abs(eta) <= rho ? 2.0 * std::sqrt(rho * rho - eta * eta) : 0.0;
                // the bilinear sampler smears the jump over ~dx, so allow an
                // absolute tolerance at that scale near the rim
                CHECK(rd.at(it, ie) == doctest::Approx(want).epsilon(0.02).scale(1.0));
            }
    }
}

TEST_CASE("radon invariants: mass, evenness, support") {
    SpatialField2D f = gaussian_phantom(129, 0.52, 0.47, 0.12);
    const double deta = 0.01;
    RadonData rd = partial_radon(f, uniform_angles(8), uniform_etas(0.72, deta));

    SUBCASE("mass conservation across angles") {
        double mass = 0.0;
        for (double v : f.v) mass += v;
        mass *= f.dx * f.dy;  // rectangle rule; the integrand vanishes at the box edge
        for (size_t it = 0; it < rd.thetas.size(); ++it) {
            double line_mass = 0.0;
            for (size_t ie = 0; ie < rd.etas.size(); ++ie) line_mass += rd.at(it, ie) * deta;
            CHECK(line_mass == doctest::Approx(mass).epsilon(0.005));
        }
    }
    SUBCASE("evenness under (theta, eta) -> (theta+pi, -eta)") {
        for (double theta : {0.35, 1.2}) {
            RadonData plus = partial_radon(f, {theta}, uniform_etas(0.5, 0.02));
            RadonData minus = partial_radon(f, {theta + kPi}, uniform_etas(0.5, 0.02));
            const size_t nE = plus.etas.size();
            for (size_t ie = 0; ie < nE; ++ie)
                CHECK(plus.at(0, ie) ==
                      doctest::Approx(minus.at(0, nE - 1 - ie)).epsilon(1e-12).scale(1e-12));
        }
    }
    SUBCASE("sinogram of a compactly supported bump vanishes for |eta| > M") {
        SpatialField2D b = unit_square_field(129);
        for (int j = 0; j < b.ny; ++j)
            for (int i = 0; i < b.nx; ++i)
                b.at(i, j) = bump_profile(std::hypot(b.x_of(i) - 0.5, b.y_of(j) - 0.5) / 0.35);
        RadonData rb = partial_radon(b, uniform_angles(8), uniform_etas(0.72, deta));
        for (size_t it = 0; it < rb.thetas.size(); ++it)
            for (size_t ie = 0; ie < rb.etas.size(); ++ie)
                if (std::abs(rb.etas[ie]) > 0.36) CHECK(rb.at(it, ie) == 0.0);
    }
}

TEST_CASE("spatial slices require a 2D grid") {
    Grid g1 = make_grid(1, {1.0, 1.0}, 1.0, 11, 21, 0.9);
    SpaceTimeField u(g1, FieldRole::Solution);
    CHECK_THROWS_AS(spatial_slice(u, 0), DimensionUnsupported);
    Potential a = zero_potential(g1, 2, 0.05);
    CHECK_THROWS_AS(potential_slice(a, 0), DimensionUnsupported);
}

TEST_CASE("fourier slice identity") {
    SUBCASE("zero phantom") {
        SpatialField2D z = unit_square_field(65);
        CHECK(fourier_slice_check(z, 0.7) == 0.0);
    }
    SUBCASE("gaussian phantom on 256^2 within 1e-3 relative") {
        SpatialField2D f = gaussian_phantom(256, 0.5, 0.5, 0.11);
        for (double theta : {0.0, 0.9, kPi / 2}) CHECK(fourier_slice_check(f, theta, 120.0) < 1e-3);
    }
    SUBCASE("deviation is invariant under phantom shifts") {
        SpatialField2D f = gaussian_phantom(256, 0.5, 0.5, 0.11);
        SpatialField2D g = gaussian_phantom(256, 0.57, 0.44, 0.11);
        const double df = fourier_slice_check(f, 0.9, 120.0);
        const double dg = fourier_slice_check(g, 0.9, 120.0);
        CHECK(std::abs(df - dg) < 5e-4);
    }
}

TEST_CASE("negative Sobolev norm") {
    SUBCASE("zero and homogeneity") {
        SpatialField2D z = unit_square_field(64);
        CHECK(neg_sobolev_norm(z, 0.5) == 0.0);
        SpatialField2D f = gaussian_phantom(64, 0.5, 0.5, 0.2);
        SpatialField2D g = f;
        for (double& v : g.v) v *= -3.7;
        CHECK(neg_sobolev_norm(g, 0.5) ==
              doctest::Approx(3.7 * neg_sobolev_norm(f, 0.5)).epsilon(1e-12));
    }
    SUBCASE("beta below (n-1)/2 is rejected") {
        SpatialField2D f = gaussian_phantom(64, 0.5, 0.5, 0.2);
        CHECK_THROWS_AS(neg_sobolev_norm(f, 0.3), BetaTooSmall);
    }
    SUBCASE("H^{-beta} bound by the L2 sinogram bound on random phantoms") {
        // ||f||_{H^{-1/2}} <= sqrt(2 pi) C0 ||F||_{L2(S^1 x [-M,M])} with
        // F = 1 and C0 the pointwise sinogram bound.
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> pos(0.35, 0.65), wid(0.05, 0.12), amp(-2.0, 2.0);
        const double M = 0.45;
        for (int trial = 0; trial < 20; ++trial) {
            SpatialField2D f = unit_square_field(128);
            const int nb = 3 + static_cast<int>(rng() % 4);
            for (int b = 0; b < nb; ++b) {
                const double cx = pos(rng), cy = pos(rng), w = wid(rng), A = amp(rng);
                for (int j = 0; j < f.ny; ++j)
                    for (int i = 0; i < f.nx; ++i) {
                        const double r = std::hypot(f.x_of(i) - cx, f.y_of(j) - cy) / w;
                        f.at(i, j) += A * bump_profile(r);
                    }
            }
            RadonData rd = partial_radon(f, uniform_angles(48), uniform_etas(M, 0.01));
            double c0 = 0.0;
            for (double v : rd.values) c0 = std::max(c0, std::abs(v));
            const double rhs = std::sqrt(2.0 * kPi) * c0 * std::sqrt(2.0 * kPi * 2.0 * M);
            CHECK(neg_sobolev_norm(f, 0.5) <= rhs);
        }
    }
}

TEST_CASE("filtered back-projection") {
    SUBCASE("zero sinogram inverts to zero") {
        SpatialField2D tmpl = unit_square_field(65);
        RadonData rd;
        rd.center = {0.5, 0.5};
        rd.thetas = uniform_angles(128);
        rd.etas = uniform_etas(0.7, 0.01);
        rd.values.assign(rd.thetas.size() * rd.etas.size(), 0.0);
        SpatialField2D rec = invert_radon(rd, tmpl);
        for (double v : rec.v) CHECK(v == 0.0);
    }
    SUBCASE("angle floor is enforced") {
        SpatialField2D tmpl = unit_square_field(65);
        RadonData rd;
        rd.center = {0.5, 0.5};
        rd.thetas = uniform_angles(60);
        rd.etas = uniform_etas(0.7, 0.01);
        rd.values.assign(rd.thetas.size() * rd.etas.size(), 0.0);
        CHECK_THROWS_AS(invert_radon(rd, tmpl), InsufficientAngles);
        FbpOptions relaxed;
        relaxed.min_angles = 40;
        CHECK_NOTHROW(invert_radon(rd, tmpl, relaxed));
    }
    SUBCASE("gaussian round trip at 180 angles is within 5% relative L2") {
        SpatialField2D f = gaussian_phantom(256, 0.5, 0.5, 0.12);
        RadonData rd = partial_radon(f, uniform_angles(180), uniform_etas(0.75, f.dx / 2.0));
        SpatialField2D rec = invert_radon(rd, f);
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < f.v.size(); ++i) {
            num += (rec.v[i] - f.v[i]) * (rec.v[i] - f.v[i]);
            den += f.v[i] * f.v[i];
        }
        CHECK(std::sqrt(num / den) < 0.05);
    }
    SUBCASE("linearity to round-off") {
        SpatialField2D f = gaussian_phantom(96, 0.45, 0.55, 0.14);
        SpatialField2D g = gaussian_phantom(96, 0.6, 0.4, 0.1);
        auto angles = uniform_angles(128);
        auto etas = uniform_etas(0.7, 0.008);
        RadonData rf = partial_radon(f, angles, etas);
        RadonData rg = partial_radon(g, angles, etas, rf.center);
        RadonData mix = rf;
        for (size_t i = 0; i < mix.values.size(); ++i)
            mix.values[i] = 2.0 * rf.values[i] - 0.7 * rg.values[i];
        SpatialField2D a = invert_radon(rf, f);
        SpatialField2D b = invert_radon(rg, f);
        SpatialField2D c = invert_radon(mix, f);
        for (size_t i = 0; i < c.v.size(); ++i)
            CHECK(c.v[i] == doctest::Approx(2.0 * a.v[i] - 0.7 * b.v[i]).epsilon(1e-9).scale(1e-9));
    }
}
