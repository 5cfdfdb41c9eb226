#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "waveinv/probes.hpp"
#include "waveinv/semilinear.hpp"

using namespace waveinv;

namespace {

Grid default_grid() { return make_grid(1, {1.0, 1.0}, 3.2, 201, 801, 0.9); }

Potential default_bump(const Grid& g, int m = 2, double amp = 1.0) {
    return bump_potential(g, m, 0.16, amp, 0.5, 0.0, 1.6, 0.3, 0.3);
}

BoundarySignal packet_data(const Grid& g, double tau, double scale) {
    PacketSpec p;
    p.tau = tau;
    p.alpha = 0.4;
    p.smooth_width = 0.1;
    p.orientation = +1;
    p.x0 = 0.5;
    p.t0 = 1.6;
    auto [field, trace] = gaussian_packet(p, g);
    (void)field;
    return scale * trace;
}

}  // namespace

TEST_CASE("zero data yields the zero fixed point in one iteration") {
    Grid g = default_grid();
    Potential a = default_bump(g);
    BoundarySignal f(g, SignalRole::Dirichlet);
    auto [u, rep] = solve_semilinear(g, a, f, {.tol_abs = 1e-14});
    CHECK(rep.iterations == 1);
    CHECK(rep.converged);
    for (double v : u.values) CHECK(v == 0.0);
}

TEST_CASE("vanishing potential reduces to the linear solve bit-for-bit") {
    Grid g = default_grid();
    Potential a = zero_potential(g, 2, 0.16);
    BoundarySignal f = packet_data(g, 36.0, 0.1);
    auto [u, rep] = solve_semilinear(g, a, f);
    (void)rep;
    SpaceTimeField lin = solve_linear_wave(g, nullptr, f);
    REQUIRE(u.values.size() == lin.values.size());
    for (size_t i = 0; i < u.values.size(); ++i) CHECK(u.values[i] == lin.values[i]);
}

TEST_CASE("Picard residuals decrease geometrically; ratio shrinks with the data") {
    Grid g = default_grid();
    Potential a = default_bump(g);
    double prev_ratio = 1.0;
    for (double scale : {0.4, 0.1, 0.025}) {
        BoundarySignal f = packet_data(g, 36.0, scale);
        auto [u, rep] = solve_semilinear(g, a, f);
        (void)u;
        CHECK(rep.converged);
        for (size_t i = 1; i < rep.residual_history.size(); ++i)
            CHECK(rep.residual_history[i] < rep.residual_history[i - 1]);
        CHECK(rep.contraction_ratio < 0.5);
        CHECK(rep.contraction_ratio < prev_ratio * 1.05);
        prev_ratio = rep.contraction_ratio;
    }
}

TEST_CASE("small-data energy bound holds with a single constant across 10x amplitudes") {
    Grid g = default_grid();
    Potential a = default_bump(g);
    std::vector<double> ratios;
    for (double scale : {0.04, 0.08, 0.16, 0.4}) {
        BoundarySignal f = packet_data(g, 36.0, scale);
        auto [u, rep] = solve_semilinear(g, a, f);
        (void)rep;
        ratios.push_back(energy_norm(u, 1) / lateral_sobolev_norm(f, 1.0));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo < 1.25);
}

TEST_CASE("data outside the contraction regime raises NonContraction") {
    Grid g = make_grid(1, {1.0, 1.0}, 3.2, 101, 401, 0.9);
    Potential a = default_bump(g, 2, 30.0);
    BoundarySignal f = packet_data(g, 36.0, 8.0);
    CHECK_THROWS_AS(solve_semilinear(g, a, f, {.max_iter = 25}), NonContraction);
}

TEST_CASE("quadratic remainder: ||u - eps v1||/eps^2 constant across eps") {
    Grid g = default_grid();
    Potential a = default_bump(g);
    BoundarySignal f1 = packet_data(g, 36.0, 1.0);
    SpaceTimeField v1 = solve_linear_wave(g, nullptr, f1);
    std::vector<double> q;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        auto [u, rep] = solve_semilinear(g, a, eps * f1);
        (void)rep;
        SpaceTimeField diff = u;
        for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= eps * v1.values[i];
        q.push_back(energy_norm(diff, 1) / (eps * eps));
    }
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    CHECK(*hi / *lo < 1.2);
}

TEST_CASE("Picard fixed point agrees with the explicit-in-time stepper") {
    Grid g = make_grid(1, {1.0, 1.0}, 3.2, 401, 1601, 0.9);
    Potential a = bump_potential(g, 2, 0.16, 1.0, 0.5, 0.0, 1.6, 0.3, 0.3);
    BoundarySignal f = packet_data(g, 36.0, 0.2);
    auto [u, rep] = solve_semilinear(g, a, f);
    (void)rep;
    SpaceTimeField ux = oracles::explicit_semilinear_stepper(g, a, f);
    SpaceTimeField diff = u;
    for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= ux.values[i];
    const double rel = energy_norm(diff, 0) / energy_norm(u, 0);
    CHECK(rel < 2e-4);
}

TEST_CASE("dn_map basics") {
    Grid g = default_grid();
    SUBCASE("zero data") {
        Potential a = default_bump(g);
        BoundarySignal f(g, SignalRole::Dirichlet);
        BoundarySignal nm = dn_map(g, a, f);
        for (double v : nm.values) CHECK(v == 0.0);
    }
    SUBCASE("free traveling pulse matches d'Alembert Neumann trace") {
        const int nx = 401;
        Grid gg = make_grid(1, {1.0, 1.0}, 1.2, nx, nx * 12 / 10 + 1, 1.0);
        Potential a = zero_potential(gg, 2, 0.05);
        const double width = 0.4;
        BoundarySignal f(gg, SignalRole::Dirichlet);
        for (int k = 0; k < gg.nt; ++k) {
            f.at(0, k) = oracles::pulse(gg.t_of(k), width);
            f.at(1, k) = oracles::pulse(gg.t_of(k) - 1.0, width);
        }
        BoundarySignal nm = dn_map(gg, a, f);
        double err = 0.0;
        for (int k = 0; k < gg.nt; ++k) {
            const double t = gg.t_of(k);
            err = std::max(err, std::abs(nm.at(0, k) - oracles::pulse_derivative(t, width)));
            err = std::max(err, std::abs(nm.at(1, k) + oracles::pulse_derivative(t - 1.0, width)));
        }
        // one-sided stencil truncation ~ dx^2 |g'''| / 3 with |g'''| ~ 2e3 here
        CHECK(err < 2000.0 * gg.dx(0) * gg.dx(0));
    }
    SUBCASE("nonlinearity is detectable: ||Lambda(2f) - 2 Lambda(f)|| > 0") {
        Potential a = default_bump(g);
        BoundarySignal f = packet_data(g, 36.0, 0.1);
        BoundarySignal l1 = dn_map(g, a, f);
        BoundarySignal l2 = dn_map(g, a, 2.0 * f);
        BoundarySignal gap = l2;
        for (size_t i = 0; i < gap.values.size(); ++i) gap.values[i] -= 2.0 * l1.values[i];
        const double rel = lateral_sobolev_norm(gap, 0.0) / lateral_sobolev_norm(l1, 0.0);
        CHECK(rel > 1e-4);
    }
}

TEST_CASE("instrument measurement") {
    Grid g = default_grid();
    SUBCASE("zero factors give zero") {
        BoundarySignal z(g, SignalRole::Instrument), h(g, SignalRole::Neumann);
        for (double& v : h.values) v = 1.0;
        CHECK(instrument_measurement(z, h) == 0.0);
        CHECK(instrument_measurement(h, z) == 0.0);
    }
    SUBCASE("unit instrument against a traveling pulse") {
        // u = g(t-x) on (0,1) up to T=1.2: measurement = int (g'(t) - g'(t-1)) dt,
        // evaluated independently by quadrature of the analytic derivative.
        const int nx = 401;
        Grid gg = make_grid(1, {1.0, 1.0}, 1.2, nx, nx * 12 / 10 + 1, 1.0);
        Potential a = zero_potential(gg, 2, 0.05);
        const double width = 0.4;
        BoundarySignal f(gg, SignalRole::Dirichlet);
        for (int k = 0; k < gg.nt; ++k) {
            f.at(0, k) = oracles::pulse(gg.t_of(k), width);
            f.at(1, k) = oracles::pulse(gg.t_of(k) - 1.0, width);
        }
        BoundarySignal nm = dn_map(gg, a, f);
        BoundarySignal ones(gg, SignalRole::Instrument);
        for (double& v : ones.values) v = 1.0;
        const double got = instrument_measurement(ones, nm);
        const double want = oracles::quad_trapezoid(
            [&](double t) {
                return oracles::pulse_derivative(t, width) - oracles::pulse_derivative(t - 1.0, width);
            },
            0.0, gg.T, 20000);
        CHECK(got == doctest::Approx(want).epsilon(0.02));
    }
}

TEST_CASE("linear terms are homogeneous of degree one in their data") {
    Grid g = make_grid(1, {1.0, 1.0}, 3.2, 101, 401, 0.9);
    BoundarySignal f = packet_data(g, 25.0, 1.0);
    SpaceTimeField v1 = solve_linear_wave(g, nullptr, f);
    SpaceTimeField v2 = solve_linear_wave(g, nullptr, 3.5 * f);
    // scaling commutes with the solve up to round-off accumulated over the
    // time stepping (multiplication does not distribute exactly)
    double field_max = 0.0;
    for (double v : v1.values) field_max = std::max(field_max, std::abs(v));
    double worst = 0.0;
    for (size_t i = 0; i < v1.values.size(); ++i)
        worst = std::max(worst, std::abs(v2.values[i] - 3.5 * v1.values[i]));
    CHECK(worst <= 1e-10 * field_max);
}

TEST_CASE("expansion terms: zero potential wipes the nonlinear terms") {
    Grid g = make_grid(1, {1.0, 1.0}, 3.2, 101, 401, 0.9);
    Potential a = zero_potential(g, 2, 0.16);
    BoundarySignal f1 = packet_data(g, 25.0, 1.0);
    BoundarySignal f2 = packet_data(g, 25.0, 0.7);
    auto terms = expansion_terms(g, a, {f1, f2}, {0.01, 0.01});
    for (double v : terms.w_top.values) CHECK(v == 0.0);
    for (double v : terms.remainder.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("remainder scales like eps^(2m-1), m=2 quick check") {
    Grid g = make_grid(1, {1.0, 1.0}, 3.2, 201, 801, 0.9);
    Potential a = default_bump(g);
    PacketSpec p1, p2;
    p1.tau = p2.tau = 25.0;
    p1.alpha = p2.alpha = 0.4;
    p1.smooth_width = p2.smooth_width = 0.1;
    p1.x0 = p2.x0 = 0.5;
    p1.t0 = p2.t0 = 1.6;
    p1.orientation = +1;
    p2.orientation = -1;
    auto tr1 = gaussian_packet(p1, g).second;
    auto tr2 = gaussian_packet(p2, g).second;
    std::vector<double> epses = {0.02, 0.04, 0.08, 0.16};
    std::vector<double> norms;
    for (double e : epses) {
        auto terms = expansion_terms(g, a, {tr1, tr2}, {e, e});
        norms.push_back(energy_norm(terms.remainder, 2));
    }
    const auto fit = oracles::fit_loglog(epses, norms);
    CHECK(std::abs(fit.slope - 3.0) <= 0.3);
}
