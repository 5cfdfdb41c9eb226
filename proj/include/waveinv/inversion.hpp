#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "waveinv/findiff.hpp"
#include "waveinv/probes.hpp"
#include "waveinv/radon.hpp"
#include "waveinv/semilinear.hpp"

namespace waveinv {

// ---------------------------------------------------------------------------
// Parameter schedule
// ---------------------------------------------------------------------------

/// Closed-form (tau, eps) minimizing the reconstruction error budget
///   f(eps, tau) = 2 tau^{-1/2} + (gamma0 delta / m) eps^{-m}
///                 + eps^{m-1} tau^{s_hat} / (m-1),
/// with s_hat = (2m-1)(s+2)/2 and gamma0 = kappa^{2m-1}/M, together with the
/// Hoelder exponent sigma(s).
struct ScheduleParams {
    double delta = 0.0, kappa = 0.0, M = 0.0;
    int s = 0, m = 2, n = 1;
    double s_hat = 0.0, gamma0 = 0.0;
    double tau = 1.0, eps = 0.0, sigma = 0.0;

    double objective(double e, double t) const {
        return 2.0 / std::sqrt(t) + (gamma0 * delta / m) * std::pow(e, -m) +
               std::pow(e, m - 1) * std::pow(t, s_hat) / (m - 1);
    }
};

inline ScheduleParams schedule_parameters(double delta, double kappa, double M, int s, int m, int n) {
    if (!(delta > 0.0) || !(delta < M)) throw DeltaOutOfRange("schedule: need 0 < delta < M");
    if (!(kappa > 0.0) || !(kappa < 1.0)) throw DeltaOutOfRange("schedule: need kappa in (0,1)");
    if (m < 2 || s < 0 || (n != 1 && n != 2)) throw DeltaOutOfRange("schedule: bad (s, m, n)");

    ScheduleParams p;
    p.delta = delta;
    p.kappa = kappa;
    p.M = M;
    p.s = s;
    p.m = m;
    p.n = n;
    p.s_hat = 0.5 * (2.0 * m - 1.0) * (s + 2.0);
    p.gamma0 = std::pow(kappa, 2 * m - 1) / M;

    const double gd = p.gamma0 * delta;
    const double D = 2.0 * m * (p.s_hat + 1.0) - 1.0;  // = (2m-1)(m(s+2)+1)
    const double c = p.s_hat / (m - 1.0);
    p.tau = std::pow(c, -2.0 * (2.0 * m - 1.0) / D) * std::pow(gd, -2.0 * (m - 1.0) / D);
    p.eps = std::pow(c, 2.0 * p.s_hat / D) * std::pow(gd, (2.0 * p.s_hat + 1.0) / D);
    if (p.tau < 1.0)
        throw TauBelowOne("schedule: tau = " + std::to_string(p.tau) +
                          " < 1 (kappa not small enough for this delta)");
    p.sigma = (m - 1.0) / ((2.0 * m - 1.0) * (m * (s + 2.0) + 1.0));
    if (n >= 2) p.sigma /= 2.0 * n;
    return p;
}

// ---------------------------------------------------------------------------
// Noise models
// ---------------------------------------------------------------------------

enum class NoiseKind : std::uint8_t { None, DeterministicProfile, SeededRandomBandlimited };

struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double delta = 0.0;  // target H^r magnitude
    double r = 0.0;      // norm index (nonnegative in this artifact)
    std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

// xorshift-style deterministic generator (stable across platforms)
struct SplitMix64 {
    std::uint64_t x;
    explicit SplitMix64(std::uint64_t s) : x(s) {}
    std::uint64_t next() {
        x += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0; }
};

}  // namespace detail

/// Additive measurement noise. The deterministic profile is nonlinear in f
/// through its dependence on ||f||; the seeded model is a band-limited trig
/// polynomial whose coefficients depend deterministically on (seed, f), so a
/// repeated query reproduces the same bits while different stencil vertices
/// receive different noise.
inline BoundarySignal make_noise(const NoiseModel& model, const BoundarySignal& f) {
    BoundarySignal out(f.grid, SignalRole::Noise);
    if (model.kind == NoiseKind::None || model.delta <= 0.0) return out;
    const Grid& g = f.grid;

    if (model.kind == NoiseKind::DeterministicProfile) {
        BoundarySignal g0(g, SignalRole::Noise);
        for (int b = 0; b < g.boundary_count(); ++b)
            for (int k = 0; k < g.nt; ++k) {
                const double t = g.t_of(k);
                const double window = bump_profile((2.0 * t - g.T) / (0.92 * g.T));
                g0.at(b, k) = std::sin(6.0 * 3.14159265358979323846 * t / g.T) * window;
            }
        const double unit = lateral_sobolev_norm(g0, model.r);
        const double amp = model.delta * 0.5 * (1.0 + std::tanh(lateral_sobolev_norm(f, 0.0)));
        for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = amp / unit * g0.values[i];
        return out;
    }

    // seeded band-limited noise
    const std::uint64_t h =
        detail::fnv1a(f.values.data(), f.values.size() * sizeof(double), model.seed ^ 0x5bf03635ull);
    detail::SplitMix64 rng(h);
    const int kmax = 12;
    const double pi = 3.14159265358979323846;
    for (int b = 0; b < g.boundary_count(); ++b)
        for (int k = 1; k <= kmax; ++k) {
            const double c = rng.uniform(), s = rng.uniform();
            for (int q = 0; q < g.nt; ++q) {
                const double ph = 2.0 * pi * k * g.t_of(q) / g.T;
                out.at(b, q) += c * std::cos(ph) + s * std::sin(ph);
            }
        }
    const double nrm = lateral_sobolev_norm(out, model.r);
    if (nrm > 0.0)
        for (double& v : out.values) v *= model.delta / nrm;
    return out;
}

// ---------------------------------------------------------------------------
// DN oracle
// ---------------------------------------------------------------------------

/// Source of (possibly noisy) Neumann data. The default implementation runs
/// the simulated forward problem; file-driven oracles can substitute it.
class DnOracle {
   public:
    virtual ~DnOracle() = default;
    virtual const Grid& oracle_grid() const = 0;
    virtual BoundarySignal apply(const BoundarySignal& f) const = 0;
};

class SimulatedDnOracle final : public DnOracle {
   public:
    SimulatedDnOracle(const Grid& g, Potential a, PicardOptions picard = {}, NoiseModel noise = {})
        : grid_(g), a_(std::move(a)), picard_(picard), noise_(noise) {}

    const Grid& oracle_grid() const override { return grid_; }

    /// Forward solves are memoized on the exact bit pattern of f, so stencil
    /// vertices repeated across reconstruction queries (the zero vertex,
    /// shared packets) are solved once. Reads are lock-free once present;
    /// writes are serialized per key.
    BoundarySignal apply(const BoundarySignal& f) const override {
        f.require_shape(grid_, "DN oracle");
        BoundarySignal lam(grid_, SignalRole::Neumann);
        if (f.max_abs() > 0.0) {
            const std::uint64_t key =
                detail::fnv1a(f.values.data(), f.values.size() * sizeof(double));
            bool found = false;
            {
                std::lock_guard<std::mutex> lock(cache_mutex_);
                auto it = cache_.find(key);
                if (it != cache_.end()) {
                    lam = it->second;
                    found = true;
                }
            }
            if (!found) {
                lam = dn_map(grid_, a_, f, picard_);
                std::lock_guard<std::mutex> lock(cache_mutex_);
                if (cache_.size() < 64) cache_.emplace(key, lam);
            }
        }
        if (noise_.kind != NoiseKind::None) {
            BoundarySignal e = make_noise(noise_, f);
            for (size_t i = 0; i < lam.values.size(); ++i) lam.values[i] += e.values[i];
        }
        return lam;
    }

    const Potential& potential() const { return a_; }

   private:
    Grid grid_;
    Potential a_;
    PicardOptions picard_;
    NoiseModel noise_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::uint64_t, BoundarySignal> cache_;
};

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

struct ReconstructOptions {
    double alpha = 0.0;              // packet cutoff radius; <= 0 chooses it from the geometry
    double smooth_width_frac = 0.25;  // taper width as a fraction of alpha
    double tau0 = 1.0;               // concentration of the unit-amplitude auxiliary packets
    double alpha_margin = 0.88;      // fraction of the causal margin used when alpha is automatic
    int fbp_min_angles = 120;  // angle floor handed to the FBP stage
    PicardOptions picard{-1.0, 1e-8, 60};
};

struct PointEstimate {
    double a_hat = 0.0;
    double tau = 0.0, eps = 0.0, alpha = 0.0;
    double functional = 0.0;  // the mixed-difference boundary functional
};

/// Aggregate of a reconstruction run: the queried locations (points in 1D,
/// (angle, eta) lines in 2D), the estimates, the truth values when a
/// reference potential is known, and the resulting sup error.
struct ReconstructionResult {
    std::vector<std::array<double, 2>> queries;
    std::vector<PointEstimate> estimates;
    std::vector<double> truth;  // empty when no reference is available
    double sup_error = 0.0;

    void finalize_errors() {
        sup_error = 0.0;
        if (truth.size() != estimates.size()) return;
        for (size_t i = 0; i < estimates.size(); ++i)
            sup_error = std::max(sup_error, std::abs(estimates[i].a_hat - truth[i]));
    }
};

/// Executes `count` independent tasks; the default runs them sequentially.
/// Callers may substitute a pool executor; results must land in per-index
/// slots so the merge order is deterministic.
using TaskRunner = std::function<void(int count, const std::function<void(int)>&)>;

inline void serial_tasks(int count, const std::function<void(int)>& fn) {
    for (int i = 0; i < count; ++i) fn(i);
}

namespace detail {

inline double factorial(int m) {
    double f = 1.0;
    for (int q = 2; q <= m; ++q) f *= q;
    return f;
}

// Shared core: assemble the m packet traces, query the oracle at the 2^m
// amplitude vertices of the mixed difference, pair with psi and normalize by
// 1/(m! pi). Vertices are cached per sigma mask within one query.
inline PointEstimate dn_stencil_estimate(const DnOracle& oracle, const MeasurementFunction& mf,
                                         const ScheduleParams& sched,
                                         const std::vector<PacketSpec>& specs,
                                         const ReconstructOptions& opts) {
    const Grid& g = oracle.oracle_grid();
    std::vector<BoundarySignal> traces;
    traces.reserve(specs.size());
    for (const auto& sp : specs) traces.push_back(packet_trace(sp, g));

    AmplitudeStencil<double> st;
    st.m = sched.m;
    st.eps.assign(static_cast<size_t>(sched.m), sched.eps);
    st.evaluator = [&](const std::vector<double>& amps) {
        BoundarySignal mix(g, SignalRole::Dirichlet);
        for (size_t j = 0; j < amps.size(); ++j) {
            if (amps[j] == 0.0) continue;
            for (size_t i = 0; i < mix.values.size(); ++i)
                mix.values[i] += amps[j] * traces[j].values[i];
        }
        return instrument_measurement(mf.psi, oracle.apply(mix));
    };
    PointEstimate est;
    est.functional = mixed_difference(st);
    est.tau = sched.tau;
    est.eps = sched.eps;
    est.alpha = specs.front().alpha;
    est.a_hat = est.functional / (factorial(sched.m) * 3.14159265358979323846);
    (void)opts;
    return est;
}

}  // namespace detail

/// Pointwise reconstruction in 1+1D: crossing packets at (x0, t0), the
/// mixed finite difference of the measured instrument functional, and the
/// 1/(m! pi) normalization (1/(2 pi) at m = 2).
inline PointEstimate reconstruct_point_1d(const DnOracle& oracle, const MeasurementFunction& mf,
                                          const ScheduleParams& sched, double x0, double t0,
                                          const ReconstructOptions& opts = {}) {
    const Grid& g = oracle.oracle_grid();
    if (g.n != 1) throw DimensionUnsupported("reconstruct_point_1d: 1D oracle required");
    const double L = g.box[0];
    if (!(x0 > 0.0) || !(x0 < L) || t0 < mf.t1 - 1e-12 || t0 > mf.t2 + 1e-12)
        throw OutOfPlateau("reconstruct_point_1d: (x0,t0) outside Omega x [t1,t2]");

    // the packet traces must vanish near t=0; the causal margin is the
    // earliest characteristic arrival time at the boundary
    const double margin = t0 - std::max(x0, L - x0);
    double alpha = opts.alpha > 0.0 ? opts.alpha : opts.alpha_margin * margin;
    if (!(alpha > 0.0) || alpha > margin)
        throw GeometryViolation("reconstruct_point_1d: no admissible packet cutoff radius");

    std::vector<PacketSpec> specs;
    for (int j = 0; j < sched.m; ++j) {
        PacketSpec p;
        p.alpha = alpha;
        p.smooth_width = opts.smooth_width_frac * alpha;
        p.x0 = x0;
        p.t0 = t0;
        if (j == 0) {
            p.tau = sched.tau;
            p.orientation = +1;
        } else if (j == 1) {
            p.tau = sched.tau;
            p.orientation = -1;
        } else {
            p.tau = opts.tau0;
            p.orientation = +1;
            p.amplitude_scale = 1.0 / std::sqrt(opts.tau0);
        }
        specs.push_back(p);
    }
    return detail::dn_stencil_estimate(oracle, mf, sched, specs, opts);
}

/// Reconstruction of the partial Radon transform R(a)(t0, theta, eta) in
/// 2+1D with planar crossing packets; eta is measured from the domain
/// center (the sinogram convention of partial_radon).
inline PointEstimate reconstruct_radon_2d(const DnOracle& oracle, const MeasurementFunction& mf,
                                          const ScheduleParams& sched, double t0, double angle,
                                          double eta, const ReconstructOptions& opts = {}) {
    const Grid& g = oracle.oracle_grid();
    if (g.n != 2) throw DimensionUnsupported("reconstruct_radon_2d: 2D oracle required");
    if (t0 < mf.t1 - 1e-12 || t0 > mf.t2 + 1e-12)
        throw OutOfPlateau("reconstruct_radon_2d: t0 outside [t1,t2]");

    const std::array<double, 2> theta = {std::cos(angle), std::sin(angle)};
    const std::array<double, 2> center = {0.5 * g.box[0], 0.5 * g.box[1]};
    const double eta_abs = eta + center[0] * theta[0] + center[1] * theta[1];

    // causal margin: earliest boundary arrival of either planar packet
    double reach = 0.0;
    for (int cx = 0; cx <= 1; ++cx)
        for (int cy = 0; cy <= 1; ++cy)
            reach = std::max(reach, std::abs(cx * g.box[0] * theta[0] + cy * g.box[1] * theta[1] -
                                             eta_abs));
    const double margin = t0 - reach;
    double alpha = opts.alpha > 0.0 ? opts.alpha : opts.alpha_margin * margin;
    if (!(alpha > 0.0) || alpha > margin)
        throw GeometryViolation("reconstruct_radon_2d: line too far from the domain for causal packets");

    std::vector<PacketSpec> specs;
    for (int j = 0; j < sched.m; ++j) {
        PacketSpec p;
        p.alpha = alpha;
        p.smooth_width = opts.smooth_width_frac * alpha;
        p.theta = theta;
        p.eta = eta_abs;
        p.t0 = t0;
        if (j == 0) {
            p.tau = sched.tau;
            p.orientation = +1;
        } else if (j == 1) {
            p.tau = sched.tau;
            p.orientation = -1;
        } else {
            p.tau = opts.tau0;
            p.orientation = +1;
            p.amplitude_scale = 1.0 / std::sqrt(opts.tau0);
        }
        specs.push_back(p);
    }
    return detail::dn_stencil_estimate(oracle, mf, sched, specs, opts);
}

/// Assembles sinogram estimates over an (angles x offsets) grid and applies
/// filtered back-projection. Returns both the assembled data and the field.
struct FieldReconstruction {
    RadonData sinogram;
    SpatialField2D field;
};

inline FieldReconstruction reconstruct_field_2d(const DnOracle& oracle, const MeasurementFunction& mf,
                                                const ScheduleParams& sched, double t0, int n_angles,
                                                const std::vector<double>& etas,
                                                const SpatialField2D& out_template,
                                                const ReconstructOptions& opts = {},
                                                const TaskRunner& runner = serial_tasks) {
    const Grid& g = oracle.oracle_grid();
    if (g.n != 2) throw DimensionUnsupported("reconstruct_field_2d: 2D oracle required");
    if (n_angles < 1 || etas.size() < 2)
        throw InsufficientAngles("reconstruct_field_2d: empty reconstruction geometry");

    FieldReconstruction out;
    out.sinogram.t0 = t0;
    out.sinogram.center = {0.5 * g.box[0], 0.5 * g.box[1]};
    const double pi = 3.14159265358979323846;
    for (int q = 0; q < n_angles; ++q) out.sinogram.thetas.push_back(pi * q / n_angles);
    out.sinogram.etas = etas;
    out.sinogram.values.assign(static_cast<size_t>(n_angles) * etas.size(), 0.0);
    runner(n_angles, [&](int q) {
        for (size_t ie = 0; ie < etas.size(); ++ie) {
            const PointEstimate est = reconstruct_radon_2d(
                oracle, mf, sched, t0, out.sinogram.thetas[static_cast<size_t>(q)], etas[ie], opts);
            out.sinogram.at(static_cast<size_t>(q), ie) = est.a_hat;
        }
    });
    FbpOptions fbp;
    fbp.min_angles = opts.fbp_min_angles;
    out.field = invert_radon(out.sinogram, out_template, fbp);
    return out;
}

// ---------------------------------------------------------------------------
// Integral identity evaluation
// ---------------------------------------------------------------------------

/// The three independently computed terms of the finite-difference integral
/// identity: lhs = -m! int a v0 v1...vm, the instrument-paired mixed
/// difference of the DN data, and the remainder pairing. For consistent
/// orientation (outward normal traces) the closure is
///   lhs - boundary_term - remainder_term ~ discretization error.
struct IdentityTerms {
    double lhs = 0.0;
    double boundary_term = 0.0;
    double remainder_term = 0.0;
    double closure() const { return lhs - boundary_term - remainder_term; }
};

inline IdentityTerms integral_identity_eval(const Grid& grid, const Potential& a,
                                            const MeasurementFunction& mf,
                                            const std::vector<PacketSpec>& specs,
                                            const std::vector<double>& eps,
                                            const PicardOptions& picard = {}) {
    const int m = a.m;
    if (static_cast<int>(specs.size()) != m || static_cast<int>(eps.size()) != m)
        throw SizeMismatch("integral_identity_eval: need m packets and m amplitudes");

    // analytic packet fields for the volume term, discrete solves for the rest
    std::vector<SpaceTimeField> v_analytic;
    std::vector<BoundarySignal> traces;
    for (const auto& sp : specs) {
        auto [field, trace] = gaussian_packet(sp, grid);
        v_analytic.push_back(std::move(field));
        traces.push_back(std::move(trace));
    }

    IdentityTerms terms;
    {
        SpaceTimeField prod = mf.v0;
        for (size_t i = 0; i < prod.values.size(); ++i) {
            double p = prod.values[i] * a.values[i];
            for (const auto& v : v_analytic) p *= v.values[i];
            prod.values[i] = p;
        }
        terms.lhs = -detail::factorial(m) * volume_integral(prod);
    }

    std::vector<SpaceTimeField> v_disc;
    for (const auto& tr : traces) v_disc.push_back(solve_linear_wave(grid, nullptr, tr));

    double prod_eps = 1.0;
    for (double e : eps) prod_eps *= e;

    KahanSum bsum, rsum;
    for (unsigned sigma = 0; sigma < (1u << m); ++sigma) {
        int pop = 0;
        for (int j = 0; j < m; ++j) pop += (sigma >> j) & 1u;
        const double sign = ((pop + m) % 2 == 0) ? 1.0 : -1.0;

        BoundarySignal mix(grid, SignalRole::Dirichlet);
        for (int j = 0; j < m; ++j) {
            if (!((sigma >> j) & 1u)) continue;
            for (size_t i = 0; i < mix.values.size(); ++i)
                mix.values[i] += eps[static_cast<size_t>(j)] * traces[static_cast<size_t>(j)].values[i];
        }
        SpaceTimeField u_sigma(grid, FieldRole::Solution);
        if (sigma != 0) u_sigma = solve_semilinear(grid, a, mix, picard).first;

        bsum.add(sign * instrument_measurement(mf.psi, normal_derivative(u_sigma)));

        // box(R_sigma) = a [ (sum_j sigma_j eps_j v_j)^m - u_sigma^m ]
        SpaceTimeField resid(grid, FieldRole::Remainder);
        for (size_t i = 0; i < resid.values.size(); ++i) {
            if (a.values[i] == 0.0) continue;
            double lin = 0.0;
            for (int j = 0; j < m; ++j)
                if ((sigma >> j) & 1u)
                    lin += eps[static_cast<size_t>(j)] * v_disc[static_cast<size_t>(j)].values[i];
            double lin_m = 1.0, u_m = 1.0;
            for (int q = 0; q < m; ++q) {
                lin_m *= lin;
                u_m *= u_sigma.values[i];
            }
            resid.values[i] = a.values[i] * (lin_m - u_m) * mf.v0.values[i];
        }
        rsum.add(sign * volume_integral(resid));
    }
    terms.boundary_term = -bsum.value() / prod_eps;
    terms.remainder_term = -rsum.value() / prod_eps;
    return terms;
}

// ---------------------------------------------------------------------------
// Stability sweep
// ---------------------------------------------------------------------------

struct SweepConfig {
    Grid grid;
    Potential truth;
    std::array<double, 2> v0_theta = {1.0, 0.0};
    double v0_smooth_width = 0.0;  // <= 0: 0.6 * lambda
    std::vector<std::array<double, 2>> points;  // (x0, t0) query set
    double kappa = 0.3;
    double M = 1.0;
    int s = 0;
    NoiseModel noise;  // delta is overridden per sweep entry
    ReconstructOptions rec;
};

struct SweepRecord {
    std::vector<double> deltas;
    std::vector<double> sup_errors;
    std::vector<double> taus, epss;
    double slope = 0.0;
    double slope_ci = 0.0;  // 95% half-width
};

namespace detail {

inline double potential_value_at(const Potential& a, double x0, double t0) {
    const Grid& g = a.grid;
    const double fk = t0 / g.dt(), fi = x0 / g.dx(0);
    const int k = std::min(static_cast<int>(fk), g.nt - 2);
    const int i = std::min(static_cast<int>(fi), g.nx - 2);
    const double bt = fk - k, bx = fi - i;
    return (1 - bt) * ((1 - bx) * a.at(k, i) + bx * a.at(k, i + 1)) +
           bt * ((1 - bx) * a.at(k + 1, i) + bx * a.at(k + 1, i + 1));
}

}  // namespace detail

/// For each delta: schedule (tau, eps), reconstruct the fixed point set from
/// noisy simulated data, record the sup error against the known truth, and
/// fit the log-log slope with a 95% confidence half-width.
inline SweepRecord stability_sweep(const SweepConfig& cfg, const std::vector<double>& deltas) {
    if (deltas.size() < 4) throw InvalidSweep("stability_sweep: need at least 4 deltas");
    for (size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) throw InvalidSweep("stability_sweep: deltas must decrease");
    if (deltas.front() / deltas.back() < 100.0 * (1.0 - 1e-12))
        throw InvalidSweep("stability_sweep: deltas must span at least two decades");
    if (cfg.points.empty()) throw InvalidSweep("stability_sweep: empty point set");

    const double v0w = cfg.v0_smooth_width > 0.0 ? cfg.v0_smooth_width : 0.6 * cfg.truth.lam;
    const MeasurementFunction mf = measurement_function(cfg.grid, cfg.truth, cfg.v0_theta, v0w);

    SweepRecord rec;
    for (double delta : deltas) {
        const ScheduleParams sched =
            schedule_parameters(delta, cfg.kappa, cfg.M, cfg.s, cfg.truth.m, cfg.grid.n);
        NoiseModel noise = cfg.noise;
        noise.delta = (noise.kind == NoiseKind::None) ? 0.0 : delta;
        SimulatedDnOracle oracle(cfg.grid, cfg.truth, cfg.rec.picard, noise);
        double sup = 0.0;
        for (const auto& pt : cfg.points) {
            const PointEstimate est = reconstruct_point_1d(oracle, mf, sched, pt[0], pt[1], cfg.rec);
            const double truth = detail::potential_value_at(cfg.truth, pt[0], pt[1]);
            sup = std::max(sup, std::abs(est.a_hat - truth));
        }
        rec.deltas.push_back(delta);
        rec.sup_errors.push_back(sup);
        rec.taus.push_back(sched.tau);
        rec.epss.push_back(sched.eps);
    }

    // least-squares slope of log(sup_error) against log(delta)
    const size_t n = rec.deltas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double lx = std::log(rec.deltas[i]), ly = std::log(rec.sup_errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    rec.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - rec.slope * sx) / n;
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = std::log(rec.sup_errors[i]) - (intercept + rec.slope * std::log(rec.deltas[i]));
        ss += r * r;
    }
    if (n > 2) rec.slope_ci = 1.96 * std::sqrt(ss / (n - 2) * n / denom);
    return rec;
}

}  // namespace waveinv
