#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "waveinv/inversion.hpp"
#include "waveinv/io.hpp"
#include "waveinv/plot.hpp"

namespace waveinv {

constexpr const char* kCodeVersion = "waveinv 1.0.0";

// ---------------------------------------------------------------------------
// Config schema and experiment assembly
// ---------------------------------------------------------------------------

inline const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"domain", {"n", "extent", "extent_y", "T", "lambda"}},
        {"grid", {"nx", "nt", "cfl_safety"}},
        {"potential",
         {"preset", "amplitude", "center_x", "center_y", "center_t", "width_x", "width_t", "m",
          "path"}},
        {"schedule", {"s", "kappa", "M", "deltas"}},
        {"noise", {"kind", "r", "seed", "delta"}},
        {"packets", {"tau", "eps", "alpha", "smooth_width_frac", "x0", "t0"}},
        {"forward", {"scale"}},
        {"measurement", {"theta_angle", "smooth_width"}},
        {"reconstruct", {"points", "t0", "angles", "offsets", "offset_range", "fbp_min_angles"}},
        {"radon", {"angles", "phantom_sigma"}},
        {"picard", {"tol_rel", "max_iter"}},
        {"output", {"dir", "formats"}},
        {"run", {"workers"}},
    };
    return schema;
}

/// Shipped defaults: the 1+1D stability-sweep configuration.
inline ConfigMap default_config() {
    return parse_config_text(R"(
[domain]
n = 1
extent = 10.0
T = 30.0
lambda = 1.0
[grid]
nx = 401
nt = 1601
cfl_safety = 0.9
[potential]
preset = bump
amplitude = 1.0
center_x = 5.0
center_t = 15.0
width_x = 3.0
width_t = 3.0
m = 2
[schedule]
s = 0
kappa = 0.85
M = 1.0
deltas = 1e-2,1e-3,1e-4,1e-5
[noise]
kind = seeded
r = 0.0
seed = 20240811
delta = 1e-3
[packets]
tau = 25.0
eps = 0.02
alpha = 0.0
smooth_width_frac = 0.25
[forward]
scale = 0.1
[measurement]
theta_angle = 0.0
smooth_width = 0.5
[reconstruct]
points = 5.0:15.0;4.2:14.2;5.8:15.8;5.0:16.0;4.6:15.0
[output]
dir = out
formats = csv,json,svg
[run]
workers = 1
)");
}

struct ExperimentSetup {
    Grid grid;
    Potential potential;
    MeasurementFunction mf;
    int s = 0;
    double kappa = 0.3, M = 1.0;
    std::vector<double> deltas;
    NoiseModel noise;
    PicardOptions picard;
    ReconstructOptions rec;
    double packet_tau = 25.0, packet_eps = 0.02;
    double forward_scale = 0.1;
    std::vector<std::array<double, 2>> points;
};

inline ExperimentSetup build_setup_impl(const ConfigView& view);

/// Assembles the experiment from the configuration. Any module invariant
/// violated by configured values is reported as a ConfigError naming it.
inline ExperimentSetup build_setup(const ConfigView& view) {
    try {
        return build_setup_impl(view);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

inline ExperimentSetup build_setup_impl(const ConfigView& view) {
    view.validate_keys(config_schema());
    ExperimentSetup st;
    const int n = static_cast<int>(view.get_int("domain.n", 1));
    const double ex = view.get_double("domain.extent", 1.0);
    const double ey = view.get_double("domain.extent_y", ex);
    const double T = view.get_double("domain.T", 3.2);
    st.grid = make_grid(n, {ex, ey}, T, static_cast<int>(view.get_int("grid.nx", 201)),
                        static_cast<int>(view.get_int("grid.nt", 801)),
                        view.get_double("grid.cfl_safety", 0.9));

    const double lam = view.get_double("domain.lambda", 0.05 * T);
    const int m = static_cast<int>(view.get_int("potential.m", 2));
    const std::string preset = view.get_string("potential.preset", "bump");
    const double amp = view.get_double("potential.amplitude", 1.0);
    const double cx = view.get_double("potential.center_x", 0.5 * ex);
    const double cy = view.get_double("potential.center_y", 0.5 * ey);
    const double ct = view.get_double("potential.center_t", 0.5 * T);
    const double wx = view.get_double("potential.width_x", 0.3 * ex);
    const double wt = view.get_double("potential.width_t", wx);
    if (preset == "bump")
        st.potential = bump_potential(st.grid, m, lam, amp, cx, cy, ct, wx, wt);
    else if (preset == "cone")
        st.potential = cone_potential(st.grid, m, lam, amp, cx, cy, ct, wx);
    else if (preset == "zero")
        st.potential = zero_potential(st.grid, m, lam);
    else if (preset == "file") {
        const std::string path = view.get_string("potential.path", "");
        if (path.empty()) throw ConfigError("potential.path: required for preset 'file'");
        BinaryArray arr = read_array(path);
        Potential a;
        a.grid = st.grid;
        a.m = m;
        a.lam = lam;
        a.d = jung_diameter(st.grid);
        a.t1 = a.d + lam;
        a.t2 = st.grid.T - a.d - lam;
        if (arr.data.size() != static_cast<size_t>(st.grid.sample_count()))
            throw ConfigError("potential.path: gridded file does not match the grid");
        a.values = std::move(arr.data);
        a.L = std::max(a.max_abs(), 1e-300);
        a.validate();
        st.potential = std::move(a);
    } else
        throw ConfigError("potential.preset: unknown preset '" + preset + "'");

    st.s = static_cast<int>(view.get_int("schedule.s", 0));
    st.kappa = view.get_double("schedule.kappa", 0.3);
    st.M = view.get_double("schedule.M", 1.0);
    st.deltas = view.get_double_list("schedule.deltas", {1e-2, 1e-3, 1e-4, 1e-5});

    const std::string kind = view.get_string("noise.kind", "none");
    if (kind == "none")
        st.noise.kind = NoiseKind::None;
    else if (kind == "profile")
        st.noise.kind = NoiseKind::DeterministicProfile;
    else if (kind == "seeded")
        st.noise.kind = NoiseKind::SeededRandomBandlimited;
    else
        throw ConfigError("noise.kind: unknown kind '" + kind + "'");
    st.noise.r = view.get_double("noise.r", 0.0);
    st.noise.delta = view.get_double("noise.delta", 0.0);
    st.noise.seed = static_cast<std::uint64_t>(view.get_int("noise.seed", 1));

    st.picard.tol_rel = view.get_double("picard.tol_rel", 1e-9);
    st.picard.max_iter = static_cast<int>(view.get_int("picard.max_iter", 60));
    st.rec.picard = st.picard;
    st.rec.alpha = view.get_double("packets.alpha", 0.0);
    st.rec.smooth_width_frac = view.get_double("packets.smooth_width_frac", 0.25);
    st.rec.fbp_min_angles = static_cast<int>(view.get_int("reconstruct.fbp_min_angles", 120));
    st.packet_tau = view.get_double("packets.tau", 25.0);
    st.packet_eps = view.get_double("packets.eps", 0.02);
    st.forward_scale = view.get_double("forward.scale", 0.1);

    const double v0w = view.get_double("measurement.smooth_width", 0.6 * lam);
    const double v0a = view.get_double("measurement.theta_angle", 0.0);
    st.mf = measurement_function(st.grid, st.potential, {std::cos(v0a), std::sin(v0a)}, v0w);

    const std::string pts = view.get_string("reconstruct.points", "");
    std::istringstream is(pts);
    std::string tok;
    while (std::getline(is, tok, ';')) {
        tok = config_trim(tok);
        if (tok.empty()) continue;
        const size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw ConfigError("reconstruct.points: expected x:t pairs separated by ';'");
        st.points.push_back({std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
    }
    return st;
}

// ---------------------------------------------------------------------------
// Output funnel and manifest
// ---------------------------------------------------------------------------

class OutputWriter {
   public:
    OutputWriter(std::string dir, ConfigMap cfg) : dir_(std::move(dir)), cfg_(std::move(cfg)) {
        std::filesystem::create_directories(dir_);
        started_ = timestamp();
        // formats filter: comma-separated subset of {csv, json, svg, bin}
        std::string fmts = "csv,json,svg,bin";
        if (auto it = cfg_.find("output.formats"); it != cfg_.end()) fmts = it->second;
        std::istringstream is(fmts);
        std::string tok;
        while (std::getline(is, tok, ',')) formats_.insert("." + config_trim(tok));
        formats_.insert(".bin");  // gridded artifacts are always materialized
    }

    const std::string& dir() const { return dir_; }

    bool wants(const std::string& name) const {
        const auto dot = name.rfind('.');
        if (dot == std::string::npos) return true;
        return formats_.count(name.substr(dot)) > 0;
    }

    void write_text(const std::string& name, const std::string& content) {
        if (!wants(name)) return;
        std::ofstream os(dir_ + "/" + name, std::ios::binary);
        if (!os) throw IoError("cannot write " + name);
        os << content;
        files_.push_back(name);
    }

    void write_binary(const std::string& name, const BinaryArray& arr) {
        write_array(dir_ + "/" + name, arr);
        files_.push_back(name);
    }

    void task(const std::string& name, const std::string& status) {
        tasks_.push_back({{"name", name}, {"status", status}});
    }

    void finalize() {
        nlohmann::json m;
        m["config_hash"] = config_hash(cfg_);
        m["code_version"] = kCodeVersion;
        m["started_at"] = started_;
        m["finished_at"] = timestamp();
        m["tasks"] = tasks_;
        m["outputs"] = files_;
        std::ofstream os(dir_ + "/manifest.json", std::ios::binary);
        if (!os) throw IoError("cannot write manifest.json");
        os << m.dump(2) << "\n";
    }

    static std::string timestamp() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tmv{};
        gmtime_r(&t, &tmv);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tmv);
        return buf;
    }

   private:
    std::string dir_;
    ConfigMap cfg_;
    std::set<std::string> formats_;
    std::vector<std::string> files_;
    nlohmann::json tasks_ = nlohmann::json::array();
    std::string started_;
};

/// Fans independent tasks over a small worker pool; results must be written
/// to per-index slots so the merge is deterministic.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct RunOptions {
    ConfigMap cfg;
    std::string outdir;
    int workers = 1;
};

namespace detail {

inline BoundarySignal forward_data(const ExperimentSetup& st) {
    PacketSpec p;
    p.tau = st.packet_tau;
    p.alpha = st.rec.alpha > 0.0 ? st.rec.alpha
                                 : 0.8 * (0.5 * (st.potential.t1 + st.potential.t2) -
                                          0.5 * jung_diameter(st.grid));
    p.smooth_width = st.rec.smooth_width_frac * p.alpha;
    p.orientation = +1;
    if (st.grid.n == 1) {
        p.x0 = 0.5 * st.grid.box[0];
        p.t0 = 0.5 * (st.potential.t1 + st.potential.t2);
    } else {
        p.theta = {1.0, 0.0};
        p.eta = 0.5 * st.grid.box[0];
        p.t0 = 0.5 * (st.potential.t1 + st.potential.t2);
    }
    return st.forward_scale * packet_trace(p, st.grid);
}

}  // namespace detail

inline int run_forward(const RunOptions& opt) {
    ConfigView view{opt.cfg};
    ExperimentSetup st = build_setup(view);
    OutputWriter out(opt.outdir, opt.cfg);

    BoundarySignal f = detail::forward_data(st);
    auto [u, rep] = solve_semilinear(st.grid, st.potential, f, st.picard);
    out.write_binary("u.bin", to_array(u));
    out.write_binary("dirichlet.bin", to_array(f));

    CsvTable table({"iteration", "residual"});
    for (size_t i = 0; i < rep.residual_history.size(); ++i)
        table.add_row({std::to_string(i + 1), format_double(rep.residual_history[i])});
    out.write_text("picard.csv", table.serialize());

    nlohmann::json j;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["contraction_ratio"] = rep.contraction_ratio;
    j["energy_norm_e1"] = energy_norm(u, 1);
    j["data_norm_h1"] = lateral_sobolev_norm(f, 1.0);
    out.write_text("forward.json", j.dump(2) + "\n");
    out.task("forward", "ok");
    out.finalize();
    return 0;
}

inline int run_dn(const RunOptions& opt) {
    ConfigView view{opt.cfg};
    ExperimentSetup st = build_setup(view);
    OutputWriter out(opt.outdir, opt.cfg);

    BoundarySignal f = detail::forward_data(st);
    BoundarySignal lam = dn_map(st.grid, st.potential, f, st.picard);
    out.write_binary("dirichlet.bin", to_array(f));
    out.write_binary("neumann.bin", to_array(lam));

    nlohmann::json j;
    j["dirichlet_h1"] = lateral_sobolev_norm(f, 1.0);
    j["neumann_l2"] = lateral_sobolev_norm(lam, 0.0);
    j["instrument_measurement"] = instrument_measurement(st.mf.psi, lam);
    out.write_text("dn.json", j.dump(2) + "\n");
    out.task("dn", "ok");
    out.finalize();
    return 0;
}

inline int run_identity(const RunOptions& opt) {
    ConfigView view{opt.cfg};
    ExperimentSetup st = build_setup(view);
    OutputWriter out(opt.outdir, opt.cfg);
    if (st.grid.n != 1) throw ConfigError("identity: 1D configuration required");

    const double x0 = 0.5 * st.grid.box[0];
    const double t0 = 0.5 * (st.potential.t1 + st.potential.t2);
    const double margin = t0 - std::max(x0, st.grid.box[0] - x0);
    std::vector<PacketSpec> specs(static_cast<size_t>(st.potential.m));
    for (int j = 0; j < st.potential.m; ++j) {
        auto& p = specs[static_cast<size_t>(j)];
        p.tau = (j < 2) ? st.packet_tau : 1.0;
        p.alpha = st.rec.alpha > 0.0 ? st.rec.alpha : 0.85 * margin;
        p.smooth_width = st.rec.smooth_width_frac * p.alpha;
        p.orientation = (j == 1) ? -1 : +1;
        p.x0 = x0;
        p.t0 = t0;
        if (j >= 2) p.amplitude_scale = 1.0;
    }

    CsvTable table({"eps", "lhs", "boundary_term", "remainder_term", "closure"});
    PlotSeries series;
    for (double e : {0.25 * st.packet_eps, 0.5 * st.packet_eps, st.packet_eps, 2.0 * st.packet_eps}) {
        std::vector<double> eps(static_cast<size_t>(st.potential.m), e);
        IdentityTerms t = integral_identity_eval(st.grid, st.potential, st.mf, specs, eps, st.picard);
        table.add_row({format_double(e), format_double(t.lhs), format_double(t.boundary_term),
                       format_double(t.remainder_term), format_double(t.closure())});
        series.x.push_back(e);
        series.y.push_back(std::max(std::abs(t.lhs - t.boundary_term), 1e-300));
    }
    out.write_text("identity.csv", table.serialize());
    nlohmann::json j;
    j["tau"] = st.packet_tau;
    j["rows"] = series.x.size();
    out.write_text("identity.json", j.dump(2) + "\n");
    series.label = "|lhs - boundary| vs eps";
    out.write_text("identity_residual.svg", svg_loglog(series, "identity eps-residual"));
    out.task("identity", "ok");
    out.finalize();
    return 0;
}

inline int run_reconstruct(const RunOptions& opt) {
    ConfigView view{opt.cfg};
    ExperimentSetup st = build_setup(view);
    OutputWriter out(opt.outdir, opt.cfg);

    NoiseModel noise = st.noise;
    SimulatedDnOracle oracle(st.grid, st.potential, st.picard, noise);
    const double delta = std::max(noise.delta, 1e-12);
    ScheduleParams sched;
    bool scheduled = true;
    try {
        sched = schedule_parameters(delta, st.kappa, st.M, st.s, st.potential.m, st.grid.n);
    } catch (const Error&) {
        scheduled = false;
    }
    if (!scheduled || view.has("packets.tau")) {
        sched.m = st.potential.m;
        sched.s = st.s;
        sched.n = st.grid.n;
        sched.tau = st.packet_tau;
        sched.eps = st.packet_eps;
    }

    if (st.grid.n == 1) {
        if (st.points.empty()) throw ConfigError("reconstruct.points: required in 1D");
        CsvTable table({"x0", "t0", "truth", "estimate", "abs_error", "tau", "eps"});
        ReconstructionResult res;
        res.queries = st.points;
        res.estimates.resize(st.points.size());
        parallel_for(static_cast<int>(st.points.size()), opt.workers, [&](int i) {
            res.estimates[static_cast<size_t>(i)] = reconstruct_point_1d(
                oracle, st.mf, sched, st.points[static_cast<size_t>(i)][0],
                st.points[static_cast<size_t>(i)][1], st.rec);
        });
        for (const auto& pt : st.points)
            res.truth.push_back(detail::potential_value_at(st.potential, pt[0], pt[1]));
        res.finalize_errors();
        for (size_t i = 0; i < st.points.size(); ++i)
            table.add_row({format_double(st.points[i][0]), format_double(st.points[i][1]),
                           format_double(res.truth[i]), format_double(res.estimates[i].a_hat),
                           format_double(std::abs(res.estimates[i].a_hat - res.truth[i])),
                           format_double(res.estimates[i].tau),
                           format_double(res.estimates[i].eps)});
        out.write_text("reconstruct.csv", table.serialize());
        nlohmann::json j;
        j["sup_error"] = res.sup_error;
        j["tau"] = sched.tau;
        j["eps"] = sched.eps;
        out.write_text("reconstruct.json", j.dump(2) + "\n");
        out.task("reconstruct", "ok");
    } else {
        const double t0 = view.get_double("reconstruct.t0", 0.5 * (st.potential.t1 + st.potential.t2));
        const int n_angles = static_cast<int>(view.get_int("reconstruct.angles", 24));
        const int n_off = static_cast<int>(view.get_int("reconstruct.offsets", 21));
        const double range = view.get_double("reconstruct.offset_range", 0.32);
        std::vector<double> etas;
        for (int q = 0; q < n_off; ++q)
            etas.push_back(-range + 2.0 * range * q / (n_off - 1));

        const int kc = static_cast<int>(std::round(t0 / st.grid.dt()));
        SpatialField2D truth_slice = potential_slice(st.potential, kc);
        ReconstructOptions rec2 = st.rec;
        rec2.fbp_min_angles = std::min(st.rec.fbp_min_angles, n_angles);
        const TaskRunner pool = [&](int count, const std::function<void(int)>& fn) {
            parallel_for(count, opt.workers, fn);
        };
        FieldReconstruction fr = reconstruct_field_2d(oracle, st.mf, sched, t0, n_angles, etas,
                                                      truth_slice, rec2, pool);

        double num = 0.0, den = 0.0;
        SpatialField2D err_map = truth_slice;
        for (size_t i = 0; i < truth_slice.v.size(); ++i) {
            const double d = fr.field.v[i] - truth_slice.v[i];
            err_map.v[i] = d;
            num += d * d;
            den += truth_slice.v[i] * truth_slice.v[i];
        }
        out.write_binary("sinogram_estimate.bin", to_array(fr.sinogram));
        out.write_binary("field_estimate.bin", to_array(fr.field));
        out.write_text("error_map.svg", svg_heatmap(err_map, "estimate - truth"));
        nlohmann::json j;
        j["relative_l2_error"] = den > 0 ? std::sqrt(num / den) : 0.0;
        j["angles"] = n_angles;
        j["offsets"] = n_off;
        j["tau"] = sched.tau;
        j["eps"] = sched.eps;
        out.write_text("reconstruct.json", j.dump(2) + "\n");
        out.task("reconstruct", "ok");
    }
    out.finalize();
    return 0;
}

inline int run_sweep(const RunOptions& opt) {
    ConfigView view{opt.cfg};
    ExperimentSetup st = build_setup(view);
    OutputWriter out(opt.outdir, opt.cfg);
    if (st.grid.n != 1) throw ConfigError("sweep: 1D configuration required");
    if (st.points.empty()) throw ConfigError("reconstruct.points: required for the sweep");

    SweepConfig cfg;
    cfg.grid = st.grid;
    cfg.truth = st.potential;
    cfg.points = st.points;
    cfg.kappa = st.kappa;
    cfg.M = st.M;
    cfg.s = st.s;
    cfg.noise = st.noise;
    cfg.rec = st.rec;
    cfg.v0_smooth_width = view.get_double("measurement.smooth_width", 0.6 * st.potential.lam);
    SweepRecord rec = stability_sweep(cfg, st.deltas);

    CsvTable table({"delta", "tau", "eps", "sup_error"});
    PlotSeries series;
    for (size_t i = 0; i < rec.deltas.size(); ++i) {
        table.add_row({format_double(rec.deltas[i]), format_double(rec.taus[i]),
                       format_double(rec.epss[i]), format_double(rec.sup_errors[i])});
        series.x.push_back(rec.deltas[i]);
        series.y.push_back(rec.sup_errors[i]);
    }
    out.write_text("sweep.csv", table.serialize());
    nlohmann::json j;
    j["slope"] = rec.slope;
    j["slope_ci95"] = rec.slope_ci;
    const double sigma =
        schedule_parameters(st.deltas.front(), st.kappa, st.M, st.s, st.potential.m, st.grid.n).sigma;
    j["sigma_target"] = sigma;
    j["passes_one_sided_bound"] = rec.slope >= sigma;
    out.write_text("sweep_slope.json", j.dump(2) + "\n");
    series.label = "sup error vs delta";
    out.write_text("sweep.svg", svg_loglog(series, "stability sweep"));
    out.task("sweep", "ok");
    out.finalize();
    return 0;
}

inline int run_radon(const RunOptions& opt) {
    ConfigView view{opt.cfg};
    ExperimentSetup st = build_setup(view);
    OutputWriter out(opt.outdir, opt.cfg);
    if (st.grid.n != 2) throw ConfigError("radon: 2D configuration required");

    const int kc = static_cast<int>(std::round(0.5 * (st.potential.t1 + st.potential.t2) / st.grid.dt()));
    SpatialField2D slice = potential_slice(st.potential, kc);
    const int n_angles = static_cast<int>(view.get_int("radon.angles", 180));
    std::vector<double> thetas;
    for (int q = 0; q < n_angles; ++q) thetas.push_back(3.14159265358979323846 * q / n_angles);
    const double M_supp = 0.55 * std::hypot(st.grid.box[0], st.grid.box[1]);
    std::vector<double> etas;
    const double deta = 0.5 * slice.dx;
    for (double e = -M_supp; e <= M_supp + 1e-12; e += deta) etas.push_back(e);

    RadonData rd = partial_radon(slice, thetas, etas);
    SpatialField2D rec = invert_radon(rd, slice);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < slice.v.size(); ++i) {
        num += (rec.v[i] - slice.v[i]) * (rec.v[i] - slice.v[i]);
        den += slice.v[i] * slice.v[i];
    }
    out.write_binary("sinogram.bin", to_array(rd));
    out.write_binary("fbp.bin", to_array(rec));
    out.write_text("fbp.svg", svg_heatmap(rec, "FBP round trip"));
    nlohmann::json j;
    j["angles"] = n_angles;
    j["relative_l2_error"] = den > 0 ? std::sqrt(num / den) : 0.0;
    j["slice_check_theta0"] = fourier_slice_check(slice, 0.0, 120.0);
    out.write_text("radon.json", j.dump(2) + "\n");
    out.task("radon", "ok");
    out.finalize();
    return 0;
}

// ---------------------------------------------------------------------------
// Self test: fast spot checks of the shipped configuration
// ---------------------------------------------------------------------------

inline int run_selftest(const RunOptions& opt) {
    OutputWriter out(opt.outdir, opt.cfg);
    ConfigView view{opt.cfg};
    struct Check {
        std::string name;
        bool pass;
        double measured, expected, tol;
    };
    std::vector<Check> checks;
    auto record = [&checks](const std::string& name, double measured, double expected, double tol) {
        checks.push_back({name, std::abs(measured - expected) <= tol, measured, expected, tol});
    };

    // combinatorial identity
    record("multinomial_m3", multinomial_identity(3, {1.0, 2.0, 3.0}), 36.0, 1e-10);
    // solver polynomial exactness
    {
        Grid g = make_grid(1, {1.0, 1.0}, 1.0, 41, 81, 0.9);
        SpaceTimeField F(g, FieldRole::Source);
        for (int k = 0; k < g.nt; ++k)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x_of(i), t = g.t_of(k);
                F.at(k, i) = 2.0 * x * (1.0 - x) + 2.0 * t * t;
            }
        BoundarySignal bc(g, SignalRole::Dirichlet);
        SpaceTimeField u = solve_linear_wave(g, F, bc);
        double err = 0.0;
        for (int k = 0; k < g.nt; ++k)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x_of(i), t = g.t_of(k);
                err = std::max(err, std::abs(u.at(k, i) - t * t * x * (1.0 - x)));
            }
        record("leapfrog_quadratic_exactness", err, 0.0, 1e-12);
    }
    // normal derivative exact on quadratics
    {
        Grid g = make_grid(1, {1.0, 1.0}, 1.0, 41, 81, 0.9);
        SpaceTimeField u(g, FieldRole::Solution);
        for (int k = 0; k < g.nt; ++k)
            for (int i = 0; i < g.nx; ++i) u.at(k, i) = g.x_of(i) * g.x_of(i);
        BoundarySignal tr = normal_derivative(u);
        record("trace_quadratic_left", tr.at(0, 0), 0.0, 1e-11);
        record("trace_quadratic_right", tr.at(1, 0), 2.0, 1e-11);
    }
    // packet center amplitude and cutoff shape
    {
        CutoffFn chi = smooth_cutoff(0.5, 0.2);
        record("cutoff_center", chi(0.0), 1.0, 0.0);
        record("cutoff_edge", chi(0.5), 0.0, 0.0);
        Grid g = make_grid(1, {1.0, 1.0}, 2.0, 201, 501, 0.9);
        PacketSpec p;
        p.tau = 100.0;
        p.alpha = 0.4;
        p.smooth_width = 0.1;
        p.x0 = 0.5;
        p.t0 = 1.0;
        auto [h, trc] = gaussian_packet(p, g);
        (void)trc;
        record("packet_center_amplitude", h.at(250, 100), std::sqrt(100.0), 1e-12);
    }
    // schedule worked example
    {
        ScheduleParams p = schedule_parameters(1e-4, std::cbrt(1e-2), 1.0, 0, 2, 1);
        record("schedule_tau", p.tau, 4.0658514, 1e-6);
        record("schedule_eps", p.eps, 2.4595095e-3, 1e-9);
        record("schedule_sigma", p.sigma, 1.0 / 15.0, 1e-15);
    }
    // noise magnitude honors delta with the configured seed
    {
        Grid g = make_grid(1, {1.0, 1.0}, 3.2, 101, 401, 0.9);
        BoundarySignal f(g, SignalRole::Dirichlet);
        for (int k = 0; k < g.nt; ++k) f.at(0, k) = std::sin(3.0 * g.t_of(k));
        NoiseModel nm{NoiseKind::SeededRandomBandlimited, 2e-3, 0.0,
                      static_cast<std::uint64_t>(view.get_int("noise.seed", 1))};
        record("noise_h0_magnitude", lateral_sobolev_norm(make_noise(nm, f), 0.0), 2e-3, 1e-12);
    }
    // energy norm of a constant
    {
        Grid g = make_grid(1, {1.0, 1.0}, 1.0, 41, 81, 0.9);
        SpaceTimeField u(g, FieldRole::Solution);
        for (double& v : u.values) v = -2.0;
        record("energy_norm_constant", energy_norm(u, 0), 2.0, 1e-12);
    }

    CsvTable table({"check", "status", "measured", "expected", "tolerance"});
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        table.add_row({c.name, c.pass ? "pass" : "fail", format_double(c.measured),
                       format_double(c.expected), format_double(c.tol)});
    }
    out.write_text("selftest.csv", table.serialize());
    nlohmann::json j;
    j["passed"] = all;
    j["checks"] = checks.size();
    out.write_text("selftest.json", j.dump(2) + "\n");
    out.task("selftest", all ? "ok" : "failed");
    out.finalize();
    return all ? 0 : 1;
}

}  // namespace waveinv
