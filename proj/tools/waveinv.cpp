// Batch experiment runner: forward solves, DN traces, integral-identity
// tables, reconstructions, stability sweeps, Radon round trips and the
// self-test, all driven by a nested key-value config with per-key overrides.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "waveinv/runner.hpp"

namespace {

using namespace waveinv;

std::string classify_error(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const CflViolation*>(&e)) return "CflViolation";
    if (dynamic_cast<const ShapeMismatch*>(&e)) return "ShapeMismatch";
    if (dynamic_cast<const NonFiniteValue*>(&e)) return "NonFiniteValue";
    if (dynamic_cast<const OrderTooHigh*>(&e)) return "OrderTooHigh";
    if (dynamic_cast<const CompatibilityViolation*>(&e)) return "CompatibilityViolation";
    if (dynamic_cast<const NonContraction*>(&e)) return "NonContraction";
    if (dynamic_cast<const InvalidWidth*>(&e)) return "InvalidWidth";
    if (dynamic_cast<const UnderResolved*>(&e)) return "UnderResolved";
    if (dynamic_cast<const GeometryViolation*>(&e)) return "GeometryViolation";
    if (dynamic_cast<const EvaluatorFailure*>(&e)) return "EvaluatorFailure";
    if (dynamic_cast<const SizeMismatch*>(&e)) return "SizeMismatch";
    if (dynamic_cast<const DimensionUnsupported*>(&e)) return "DimensionUnsupported";
    if (dynamic_cast<const BetaTooSmall*>(&e)) return "BetaTooSmall";
    if (dynamic_cast<const InsufficientAngles*>(&e)) return "InsufficientAngles";
    if (dynamic_cast<const TauBelowOne*>(&e)) return "TauBelowOne";
    if (dynamic_cast<const DeltaOutOfRange*>(&e)) return "DeltaOutOfRange";
    if (dynamic_cast<const OutOfPlateau*>(&e)) return "OutOfPlateau";
    if (dynamic_cast<const InvalidSweep*>(&e)) return "InvalidSweep";
    if (dynamic_cast<const EmptySeries*>(&e)) return "EmptySeries";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    return "Error";
}

void write_error_record(const std::string& outdir, const std::string& type, const std::string& msg) {
    try {
        std::filesystem::create_directories(outdir);
        nlohmann::json j;
        j["error_type"] = type;
        j["message"] = msg;
        std::ofstream os(outdir + "/error.json", std::ios::binary);
        os << j.dump(2) << "\n";
    } catch (...) {
        // the record is best-effort; the exit status still reports failure
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"waveinv: semilinear wave inverse-problem experiments"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::vector<std::string> overrides;
    std::string outdir = "out";
    int workers = 0;
    long long seed = -1;
    app.add_option("--config", config_path, "configuration file (nested key-value text)");
    app.add_option("--set", overrides, "override, repeatable: section.key=value");
    app.add_option("--out", outdir, "output directory");
    app.add_option("--workers", workers, "worker pool size (env WAVEINV_WORKERS as fallback)");
    app.add_option("--seed", seed, "noise seed override");

    const std::vector<std::string> names = {"forward", "dn",    "identity", "reconstruct",
                                            "sweep",   "radon", "selftest"};
    for (const auto& n : names) app.add_subcommand(n);

    CLI11_PARSE(app, argc, argv);

    try {
        waveinv::ConfigMap cfg =
            config_path.empty() ? waveinv::default_config() : waveinv::load_config_file(config_path);
        for (const auto& ov : overrides) waveinv::apply_override(cfg, ov);
        if (seed >= 0) cfg["noise.seed"] = std::to_string(seed);

        waveinv::RunOptions opt;
        opt.cfg = cfg;
        opt.outdir = cfg.count("output.dir") && outdir == "out" ? cfg["output.dir"] : outdir;
        if (outdir != "out") opt.outdir = outdir;

        if (workers > 0)
            opt.workers = workers;
        else if (const char* env = std::getenv("WAVEINV_WORKERS"))
            opt.workers = std::max(1, std::atoi(env));
        else
            opt.workers = static_cast<int>(waveinv::ConfigView{cfg}.get_int("run.workers", 1));

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "forward") return waveinv::run_forward(opt);
        if (sub == "dn") return waveinv::run_dn(opt);
        if (sub == "identity") return waveinv::run_identity(opt);
        if (sub == "reconstruct") return waveinv::run_reconstruct(opt);
        if (sub == "sweep") return waveinv::run_sweep(opt);
        if (sub == "radon") return waveinv::run_radon(opt);
        if (sub == "selftest") return waveinv::run_selftest(opt);
        std::cerr << "unknown subcommand\n";
        return 2;
    } catch (const waveinv::ConfigError& e) {
        write_error_record(outdir, "ConfigError", e.what());
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const waveinv::Error& e) {
        write_error_record(outdir, classify_error(e), e.what());
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        write_error_record(outdir, "Unexpected", e.what());
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
