#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "tgf/analysis.hpp"
#include "tgf/engine.hpp"
#include "tgf/io.hpp"
#include "tgf/verify.hpp"

// Batch front end: simulation, twin assimilation, Monte-Carlo ensembles,
// gain-window checking, constant estimation, and the operator self-check.
// Exit codes: 0 success, 1 usage or configuration error, 2 gain outside the
// admissible window, 3 numerical abort.

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

tgf::RunConfig load_run_config(const std::string& path, std::optional<std::uint64_t> seed) {
    tgf::RunConfig cfg = tgf::load_config(path);
    if (seed) cfg.seed = *seed;
    tgf::validate_config(cfg);
    return cfg;
}

void print_final_record(const std::vector<tgf::DiagnosticsRecord>& records, bool twin) {
    if (records.empty()) return;
    const tgf::DiagnosticsRecord& r = records.back();
    std::printf("t = %g  truth energy = %.6g", r.t, r.e_truth);
    if (twin) std::printf("  error = %.6g  envelope = %.6g", r.err_sq, r.envelope);
    std::printf("\n");
}

int run_single(const tgf::RunConfig& cfg, const std::string& out_dir, bool twin, bool quiet) {
    const char* command = twin ? "assimilate" : "simulate";
    std::filesystem::create_directories(out_dir);
    Clock::time_point t0 = Clock::now();
    std::vector<tgf::DiagnosticsRecord> records;
    try {
        records = twin ? tgf::run_twin(cfg) : tgf::run_truth(cfg);
    } catch (const tgf::BlowUpError& e) {
        tgf::write_diagnostics_csv(join_path(out_dir, "diagnostics.csv"), e.partial());
        std::fprintf(stderr, "%s\n", e.what());
        std::fprintf(stderr, "partial diagnostics written to %s\n",
                     join_path(out_dir, "diagnostics.csv").c_str());
        return 3;
    }
    double wall = seconds_since(t0);
    tgf::write_diagnostics_csv(join_path(out_dir, "diagnostics.csv"), records);
    tgf::write_text(join_path(out_dir, "manifest.json"),
                    tgf::manifest_json(cfg, command, wall, 1));
    if (!quiet) {
        std::printf("%s: %zu records in %.2f s\n", command, records.size(), wall);
        print_final_record(records, twin);
    }
    return 0;
}

int run_mc(const tgf::RunConfig& cfg, const std::string& out_dir, int paths, bool quiet) {
    std::filesystem::create_directories(out_dir);
    Clock::time_point t0 = Clock::now();
    tgf::McResult mc = tgf::run_monte_carlo(cfg, paths);
    double wall = seconds_since(t0);
    tgf::write_mc_csv(join_path(out_dir, "mc.csv"), mc);
    tgf::write_text(join_path(out_dir, "manifest.json"),
                    tgf::manifest_json(cfg, "mc", wall, mc.paths_used));
    if (!quiet) {
        std::printf("mc: %d/%d paths in %.2f s", mc.paths_used, mc.paths_requested, wall);
        if (mc.paths_excluded > 0) std::printf(" (%d excluded)", mc.paths_excluded);
        std::printf("\n");
        if (!mc.mean_err_sq.empty())
            std::printf("t = %g  mean squared error = %.6g\n", mc.t.back(),
                        mc.mean_err_sq.back());
    }
    return 0;
}

int run_check_params(const tgf::RunConfig& cfg, bool quiet) {
    tgf::ConstantsLedger led = tgf::build_ledger(cfg);
    double kappa = cfg.cda.kappa;
    bool inside = led.window_nonempty && kappa > led.kappa_min && kappa <= led.kappa_max;
    std::printf("kappa window: (%g, %g]%s\n", led.kappa_min, led.kappa_max,
                led.advisory() ? " advisory" : "");
    if (!led.window_nonempty) std::printf("window is empty: no admissible gain exists\n");
    if (!quiet) {
        std::printf("kappa: %g\n", kappa);
        std::printf("verdict: %s\n", inside ? "inside" : "outside");
    }
    return inside ? 0 : 2;
}

int run_estimate_constants(const tgf::RunConfig& cfg, const std::string& out_dir, bool quiet) {
    std::filesystem::create_directories(out_dir);
    tgf::ConstantsLedger led = tgf::build_ledger(cfg);

    nlohmann::ordered_json j;
    j["nu"] = led.nu;
    j["alpha"] = led.alpha;
    j["beta"] = led.beta;
    j["lambda1"] = led.lambda1;
    j["epsilon0"] = led.epsilon0;
    j["nd_hat"] = led.nd_hat;
    j["c0_hat"] = led.c0_hat;
    j["M"] = led.M;
    j["L_lip"] = led.L_lip;
    j["kappa_min"] = led.kappa_min;
    j["kappa_max"] = led.kappa_max;
    j["window_nonempty"] = led.window_nonempty;
    j["provenance"] = led.provenance;
    tgf::write_text(join_path(out_dir, "constants.json"), j.dump(2) + "\n");

    if (!quiet) {
        auto tag = [&led](const char* key) {
            auto it = led.provenance.find(key);
            return it == led.provenance.end() ? "" : it->second.c_str();
        };
        std::printf("%-12s %-14s %s\n", "constant", "value", "provenance");
        std::printf("%-12s %-14g %s\n", "lambda1", led.lambda1, tag("lambda1"));
        std::printf("%-12s %-14g %s\n", "epsilon0", led.epsilon0, tag("epsilon0"));
        std::printf("%-12s %-14g %s\n", "nd_hat", led.nd_hat, tag("nd_hat"));
        std::printf("%-12s %-14g %s\n", "c0_hat", led.c0_hat, tag("c0_hat"));
        std::printf("%-12s %-14g %s\n", "M", led.M, tag("M"));
        std::printf("%-12s %-14g %s\n", "L_lip", led.L_lip, tag("L_lip"));
        std::printf("%-12s %-14g %s\n", "kappa_min", led.kappa_min, tag("kappa_min"));
        std::printf("%-12s %-14g %s\n", "kappa_max", led.kappa_max, tag("kappa_max"));
        std::printf("window %s\n", led.window_nonempty ? "nonempty" : "empty");
    }
    return 0;
}

int run_verify_ops(const tgf::DomainSpec& grid, std::uint64_t seed, int fields) {
    std::vector<tgf::IdentityCheck> report = tgf::operator_identity_suite(grid, fields, seed);
    std::printf("%-36s %-12s %-10s %s\n", "check", "residual", "tolerance", "status");
    for (const tgf::IdentityCheck& c : report)
        std::printf("%-36s %-12.3e %-10.0e %s\n", c.name.c_str(), c.residual, c.tolerance,
                    c.pass ? "pass" : "FAIL");
    return tgf::all_pass(report) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tgf-cda: twin-experiment laboratory for nudged third-grade fluids"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int paths = 16;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        CLI::Option* c = sub->add_option("--config", config_path, "JSON configuration file");
        if (config_required) c->required();
        sub->add_option("--out", out_dir, "output directory (created if absent)");
        sub->add_option("--seed", seed, "override the configured RNG seed");
        sub->add_flag("--quiet", quiet, "suppress progress output");
        return sub;
    };

    CLI::App* sim = add_common(app.add_subcommand("simulate", "integrate the truth system"), true);
    CLI::App* assim = add_common(
        app.add_subcommand("assimilate", "integrate the nudged twin experiment"), true);
    CLI::App* mc = add_common(
        app.add_subcommand("mc", "Monte-Carlo ensemble of twin experiments"), true);
    mc->add_option("--paths", paths, "number of independent paths");
    CLI::App* check = add_common(
        app.add_subcommand("check-params", "evaluate the admissible gain window"), true);
    CLI::App* est = add_common(
        app.add_subcommand("estimate-constants", "measure the gain-window constants for a config"),
        true);
    CLI::App* verify = add_common(
        app.add_subcommand("verify-ops", "run the operator identity self-check"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (verify->parsed()) {
            tgf::DomainSpec grid = tgf::make_grid(64, 2.0 * std::numbers::pi);
            if (!config_path.empty()) grid = tgf::load_config(config_path).grid;
            return run_verify_ops(grid, seed.value_or(0), 200);
        }
        tgf::RunConfig cfg = load_run_config(config_path, seed);
        if (sim->parsed()) return run_single(cfg, out_dir, false, quiet);
        if (assim->parsed()) return run_single(cfg, out_dir, true, quiet);
        if (mc->parsed()) return run_mc(cfg, out_dir, paths, quiet);
        if (check->parsed()) return run_check_params(cfg, quiet);
        if (est->parsed()) return run_estimate_constants(cfg, out_dir, quiet);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
