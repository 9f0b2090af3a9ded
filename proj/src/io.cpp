#include "tgf/io.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tgf {
namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config: key '" + path + "' " + why);
}

void check_keys(const njson& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool found = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                found = true;
                break;
            }
        if (!found) bad_key(path.empty() ? it.key() : path + "." + it.key(), "is not recognized");
    }
}

const njson* child(const njson& obj, const char* key) {
    if (!obj.contains(key)) return nullptr;
    const njson& v = obj.at(key);
    if (!v.is_object()) bad_key(key, "must be an object");
    return &v;
}

double get_num(const njson& obj, const std::string& path, const char* key, double def,
               bool required = false) {
    if (!obj.contains(key)) {
        if (required) bad_key(path + key, "is required");
        return def;
    }
    const njson& v = obj.at(key);
    if (!v.is_number()) bad_key(path + key, "must be a number");
    return v.get<double>();
}

int get_int(const njson& obj, const std::string& path, const char* key, int def,
            bool required = false) {
    if (!obj.contains(key)) {
        if (required) bad_key(path + key, "is required");
        return def;
    }
    const njson& v = obj.at(key);
    if (!v.is_number_integer()) bad_key(path + key, "must be an integer");
    return v.get<int>();
}

std::uint64_t get_u64(const njson& obj, const std::string& path, const char* key,
                      std::uint64_t def) {
    if (!obj.contains(key)) return def;
    const njson& v = obj.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) bad_key(path + key, "must be an integer");
    return v.get<std::uint64_t>();
}

bool get_bool(const njson& obj, const std::string& path, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    const njson& v = obj.at(key);
    if (!v.is_boolean()) bad_key(path + key, "must be a boolean");
    return v.get<bool>();
}

std::string get_str(const njson& obj, const std::string& path, const char* key,
                    const std::string& def) {
    if (!obj.contains(key)) return def;
    const njson& v = obj.at(key);
    if (!v.is_string()) bad_key(path + key, "must be a string");
    return v.get<std::string>();
}

NoiseKind parse_noise_kind(const std::string& s, const std::string& path) {
    if (s == "additive") return NoiseKind::Additive;
    if (s == "diagonal_multiplicative") return NoiseKind::DiagonalMultiplicative;
    bad_key(path, "must be 'additive' or 'diagonal_multiplicative'");
}

ForcingPreset parse_forcing_preset(const std::string& s, const std::string& path) {
    if (s == "none") return ForcingPreset::None;
    if (s == "single_mode") return ForcingPreset::SingleMode;
    if (s == "steady_balance") return ForcingPreset::SteadyBalance;
    bad_key(path, "must be 'none', 'single_mode' or 'steady_balance'");
}

InitPreset parse_init_preset(const std::string& s, const std::string& path) {
    if (s == "zero") return InitPreset::Zero;
    if (s == "mode") return InitPreset::Mode;
    if (s == "random_band") return InitPreset::RandomBand;
    if (s == "snapshot") return InitPreset::Snapshot;
    bad_key(path, "must be 'zero', 'mode', 'random_band' or 'snapshot'");
}

InterpolantKind parse_interp_kind(const std::string& s, const std::string& path) {
    if (s == "volume_element") return InterpolantKind::VolumeElement;
    if (s == "fourier_modes") return InterpolantKind::FourierModes;
    bad_key(path, "must be 'volume_element' or 'fourier_modes'");
}

InitialSettings parse_init(const njson& obj, const std::string& path, bool assim_side) {
    check_keys(obj, path,
               {"preset", "kx", "ky", "amplitude", "sine_phase", "band", "decay", "snapshot_path",
                "offset_from_truth"});
    InitialSettings init;
    const std::string prefix = path + ".";
    init.preset = parse_init_preset(get_str(obj, prefix, "preset", "zero"), prefix + "preset");
    init.kx = get_int(obj, prefix, "kx", init.kx);
    init.ky = get_int(obj, prefix, "ky", init.ky);
    init.amplitude = get_num(obj, prefix, "amplitude", init.amplitude);
    init.sine_phase = get_bool(obj, prefix, "sine_phase", init.sine_phase);
    init.band = get_int(obj, prefix, "band", init.band);
    init.decay = get_num(obj, prefix, "decay", init.decay);
    init.snapshot_path = get_str(obj, prefix, "snapshot_path", init.snapshot_path);
    init.offset_from_truth = get_bool(obj, prefix, "offset_from_truth", false);
    if (init.offset_from_truth && !assim_side)
        bad_key(prefix + "offset_from_truth", "is only valid for init_assim");
    return init;
}

const char* noise_kind_name(NoiseKind k) {
    return k == NoiseKind::Additive ? "additive" : "diagonal_multiplicative";
}
const char* forcing_preset_name(ForcingPreset p) {
    switch (p) {
        case ForcingPreset::None: return "none";
        case ForcingPreset::SingleMode: return "single_mode";
        case ForcingPreset::SteadyBalance: return "steady_balance";
    }
    return "none";
}
const char* init_preset_name(InitPreset p) {
    switch (p) {
        case InitPreset::Zero: return "zero";
        case InitPreset::Mode: return "mode";
        case InitPreset::RandomBand: return "random_band";
        case InitPreset::Snapshot: return "snapshot";
    }
    return "zero";
}
const char* interp_kind_name(InterpolantKind k) {
    return k == InterpolantKind::VolumeElement ? "volume_element" : "fourier_modes";
}

ojson init_to_json(const InitialSettings& init, bool assim_side) {
    ojson j;
    j["preset"] = init_preset_name(init.preset);
    j["kx"] = init.kx;
    j["ky"] = init.ky;
    j["amplitude"] = init.amplitude;
    j["sine_phase"] = init.sine_phase;
    j["band"] = init.band;
    j["decay"] = init.decay;
    j["snapshot_path"] = init.snapshot_path;
    if (assim_side) j["offset_from_truth"] = init.offset_from_truth;
    return j;
}

ojson config_to_ojson(const RunConfig& cfg) {
    ojson j;
    j["grid"] = {{"n", cfg.grid.n}, {"L", cfg.grid.L}};
    j["fluid"] = {{"nu", cfg.fluid.nu}, {"alpha", cfg.fluid.alpha}, {"beta", cfg.fluid.beta}};
    j["noise"] = {{"kind", noise_kind_name(cfg.noise.kind)}, {"k_max", cfg.noise.k_max},
                  {"a", cfg.noise.a},                        {"s", cfg.noise.s},
                  {"sigma0", cfg.noise.sigma0},              {"sigma1", cfg.noise.sigma1}};
    j["forcing"] = {{"preset", forcing_preset_name(cfg.forcing.preset)},
                    {"kx", cfg.forcing.kx},
                    {"ky", cfg.forcing.ky},
                    {"amplitude", cfg.forcing.amplitude},
                    {"sine_phase", cfg.forcing.sine_phase}};
    j["cda"] = {{"kappa", cfg.cda.kappa},
                {"interpolant", {{"kind", interp_kind_name(cfg.cda.interpolant.kind)},
                                 {"varpi", cfg.cda.interpolant.varpi}}}};
    j["init_truth"] = init_to_json(cfg.init_truth, false);
    j["init_assim"] = init_to_json(cfg.init_assim, true);
    j["dt"] = cfg.dt;
    j["T"] = cfg.T;
    j["cadence"] = cfg.cadence;
    j["seed"] = cfg.seed;
    ojson consts = ojson::object();
    if (cfg.constants.lambda1) consts["lambda1"] = *cfg.constants.lambda1;
    if (cfg.constants.nd_hat) consts["nd_hat"] = *cfg.constants.nd_hat;
    if (cfg.constants.c0_hat) consts["c0_hat"] = *cfg.constants.c0_hat;
    if (cfg.constants.M) consts["M"] = *cfg.constants.M;
    if (!consts.empty()) j["constants"] = consts;
    return j;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* code_version() { return "1.0.0"; }

const char* kDiagnosticsHeader =
    "t, e_truth, e_assim, err_sq, grad_sq, strain_l4_4, accum, envelope";

void write_snapshot(const std::string& path, const VelocityField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot open '" + path + "' for writing");
    const std::uint32_t d = static_cast<std::uint32_t>(f.domain.d);
    const std::uint32_t n = static_cast<std::uint32_t>(f.domain.n);
    const double L = f.domain.L;
    out.write(reinterpret_cast<const char*>(&d), sizeof d);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&L), sizeof L);
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("snapshot: write to '" + path + "' failed");
}

VelocityField read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open '" + path + "'");
    std::uint32_t d = 0, n = 0;
    double L = 0.0;
    in.read(reinterpret_cast<char*>(&d), sizeof d);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&L), sizeof L);
    if (!in || d != 2) throw std::runtime_error("snapshot: '" + path + "' has a bad header");
    VelocityField f(make_grid(static_cast<int>(n), L));
    in.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("snapshot: '" + path + "' is truncated");
    return f;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    out << kDiagnosticsHeader << '\n';
    for (const DiagnosticsRecord& r : records) {
        out << format_g17(r.t) << ", " << format_g17(r.e_truth) << ", " << format_g17(r.e_assim)
            << ", " << format_g17(r.err_sq) << ", " << format_g17(r.grad_sq) << ", "
            << format_g17(r.strain_l4_4) << ", " << format_g17(r.accum) << ", "
            << format_g17(r.envelope) << '\n';
    }
    if (!out) throw std::runtime_error("csv: write to '" + path + "' failed");
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kDiagnosticsHeader)
        throw std::runtime_error("csv: '" + path + "' does not carry the diagnostics header");
    std::vector<DiagnosticsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        DiagnosticsRecord r;
        char sep = 0;
        if (!(row >> r.t >> sep >> r.e_truth >> sep >> r.e_assim >> sep >> r.err_sq >> sep >>
              r.grad_sq >> sep >> r.strain_l4_4 >> sep >> r.accum >> sep >> r.envelope))
            throw std::runtime_error("csv: malformed row in '" + path + "'");
        records.push_back(r);
    }
    return records;
}

void write_mc_csv(const std::string& path, const McResult& mc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    out << "t, mean_err_sq, stderr_err_sq, mean_truth_e4, n_paths\n";
    for (std::size_t i = 0; i < mc.t.size(); ++i) {
        out << format_g17(mc.t[i]) << ", " << format_g17(mc.mean_err_sq[i]) << ", "
            << format_g17(mc.stderr_err_sq[i]) << ", " << format_g17(mc.mean_truth_e4[i]) << ", "
            << mc.paths_used << '\n';
    }
    if (!out) throw std::runtime_error("csv: write to '" + path + "' failed");
}

RunConfig config_from_json(const std::string& text) {
    njson doc;
    try {
        doc = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config: document must be a JSON object");
    check_keys(doc, "",
               {"grid", "fluid", "noise", "forcing", "cda", "init_truth", "init_assim", "dt", "T",
                "cadence", "seed", "constants"});

    RunConfig cfg;
    const njson* grid = child(doc, "grid");
    if (!grid) bad_key("grid", "is required");
    check_keys(*grid, "grid", {"n", "L"});
    const int n = get_int(*grid, "grid.", "n", 0, true);
    const double L = get_num(*grid, "grid.", "L", 0.0, true);
    try {
        cfg.grid = make_grid(n, L);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: key 'grid': ") + e.what());
    }

    if (const njson* fluid = child(doc, "fluid")) {
        check_keys(*fluid, "fluid", {"nu", "alpha", "beta"});
        cfg.fluid.nu = get_num(*fluid, "fluid.", "nu", cfg.fluid.nu);
        cfg.fluid.alpha = get_num(*fluid, "fluid.", "alpha", cfg.fluid.alpha);
        cfg.fluid.beta = get_num(*fluid, "fluid.", "beta", cfg.fluid.beta);
    }
    if (const njson* noise = child(doc, "noise")) {
        check_keys(*noise, "noise", {"kind", "k_max", "a", "s", "sigma0", "sigma1"});
        cfg.noise.kind =
            parse_noise_kind(get_str(*noise, "noise.", "kind", "additive"), "noise.kind");
        cfg.noise.k_max = get_int(*noise, "noise.", "k_max", cfg.noise.k_max);
        cfg.noise.a = get_num(*noise, "noise.", "a", cfg.noise.a);
        cfg.noise.s = get_num(*noise, "noise.", "s", cfg.noise.s);
        cfg.noise.sigma0 = get_num(*noise, "noise.", "sigma0", cfg.noise.sigma0);
        cfg.noise.sigma1 = get_num(*noise, "noise.", "sigma1", cfg.noise.sigma1);
    }
    if (const njson* forcing = child(doc, "forcing")) {
        check_keys(*forcing, "forcing", {"preset", "kx", "ky", "amplitude", "sine_phase"});
        cfg.forcing.preset = parse_forcing_preset(get_str(*forcing, "forcing.", "preset", "none"),
                                                  "forcing.preset");
        cfg.forcing.kx = get_int(*forcing, "forcing.", "kx", cfg.forcing.kx);
        cfg.forcing.ky = get_int(*forcing, "forcing.", "ky", cfg.forcing.ky);
        cfg.forcing.amplitude = get_num(*forcing, "forcing.", "amplitude", cfg.forcing.amplitude);
        cfg.forcing.sine_phase = get_bool(*forcing, "forcing.", "sine_phase", false);
    }
    if (const njson* cda = child(doc, "cda")) {
        check_keys(*cda, "cda", {"kappa", "interpolant"});
        cfg.cda.kappa = get_num(*cda, "cda.", "kappa", cfg.cda.kappa);
        if (const njson* interp = child(*cda, "interpolant")) {
            check_keys(*interp, "cda.interpolant", {"kind", "varpi"});
            cfg.cda.interpolant.kind = parse_interp_kind(
                get_str(*interp, "cda.interpolant.", "kind", "fourier_modes"),
                "cda.interpolant.kind");
            cfg.cda.interpolant.varpi =
                get_num(*interp, "cda.interpolant.", "varpi", cfg.cda.interpolant.varpi);
        }
    }
    if (const njson* init = child(doc, "init_truth"))
        cfg.init_truth = parse_init(*init, "init_truth", false);
    if (const njson* init = child(doc, "init_assim"))
        cfg.init_assim = parse_init(*init, "init_assim", true);
    cfg.dt = get_num(doc, "", "dt", cfg.dt);
    cfg.T = get_num(doc, "", "T", cfg.T);
    cfg.cadence = get_num(doc, "", "cadence", cfg.cadence);
    cfg.seed = get_u64(doc, "", "seed", cfg.seed);
    if (const njson* consts = child(doc, "constants")) {
        check_keys(*consts, "constants", {"lambda1", "nd_hat", "c0_hat", "M"});
        if (consts->contains("lambda1"))
            cfg.constants.lambda1 = get_num(*consts, "constants.", "lambda1", 0.0);
        if (consts->contains("nd_hat"))
            cfg.constants.nd_hat = get_num(*consts, "constants.", "nd_hat", 0.0);
        if (consts->contains("c0_hat"))
            cfg.constants.c0_hat = get_num(*consts, "constants.", "c0_hat", 0.0);
        if (consts->contains("M")) cfg.constants.M = get_num(*consts, "constants.", "M", 0.0);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) { return config_from_json(read_text(path)); }

std::string config_to_json(const RunConfig& cfg) { return config_to_ojson(cfg).dump(2) + "\n"; }

std::string manifest_json(const RunConfig& cfg, const std::string& command, double wall_seconds,
                          int paths) {
    ojson j;
    j["command"] = command;
    j["code_version"] = code_version();
    j["seed"] = cfg.seed;
    j["paths"] = paths;
    j["config"] = config_to_ojson(cfg);
    j["wall_time_seconds"] = wall_seconds;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j["timestamp_utc"] = stamp;
    return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("io: write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace tgf
