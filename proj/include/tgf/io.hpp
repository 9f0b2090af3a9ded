#pragma once

#include <string>
#include <vector>

#include "tgf/engine.hpp"
#include "tgf/grid.hpp"

// Serialization boundary: velocity snapshots (raw little-endian binary),
// diagnostic series (CSV with a frozen header), configuration documents
// (JSON), and run manifests. Numbers in CSV are printed with %.17g so a
// round trip is value-exact and byte-identical across runs.

namespace tgf {

/// Version string recorded in manifests.
const char* code_version();

/// Frozen diagnostics CSV header; also the column order of the writer.
extern const char* kDiagnosticsHeader;

/// Snapshot layout: u32 d, u32 n, f64 L, then d component planes of n*n
/// doubles, row-major with x contiguous. Little-endian throughout.
void write_snapshot(const std::string& path, const VelocityField& f);
VelocityField read_snapshot(const std::string& path);

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path);

/// Monte-Carlo summary series: t, mean_err_sq, stderr_err_sq,
/// mean_truth_e4, n_paths.
void write_mc_csv(const std::string& path, const McResult& mc);

/// Configuration parsing. Unknown or ill-typed keys throw
/// std::invalid_argument naming the offending key path.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

/// Run manifest: command, code version, seed, path count, config echo,
/// wall time, and timestamp. The last two vary between runs and are
/// excluded from reproducibility comparisons.
std::string manifest_json(const RunConfig& cfg, const std::string& command, double wall_seconds,
                          int paths);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace tgf
