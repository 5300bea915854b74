#ifndef VORTEXLAB_CLI_IO_HPP
#define VORTEXLAB_CLI_IO_HPP

#include <span>
#include <string>
#include <vector>

#include "vortexlab/experiments.hpp"

namespace vortexlab::cli_io {

/// A sweep plan plus the output/checkpoint policy; the on-disk form is a
/// block-structured JSON document with every module constraint re-checked
/// at load time.
struct RunConfig {
    experiments::SweepPlan plan;
};

/// Parse and validate a config document. Unknown keys anywhere are rejected;
/// errors carry the offending key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical serialization; parse_config(config_json(c)) reproduces c.
std::string config_json(const RunConfig& cfg);

/// Emit records.csv, summary.json and (optionally) plots/*.svg under dir.
/// Output is byte-stable for identical inputs.
void write_report(std::span<const experiments::ExperimentRecord> records,
                  std::span<const experiments::RunSummary> runs,
                  const experiments::RateFit& rate, const std::string& dir,
                  bool plots = true);

/// The fixed records.csv column order, as a comma-joined header line.
std::string csv_header();
std::vector<experiments::ExperimentRecord> read_records_csv(const std::string& path);

/// Re-render summary.json and plots from an existing records.csv.
void render_report_dir(const std::string& dir);

/// Bit-exact binary state snapshots (grids, modes, scalars).
void save_state(const solver::SolverState& s, const std::string& path);
solver::SolverState load_state(const std::string& path,
                               std::shared_ptr<const geometry::ScaledChart> chart);

} // namespace vortexlab::cli_io

#endif
