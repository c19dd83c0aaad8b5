#pragma once

#include "updist/engine.hpp"
#include "updist/external.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace updist {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

/// A campaign: every method of the config, each run once per seed.
struct CampaignConfig {
  std::string name;
  /// refine, optimize or invert (external campaigns resolve to one of these).
  std::string mode;
  std::vector<RunConfig> runs;
  std::vector<std::uint64_t> seeds;
  std::size_t jobs = 1;
  /// The config with every default filled in, echoed into run.json.
  nlohmann::json echo;
};

/// Parses a JSON campaign document for one subcommand
/// (refine | optimize | invert | external). Unknown keys are config errors.
CampaignConfig parse_campaign(const nlohmann::json& doc, const std::string& subcommand);
CampaignConfig load_campaign(const std::string& path, const std::string& subcommand);

struct CampaignResult {
  /// Records grouped by method, ordered by seed.
  std::map<std::string, std::vector<ExperimentRecord>> records;
  std::size_t failures = 0;
};

/// Runs every (method, seed) pair, up to `jobs` concurrently, and writes
///   <out>/<method>/seed_<s>/{trace.csv,timing.csv,run.json}
///   <out>/summary.csv
CampaignResult run_campaign(const CampaignConfig& cfg, const std::string& out_dir, std::size_t jobs,
                            std::int64_t seed_offset);

// --- file formats ----------------------------------------------------------

/// iter,x1..xp,y,best_y,criterion_value,q2,rmse_paper,rmse_sqrt,rrmse,raae,accuracy
void write_trace_csv(std::ostream& out, const ExperimentRecord& rec, std::size_t dim);
void write_timing_csv(std::ostream& out, const ExperimentRecord& rec);
nlohmann::json run_json(const ExperimentRecord& rec, const nlohmann::json& config_echo);
/// method,iter,seeds,best_median,best_q1,best_q3,q2_median
void write_summary_csv(std::ostream& out, const std::map<std::string, std::vector<ExperimentRecord>>& records);

/// Checks a trace.csv, timing.csv, summary.csv, run.json or design/dataset CSV
/// against its schema. Throws Error(kIo) describing the first violation.
void validate_file(const std::string& path);

/// Linear-interpolation quantile of unsorted values.
double quantile(std::vector<double> values, double q);

nlohmann::json environment_stamp();

}  // namespace updist
