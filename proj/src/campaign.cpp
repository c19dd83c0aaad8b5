#include "updist/campaign.hpp"
#include "updist/error.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace updist {

namespace {

namespace fs = std::filesystem;

struct Task {
  std::size_t run = 0;
  std::uint64_t seed = 0;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void persist(const fs::path& dir, const ExperimentRecord& rec, std::size_t dim, const nlohmann::json& echo) {
  fs::create_directories(dir);
  std::ostringstream trace;
  write_trace_csv(trace, rec, dim);
  write_text(dir / "trace.csv", trace.str());
  std::ostringstream timing;
  write_timing_csv(timing, rec);
  write_text(dir / "timing.csv", timing.str());
  write_text(dir / "run.json", run_json(rec, echo).dump(2) + "\n");
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg, const std::string& out_dir, std::size_t jobs,
                            std::int64_t seed_offset) {
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < cfg.runs.size(); ++r) {
    for (const auto seed : cfg.seeds) {
      tasks.push_back({r, seed + static_cast<std::uint64_t>(seed_offset)});
    }
  }
  std::vector<ExperimentRecord> records(tasks.size());
  std::vector<std::string> io_errors(tasks.size());
  const fs::path root(out_dir);
  fs::create_directories(root);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      RunConfig run = cfg.runs[tasks[t].run];
      run.seed = tasks[t].seed;
      try {
        records[t] = run_experiment(run);
      } catch (const std::exception& e) {
        records[t].name = run.name;
        records[t].method = run.method;
        records[t].seed = run.seed;
        records[t].stop_reason = "error";
        records[t].error = e.what();
      }
      nlohmann::json echo = cfg.echo;
      echo["seed_offset"] = seed_offset;
      const fs::path dir = root / to_string(run.method) / ("seed_" + std::to_string(run.seed));
      try {
        persist(dir, records[t], run.bounds.dim(), echo);
      } catch (const std::exception& e) {
        io_errors[t] = e.what();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs == 0 ? cfg.jobs : jobs, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& e : io_errors) {
    if (!e.empty()) fail(ErrorKind::kIo, e);
  }

  CampaignResult result;
  for (auto& rec : records) {
    if (rec.failed()) ++result.failures;
    result.records[to_string(rec.method)].push_back(std::move(rec));
  }
  std::ostringstream summary;
  write_summary_csv(summary, result.records);
  write_text(root / "summary.csv", summary.str());
  return result;
}

}  // namespace updist
