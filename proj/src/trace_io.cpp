#include "updist/campaign.hpp"
#include "updist/error.hpp"

#include <gsl/gsl_version.h>
#include <sys/utsname.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace updist {

namespace {

using nlohmann::json;

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json point_json(const Point& x) {
  json out = json::array();
  for (Eigen::Index j = 0; j < x.size(); ++j) out.push_back(x(j));
  return out;
}

json metrics_json(const std::optional<MetricSnapshot>& m) {
  if (!m) return nullptr;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"q2", num(m->q2)},
          {"rmse_paper", num(m->rmse_paper)},
          {"rmse_sqrt", num(m->rmse_sqrt)},
          {"rrmse", num(m->rrmse)},
          {"raae", num(m->raae)}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_real(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  return res.ec == std::errc() && res.ptr == last;
}

[[noreturn]] void bad(const std::string& path, std::size_t line, const std::string& what) {
  fail(ErrorKind::kIo, path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::vector<std::string>> read_table(const std::string& path, std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kIo, path + ": empty file");
  header = split_csv_line(line);
  std::vector<std::vector<std::string>> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) bad(path, n, "blank line");
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      bad(path, n, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::size_t trace_dim(const std::string& path, const std::vector<std::string>& header) {
  const std::vector<std::string> tail = {"y",     "best_y", "criterion_value", "q2",     "rmse_paper",
                                         "rmse_sqrt", "rrmse", "raae",         "accuracy"};
  if (header.size() < tail.size() + 2 || header[0] != "iter") fail(ErrorKind::kIo, path + ": bad trace header");
  const std::size_t p = header.size() - 1 - tail.size();
  for (std::size_t j = 0; j < p; ++j) {
    if (header[1 + j] != "x" + std::to_string(j + 1)) fail(ErrorKind::kIo, path + ": bad trace header");
  }
  for (std::size_t k = 0; k < tail.size(); ++k) {
    if (header[1 + p + k] != tail[k]) fail(ErrorKind::kIo, path + ": bad trace header, expected '" + tail[k] + "'");
  }
  return p;
}

void validate_trace(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  const std::size_t p = trace_dim(path, header);
  double previous_best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    const std::size_t line = r + 2;
    if (f[0] != std::to_string(r + 1)) bad(path, line, "iter must count up from 1");
    double v = 0.0;
    for (std::size_t k = 1; k <= p + 3; ++k) {
      if (!parse_real(f[k], v)) bad(path, line, "field '" + header[k] + "' is not a number");
    }
    for (std::size_t k = p + 4; k < f.size(); ++k) {
      if (!f[k].empty() && !parse_real(f[k], v)) bad(path, line, "field '" + header[k] + "' is not a number");
    }
    double y = 0.0;
    double best = 0.0;
    parse_real(f[p + 1], y);
    parse_real(f[p + 2], best);
    if (best > y || best > previous_best) bad(path, line, "best_y is not the running minimum");
    previous_best = best;
  }
}

void validate_timing(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  if (header != std::vector<std::string>{"iter", "wall_ms"}) fail(ErrorKind::kIo, path + ": bad timing header");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double v = 0.0;
    if (rows[r][0] != std::to_string(r + 1)) bad(path, r + 2, "iter must count up from 1");
    if (!parse_real(rows[r][1], v) || !(v >= 0.0)) bad(path, r + 2, "wall_ms must be a non-negative number");
  }
}

void validate_summary(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  const std::vector<std::string> expected = {"method",  "iter",    "seeds",    "best_median",
                                             "best_q1", "best_q3", "q2_median"};
  if (header != expected) fail(ErrorKind::kIo, path + ": bad summary header");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    try {
      method_from_string(f[0]);
    } catch (const Error&) {
      bad(path, r + 2, "unknown method '" + f[0] + "'");
    }
    double v = 0.0;
    for (std::size_t k = 1; k < f.size(); ++k) {
      if (!parse_real(f[k], v)) bad(path, r + 2, "field '" + header[k] + "' is not a number");
    }
    double q1 = 0.0;
    double med = 0.0;
    double q3 = 0.0;
    parse_real(f[3], med);
    parse_real(f[4], q1);
    parse_real(f[5], q3);
    if (!(q1 <= med && med <= q3)) bad(path, r + 2, "quartiles out of order");
  }
}

void validate_run_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kIo, path + ": " + e.what());
  }
  for (const char* key : {"schema_version", "library_version", "method", "seed", "config", "environment",
                          "initial_design", "initial_values", "stop_reason", "error", "evaluations"}) {
    if (!doc.contains(key)) fail(ErrorKind::kIo, path + ": missing key '" + key + "'");
  }
  if (doc["schema_version"] != kConfigSchemaVersion) fail(ErrorKind::kIo, path + ": unsupported schema_version");
  const json& cfg = doc["config"];
  for (const char* key : {"schema_version", "mode", "objective", "bounds", "n0", "iterations", "methods", "seeds",
                          "surrogate", "criteria", "rho", "pool_per_dim", "test_set"}) {
    if (!cfg.contains(key)) fail(ErrorKind::kIo, path + ": config echo is missing '" + key + "'");
  }
  if (!cfg["criteria"].contains(doc["method"].get<std::string>())) {
    fail(ErrorKind::kIo, path + ": config echo has no criterion for the run's method");
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const ExperimentRecord& rec, std::size_t dim) {
  out << "iter";
  for (std::size_t j = 0; j < dim; ++j) out << ",x" << j + 1;
  out << ",y,best_y,criterion_value,q2,rmse_paper,rmse_sqrt,rrmse,raae,accuracy\n";
  for (const auto& it : rec.iterations) {
    out << it.iter;
    for (Eigen::Index j = 0; j < it.x.size(); ++j) out << ',' << format_double(it.x(j));
    out << ',' << format_double(it.y) << ',' << format_double(it.best_y) << ',' << format_double(it.criterion_value);
    if (it.metrics) {
      const auto& m = *it.metrics;
      out << ',' << format_double(m.q2) << ',' << format_double(m.rmse_paper) << ',' << format_double(m.rmse_sqrt)
          << ',' << format_double(m.rrmse) << ',' << format_double(m.raae);
    } else {
      out << ",,,,,";
    }
    out << ',' << opt(it.accuracy) << '\n';
  }
}

void write_timing_csv(std::ostream& out, const ExperimentRecord& rec) {
  out << "iter,wall_ms\n";
  for (const auto& it : rec.iterations) out << it.iter << ',' << format_double(it.wall_ms) << '\n';
}

json run_json(const ExperimentRecord& rec, const json& config_echo) {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["library_version"] = kLibraryVersion;
  doc["name"] = rec.name;
  doc["method"] = to_string(rec.method);
  doc["seed"] = rec.seed;
  doc["config"] = config_echo;
  doc["environment"] = environment_stamp();
  json design = json::array();
  for (Eigen::Index i = 0; i < rec.initial_design.rows(); ++i) design.push_back(point_json(rec.initial_design.row(i)));
  doc["initial_design"] = design;
  doc["initial_values"] = point_json(rec.initial_values);
  doc["initial_metrics"] = metrics_json(rec.initial_metrics);
  doc["initial_accuracy"] = rec.initial_accuracy ? json(*rec.initial_accuracy) : json(nullptr);
  doc["iterations_completed"] = rec.iterations.size();
  doc["evaluations"] = static_cast<std::size_t>(rec.values.size());
  doc["best"] = rec.values.size() > 0 ? json(rec.best()) : json(nullptr);
  doc["stop_reason"] = rec.stop_reason;
  doc["error"] = rec.error;
  doc["final_model"] = rec.final_model;
  return doc;
}

void write_summary_csv(std::ostream& out, const std::map<std::string, std::vector<ExperimentRecord>>& records) {
  out << "method,iter,seeds,best_median,best_q1,best_q3,q2_median\n";
  for (const auto& [method, runs] : records) {
    std::size_t max_iter = 0;
    for (const auto& r : runs) max_iter = std::max(max_iter, r.iterations.size());
    for (std::size_t k = 0; k < max_iter; ++k) {
      std::vector<double> best;
      std::vector<double> q2;
      for (const auto& r : runs) {
        if (k >= r.iterations.size()) continue;
        best.push_back(r.iterations[k].best_y);
        if (r.iterations[k].metrics) q2.push_back(r.iterations[k].metrics->q2);
      }
      const double q2_median = q2.empty() ? std::numeric_limits<double>::quiet_NaN() : quantile(q2, 0.5);
      out << method << ',' << k + 1 << ',' << best.size() << ',' << format_double(quantile(best, 0.5)) << ','
          << format_double(quantile(best, 0.25)) << ',' << format_double(quantile(best, 0.75)) << ','
          << format_double(q2_median) << '\n';
    }
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorKind::kInvalidArgument, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::kInvalidArgument, "quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

json environment_stamp() {
  json env;
  env["library_version"] = kLibraryVersion;
#if defined(__VERSION__)
  env["compiler"] = __VERSION__;
#endif
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  env["gsl"] = GSL_VERSION;
  env["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  utsname u{};
  if (uname(&u) == 0) env["platform"] = std::string(u.sysname) + " " + u.machine;
  return env;
}

void validate_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) fail(ErrorKind::kIo, "not a file: " + path);
  const std::string name = std::filesystem::path(path).filename().string();
  if (name == "trace.csv") {
    validate_trace(path);
  } else if (name == "timing.csv") {
    validate_timing(path);
  } else if (name == "summary.csv") {
    validate_summary(path);
  } else if (name == "run.json") {
    validate_run_json(path);
  } else if (std::filesystem::path(path).extension() == ".csv") {
    try {
      read_design_csv(path);
    } catch (const Error& e) {
      fail(ErrorKind::kIo, e.what());
    }
  } else {
    fail(ErrorKind::kIo, "unrecognised file type: " + path);
  }
}

}  // namespace updist
