#include <updist/updist.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRun = 1;
constexpr int kExitConfig = 2;

int exit_code(upd_status s) {
  switch (s) {
    case UPD_OK:
      return kExitOk;
    case UPD_ERR_CONFIG:
    case UPD_ERR_INVALID_ARGUMENT:
      return kExitConfig;
    default:
      return kExitRun;
  }
}

int report(upd_status s, const std::string& context) {
  if (s != UPD_OK) std::cerr << "updist " << context << ": " << upd_last_error() << "\n";
  return exit_code(s);
}

bool parse_bounds(const std::string& text, std::vector<double>& lower, std::vector<double>& upper) {
  std::istringstream in(text);
  std::string pair;
  while (std::getline(in, pair, ',')) {
    const auto colon = pair.find(':');
    if (colon == std::string::npos) return false;
    try {
      lower.push_back(std::stod(pair.substr(0, colon)));
      upper.push_back(std::stod(pair.substr(colon + 1)));
    } catch (const std::exception&) {
      return false;
    }
  }
  return !lower.empty();
}

std::string bounds_text(const std::vector<double>& lower, const std::vector<double>& upper) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t j = 0; j < lower.size(); ++j) out << (j ? "," : "") << lower[j] << ':' << upper[j];
  return out.str();
}

/// "x1,x2;x1,x2" or a CSV file with header x1..xp.
bool parse_points(const std::string& text, std::size_t p, std::vector<double>& flat) {
  std::string body = text;
  std::ifstream file(text);
  if (file) {
    std::string line;
    std::getline(file, line);
    body.clear();
    while (std::getline(file, line)) {
      if (!line.empty()) body += line + ";";
    }
  }
  std::istringstream rows(body);
  std::string row;
  while (std::getline(rows, row, ';')) {
    if (row.empty()) continue;
    std::istringstream cols(row);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(cols, cell, ',') && count < p) {
      try {
        flat.push_back(std::stod(cell));
      } catch (const std::exception&) {
        return false;
      }
      ++count;
    }
    if (count != p) return false;
  }
  return !flat.empty();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UP distribution benchmark runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(upd_version()));

  std::string config;
  std::string out;
  std::size_t jobs = 0;
  std::int64_t seed_offset = 0;
  std::vector<CLI::App*> campaigns;
  const std::pair<const char*, const char*> kinds[] = {
      {"refine", "run a refinement campaign"},
      {"optimize", "run an optimization campaign"},
      {"invert", "run an inversion campaign"},
      {"external", "run a campaign against an external objective command"},
  };
  for (const auto& [name, help] : kinds) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "campaign config (JSON)")->required();
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--jobs", jobs, "concurrent runs (0: use the config)");
    sub->add_option("--seed-offset", seed_offset, "added to every seed");
    campaigns.push_back(sub);
  }

  std::size_t doe_n = 0;
  std::size_t doe_dim = 0;
  std::uint64_t doe_seed = 1;
  std::string doe_bounds;
  std::string doe_objective;
  std::string doe_out;
  auto* doe = app.add_subcommand("doe", "write a maximin Latin hypercube design");
  doe->add_option("--n", doe_n, "number of points")->required();
  doe->add_option("--dim", doe_dim, "dimension (default [-1,1]^dim bounds)");
  doe->add_option("--seed", doe_seed, "random seed");
  doe->add_option("--bounds", doe_bounds, "lo:hi,lo:hi,...");
  doe->add_option("--objective", doe_objective, "benchmark to evaluate (adds a y column)");
  doe->add_option("--out", doe_out, "output CSV")->required();

  std::string eval_design;
  std::string eval_bounds;
  std::string eval_objective;
  std::string eval_model = "kriging";
  std::string eval_at;
  std::string eval_rho = "dbar";
  std::string eval_criterion;
  auto* eval = app.add_subcommand("eval", "fit a surrogate and print predictions and UP statistics");
  eval->add_option("--design", eval_design, "dataset CSV with header x1..xp,y")->required();
  eval->add_option("--bounds", eval_bounds, "lo:hi,lo:hi,...");
  eval->add_option("--objective", eval_objective, "benchmark whose domain gives the bounds");
  eval->add_option("--model", eval_model, "surrogate spec (family name or JSON)");
  eval->add_option("--at", eval_at, "query points \"x1,x2;x1,x2\" or a CSV file")->required();
  eval->add_option("--rho", eval_rho, "\"dbar\" or a positive number");
  eval->add_option("--criterion", eval_criterion, "criterion JSON, e.g. {\"criterion\":\"up_ei\"}");

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "check emitted files against their schema");
  validate->add_option("files", validate_paths, "trace.csv, timing.csv, summary.csv, run.json or design CSV")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (auto* sub : campaigns) {
    if (!sub->parsed()) continue;
    std::size_t runs = 0;
    std::size_t failures = 0;
    const upd_status s = upd_run_campaign(sub->get_name().c_str(), config.c_str(), out.c_str(), jobs, seed_offset,
                                          &runs, &failures);
    if (s == UPD_OK) std::cout << "updist " << sub->get_name() << ": " << runs << " runs written to " << out << "\n";
    return report(s, sub->get_name());
  }

  if (doe->parsed()) {
    std::vector<double> lower;
    std::vector<double> upper;
    if (!doe_objective.empty()) {
      std::size_t p = 0;
      upd_status s = upd_benchmark_info(doe_objective.c_str(), &p, nullptr, nullptr);
      if (s != UPD_OK) return report(s, "doe");
      lower.resize(p);
      upper.resize(p);
      upd_benchmark_info(doe_objective.c_str(), &p, lower.data(), upper.data());
    }
    if (!doe_bounds.empty()) {
      lower.clear();
      upper.clear();
      if (!parse_bounds(doe_bounds, lower, upper)) {
        std::cerr << "updist doe: cannot parse --bounds '" << doe_bounds << "'\n";
        return kExitConfig;
      }
    }
    if (lower.empty()) {
      if (doe_dim == 0) {
        std::cerr << "updist doe: give --dim, --bounds or --objective\n";
        return kExitConfig;
      }
      lower.assign(doe_dim, -1.0);
      upper.assign(doe_dim, 1.0);
    }
    if (doe_dim != 0 && doe_dim != lower.size()) {
      std::cerr << "updist doe: --dim does not match the bounds\n";
      return kExitConfig;
    }
    const std::size_t p = lower.size();
    std::vector<double> points(doe_n * p);
    upd_status s = upd_lhs(doe_n, p, doe_seed, lower.data(), upper.data(), points.data());
    if (s != UPD_OK) return report(s, "doe");
    std::vector<double> values;
    if (!doe_objective.empty()) {
      values.resize(doe_n);
      for (std::size_t i = 0; i < doe_n; ++i) {
        s = upd_benchmark_eval(doe_objective.c_str(), points.data() + i * p, p, &values[i]);
        if (s != UPD_OK) return report(s, "doe");
      }
    }
    s = upd_write_design_csv(doe_out.c_str(), points.data(), values.empty() ? nullptr : values.data(), doe_n, p);
    return report(s, "doe");
  }

  if (eval->parsed()) {
    std::string bounds = eval_bounds;
    if (bounds.empty() && !eval_objective.empty()) {
      std::size_t p = 0;
      upd_status s = upd_benchmark_info(eval_objective.c_str(), &p, nullptr, nullptr);
      if (s != UPD_OK) return report(s, "eval");
      std::vector<double> lower(p);
      std::vector<double> upper(p);
      upd_benchmark_info(eval_objective.c_str(), &p, lower.data(), upper.data());
      bounds = bounds_text(lower, upper);
    }
    if (bounds.empty()) {
      std::cerr << "updist eval: give --bounds or --objective\n";
      return kExitConfig;
    }
    upd_dataset* data = nullptr;
    upd_status s = upd_dataset_load_csv(eval_design.c_str(), bounds.c_str(), &data);
    if (s != UPD_OK) return report(s, "eval");
    std::size_t n = 0;
    std::size_t p = 0;
    upd_dataset_size(data, &n, &p);
    std::vector<double> queries;
    if (!parse_points(eval_at, p, queries)) {
      upd_dataset_free(data);
      std::cerr << "updist eval: cannot parse --at as points of dimension " << p << "\n";
      return kExitConfig;
    }
    upd_model* model = nullptr;
    s = upd_model_fit(data, eval_model.c_str(), &model);
    upd_dataset_free(data);
    if (s != UPD_OK) return report(s, "eval");
    upd_up* up = nullptr;
    const bool numeric_rho = eval_rho != "dbar";
    const std::string up_json = numeric_rho ? "{\"rho\":" + eval_rho + "}" : "{\"rho\":\"dbar\"}";
    s = upd_up_create(model, up_json.c_str(), &up);
    if (s != UPD_OK) {
      upd_model_free(model);
      return report(s, "eval");
    }
    std::ostringstream table;
    for (std::size_t j = 0; j < p; ++j) table << 'x' << j + 1 << ',';
    table << "mean,variance,up_mean,up_variance" << (eval_criterion.empty() ? "" : ",criterion") << "\n";
    for (std::size_t q = 0; q * p < queries.size() && s == UPD_OK; ++q) {
      const double* x = queries.data() + q * p;
      double mean = 0.0;
      double var = 0.0;
      double um = 0.0;
      double uv = 0.0;
      s = upd_model_predict(model, x, &mean, &var);
      if (s == UPD_OK) s = upd_up_eval(up, x, &um, &uv, nullptr, nullptr);
      double crit = 0.0;
      if (s == UPD_OK && !eval_criterion.empty()) s = upd_criterion_eval(up, eval_criterion.c_str(), x, &crit);
      if (s != UPD_OK) break;
      for (std::size_t j = 0; j < p; ++j) table << fmt(x[j]) << ',';
      table << fmt(mean) << ',' << fmt(var) << ',' << fmt(um) << ',' << fmt(uv);
      if (!eval_criterion.empty()) table << ',' << fmt(crit);
      table << "\n";
    }
    upd_up_free(up);
    upd_model_free(model);
    if (s != UPD_OK) return report(s, "eval");
    std::cout << table.str();
    return kExitOk;
  }

  if (validate->parsed()) {
    int code = kExitOk;
    for (const auto& path : validate_paths) {
      const upd_status s = upd_validate_file(path.c_str());
      if (s == UPD_OK) {
        std::cout << "ok " << path << "\n";
      } else {
        std::cerr << "invalid " << upd_last_error() << "\n";
        code = kExitRun;
      }
    }
    return code;
  }
  return kExitConfig;
}
