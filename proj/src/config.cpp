#include "updist/benchfns.hpp"
#include "updist/campaign.hpp"
#include "updist/doe.hpp"
#include "updist/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace updist {

namespace {

using nlohmann::json;

struct TableRow {
  const char* name;
  std::size_t n0;
  std::size_t iterations;
  std::size_t test_points;  // grid points per axis, or LHS size when the grid would be too large
  bool test_grid;
};

// Benchmark protocols: refinement (initial points, added points, test set)
// and optimization (initial points, iterations).
constexpr TableRow kRefineTable[] = {
    {"viana", 5, 7, 500, true},
    {"branin", 10, 10, 40, true},
    {"camel", 20, 10, 40, true},
    {"hartmann6", 60, 150, 10000, false},
};
constexpr TableRow kOptimizeTable[] = {
    {"branin", 5, 40, 0, false},
    {"ackley", 10, 30, 0, false},
    {"camel", 10, 30, 0, false},
    {"hartmann6", 20, 40, 0, false},
};

constexpr std::uint64_t kDefaultTestSeed = 20160502;

const std::set<std::string> kKnownKeys = {
    "schema_version", "name",          "objective",         "external_command", "timeout_s",
    "retries",        "mode",          "bounds",            "methods",          "n0",
    "iterations",     "seeds",         "seed_count",        "seed_start",       "jobs",
    "surrogate",      "criterion",     "delta_pct",         "threshold",        "epsilon_pct",
    "sigma_eps_pct",  "alpha",         "band_scale",        "rho",              "pool_per_dim",
    "polish_starts",  "polish_iterations", "maximin_iters", "stagnation_window", "stagnation_tol",
    "sequential_restarts", "test_set", "initial_design",
};

template <typename T>
T get(const json& doc, const char* key, const T& fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kConfig, std::string("config key '") + key + "' has the wrong type");
  }
}

template <typename T>
T require(const json& doc, const char* key) {
  if (!doc.contains(key)) fail(ErrorKind::kConfig, std::string("config key '") + key + "' is required");
  return get<T>(doc, key, T{});
}

const TableRow* find_row(const std::string& mode, const std::string& objective) {
  if (mode == "refine") {
    for (const auto& r : kRefineTable) {
      if (objective == r.name) return &r;
    }
  }
  if (mode == "optimize") {
    for (const auto& r : kOptimizeTable) {
      if (objective == r.name) return &r;
    }
  }
  return nullptr;
}

Bounds parse_bounds(const json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::kConfig, "config key 'bounds' must be a list of [lo, hi] pairs");
  Eigen::VectorXd lo(static_cast<Eigen::Index>(j.size()));
  Eigen::VectorXd hi(lo.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& pair = j[k];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      fail(ErrorKind::kConfig, "config key 'bounds' must be a list of [lo, hi] pairs");
    }
    lo(static_cast<Eigen::Index>(k)) = pair[0].get<double>();
    hi(static_cast<Eigen::Index>(k)) = pair[1].get<double>();
  }
  try {
    return Bounds(lo, hi);
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, std::string("config key 'bounds': ") + e.what());
  }
}

json bounds_json(const Bounds& b) {
  json out = json::array();
  for (std::size_t j = 0; j < b.dim(); ++j) {
    out.push_back({b.lower()(static_cast<Eigen::Index>(j)), b.upper()(static_cast<Eigen::Index>(j))});
  }
  return out;
}

std::vector<std::string> parse_command(const json& j) {
  std::vector<std::string> argv;
  if (j.is_string()) {
    std::istringstream in(j.get<std::string>());
    std::string word;
    while (in >> word) argv.push_back(word);
  } else if (j.is_array()) {
    for (const auto& a : j) {
      if (!a.is_string()) fail(ErrorKind::kConfig, "config key 'external_command' must hold strings");
      argv.push_back(a.get<std::string>());
    }
  }
  if (argv.empty()) fail(ErrorKind::kConfig, "config key 'external_command' is empty");
  return argv;
}

}  // namespace

CampaignConfig parse_campaign(const json& doc, const std::string& subcommand) {
  if (!doc.is_object()) fail(ErrorKind::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) fail(ErrorKind::kConfig, "unknown config key '" + key + "'");
  }
  const int version = require<int>(doc, "schema_version");
  if (version != kConfigSchemaVersion) {
    fail(ErrorKind::kConfig, "config key 'schema_version': expected " + std::to_string(kConfigSchemaVersion));
  }

  CampaignConfig cfg;
  json echo;
  echo["schema_version"] = version;
  cfg.name = get<std::string>(doc, "name", "campaign");
  echo["name"] = cfg.name;

  const bool external = subcommand == "external";
  if (!external && subcommand != "refine" && subcommand != "optimize" && subcommand != "invert") {
    fail(ErrorKind::kConfig, "unknown campaign subcommand '" + subcommand + "'");
  }
  cfg.mode = external ? get<std::string>(doc, "mode", "optimize") : subcommand;
  if (!external && doc.contains("mode") && doc["mode"] != cfg.mode) {
    fail(ErrorKind::kConfig, "config key 'mode' conflicts with the '" + subcommand + "' subcommand");
  }
  if (cfg.mode != "refine" && cfg.mode != "optimize" && cfg.mode != "invert") {
    fail(ErrorKind::kConfig, "config key 'mode' must be refine, optimize or invert");
  }
  echo["mode"] = cfg.mode;

  // Objective.
  Objective objective;
  Bounds bounds;
  std::string objective_name;
  if (external) {
    if (doc.contains("objective")) fail(ErrorKind::kConfig, "config key 'objective' is not used by 'external'; set 'external_command'");
    ExternalCommand cmd;
    cmd.argv = parse_command(require<json>(doc, "external_command"));
    cmd.timeout_s = get<double>(doc, "timeout_s", 60.0);
    cmd.retries = get<std::size_t>(doc, "retries", 0);
    if (!(cmd.timeout_s > 0.0)) fail(ErrorKind::kConfig, "config key 'timeout_s' must be > 0");
    bounds = parse_bounds(require<json>(doc, "bounds"));
    objective = [cmd](const Point& x) { return evaluate_external(cmd, x); };
    objective_name = "external";
    echo["external_command"] = cmd.argv;
    echo["timeout_s"] = cmd.timeout_s;
    echo["retries"] = cmd.retries;
  } else {
    for (const char* k : {"external_command", "timeout_s", "retries"}) {
      if (doc.contains(k)) fail(ErrorKind::kConfig, std::string("config key '") + k + "' is only valid for 'external'");
    }
    objective_name = require<std::string>(doc, "objective");
    Benchmark bench;
    try {
      bench = benchmark_by_name(objective_name);
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, std::string("config key 'objective': ") + e.what());
    }
    bounds = doc.contains("bounds") ? parse_bounds(doc["bounds"]) : bench.bounds;
    if (bounds.dim() != bench.dim()) fail(ErrorKind::kConfig, "config key 'bounds' has the wrong dimension");
    objective = bench.evaluate;
  }
  echo["objective"] = objective_name;
  echo["bounds"] = bounds_json(bounds);
  const std::size_t p = bounds.dim();

  // Protocol sizes.
  const TableRow* row = external ? nullptr : find_row(cfg.mode, objective_name);
  const std::size_t n0 = row ? get<std::size_t>(doc, "n0", row->n0) : require<std::size_t>(doc, "n0");
  const std::size_t iterations =
      row ? get<std::size_t>(doc, "iterations", row->iterations) : require<std::size_t>(doc, "iterations");
  echo["n0"] = n0;
  echo["iterations"] = iterations;

  // Methods.
  std::vector<std::string> methods;
  if (doc.contains("methods")) {
    methods = get<std::vector<std::string>>(doc, "methods", {});
  } else if (cfg.mode == "refine") {
    methods = {"up_smart", "kriging_variance"};
  } else if (cfg.mode == "optimize") {
    methods = {"up_ego", "ego"};
  } else {
    methods = {"inversion"};
  }
  if (methods.empty()) fail(ErrorKind::kConfig, "config key 'methods' is empty");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!seen.insert(m).second) fail(ErrorKind::kConfig, "config key 'methods' lists '" + m + "' twice");
    const Method method = method_from_string(m);
    const bool ok = (cfg.mode == "refine" && (method == Method::kUpSmart || method == Method::kKrigingVariance)) ||
                    (cfg.mode == "optimize" && (method == Method::kUpEgo || method == Method::kEgo)) ||
                    (cfg.mode == "invert" && method == Method::kInversion);
    if (!ok) fail(ErrorKind::kConfig, "config key 'methods': '" + m + "' does not belong to mode " + cfg.mode);
  }
  echo["methods"] = methods;

  // Seeds.
  if (doc.contains("seeds")) {
    if (doc.contains("seed_count") || doc.contains("seed_start")) {
      fail(ErrorKind::kConfig, "config key 'seeds' cannot be combined with 'seed_count'/'seed_start'");
    }
    cfg.seeds = get<std::vector<std::uint64_t>>(doc, "seeds", {});
  } else {
    const auto count = get<std::size_t>(doc, "seed_count", 1);
    const auto start = get<std::uint64_t>(doc, "seed_start", 1);
    for (std::size_t k = 0; k < count; ++k) cfg.seeds.push_back(start + k);
  }
  if (cfg.seeds.empty()) fail(ErrorKind::kConfig, "config key 'seeds' is empty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    fail(ErrorKind::kConfig, "config key 'seeds' has duplicates");
  }
  echo["seeds"] = cfg.seeds;
  cfg.jobs = get<std::size_t>(doc, "jobs", 1);
  if (cfg.jobs == 0) fail(ErrorKind::kConfig, "config key 'jobs' must be >= 1");
  echo["jobs"] = cfg.jobs;

  // Surrogate.
  SurrogateSpec surrogate;
  if (doc.contains("surrogate")) {
    try {
      surrogate = surrogate_spec_from_json(doc["surrogate"]);
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, std::string("config key 'surrogate': ") + e.what());
    }
  }
  echo["surrogate"] = to_json(surrogate);

  // Criterion parameters.
  CriterionSpec crit;
  if (cfg.mode == "invert") {
    crit.kind = criterion_kind_from_string(get<std::string>(doc, "criterion", "bichon"));
    if (!crit.inversion()) fail(ErrorKind::kConfig, "config key 'criterion' must be an inversion criterion");
    crit.threshold = require<double>(doc, "threshold");
  } else {
    if (doc.contains("criterion")) fail(ErrorKind::kConfig, "config key 'criterion' is only valid for 'invert'; methods fix it");
    if (doc.contains("threshold")) fail(ErrorKind::kConfig, "config key 'threshold' is only valid for 'invert'");
  }
  crit.delta_pct = get<double>(doc, "delta_pct", crit.delta_pct);
  crit.epsilon_pct = get<double>(doc, "epsilon_pct", crit.epsilon_pct);
  crit.sigma_eps_pct = get<double>(doc, "sigma_eps_pct", crit.sigma_eps_pct);
  crit.alpha = get<double>(doc, "alpha", crit.alpha);
  const std::string band = get<std::string>(doc, "band_scale", "stddev");
  if (band == "stddev") {
    crit.band_scale = BandScale::kStdDev;
  } else if (band == "variance") {
    crit.band_scale = BandScale::kVariance;
  } else {
    fail(ErrorKind::kConfig, "config key 'band_scale' must be stddev or variance");
  }
  try {
    crit.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, e.what());
  }

  UpParams up;
  if (doc.contains("rho")) {
    const json& r = doc["rho"];
    if (r.is_string() && r.get<std::string>() == "dbar") {
      up.rho_policy = RhoPolicy::kDbar;
    } else if (r.is_number() && r.get<double>() > 0.0) {
      up.rho_policy = RhoPolicy::kFixed;
      up.rho = r.get<double>();
    } else {
      fail(ErrorKind::kConfig, "config key 'rho' must be \"dbar\" or a positive number");
    }
  }
  echo["rho"] = up.rho_policy == RhoPolicy::kDbar ? json("dbar") : json(up.rho);

  InnerOptConfig inner;
  inner.pool_per_dim = get<std::size_t>(doc, "pool_per_dim", inner.pool_per_dim);
  inner.polish_starts = get<std::size_t>(doc, "polish_starts", inner.polish_starts);
  inner.polish_iterations = get<std::size_t>(doc, "polish_iterations", inner.polish_iterations);
  if (inner.pool_per_dim == 0) fail(ErrorKind::kConfig, "config key 'pool_per_dim' must be >= 1");
  echo["pool_per_dim"] = inner.pool_per_dim;
  echo["polish_starts"] = inner.polish_starts;
  echo["polish_iterations"] = inner.polish_iterations;

  const auto maximin_iters = get<std::size_t>(doc, "maximin_iters", 1000);
  const auto stagnation_window = get<std::size_t>(doc, "stagnation_window", 0);
  const auto stagnation_tol = get<double>(doc, "stagnation_tol", 0.0);
  const auto sequential_restarts = get<std::size_t>(doc, "sequential_restarts", 1);
  echo["maximin_iters"] = maximin_iters;
  echo["stagnation_window"] = stagnation_window;
  echo["stagnation_tol"] = stagnation_tol;
  echo["sequential_restarts"] = sequential_restarts;

  std::optional<PointSet> design;
  if (doc.contains("initial_design")) {
    const auto path = get<std::string>(doc, "initial_design", "");
    try {
      design = read_design_csv(path);
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, std::string("config key 'initial_design': ") + e.what());
    }
    if (static_cast<std::size_t>(design->cols()) != p) fail(ErrorKind::kConfig, "config key 'initial_design' has the wrong dimension");
    echo["initial_design"] = path;
  }

  // Test set.
  std::optional<TestSet> test;
  json test_echo = "none";
  json test_doc = doc.contains("test_set") ? doc["test_set"] : json();
  if (test_doc.is_null() && row != nullptr && row->test_points > 0) {
    test_doc = row->test_grid ? json{{"kind", "grid"}, {"n_per_axis", row->test_points}}
                              : json{{"kind", "lhs"}, {"n", row->test_points}};
  }
  if (test_doc.is_object()) {
    const std::string kind = get<std::string>(test_doc, "kind", "");
    PointSet pts;
    try {
      if (kind == "grid") {
        const auto per_axis = get<std::size_t>(test_doc, "n_per_axis", 40);
        pts = full_grid(per_axis, bounds);
        test_echo = {{"kind", "grid"}, {"n_per_axis", per_axis}};
      } else if (kind == "lhs") {
        const auto n = get<std::size_t>(test_doc, "n", 1000);
        const auto seed = get<std::uint64_t>(test_doc, "seed", kDefaultTestSeed);
        pts = lhs(DoeConfig{n, p, seed, 0}, bounds);
        test_echo = {{"kind", "lhs"}, {"n", n}, {"seed", seed}};
      } else {
        fail(ErrorKind::kConfig, "config key 'test_set': kind must be grid or lhs");
      }
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, std::string("config key 'test_set': ") + e.what());
    }
    TestSet t;
    t.points = pts;
    t.values.resize(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) t.values(i) = objective(pts.row(i).transpose());
    test = std::move(t);
  } else if (!test_doc.is_null() && !(test_doc.is_string() && test_doc.get<std::string>() == "none")) {
    fail(ErrorKind::kConfig, "config key 'test_set' must be \"none\" or an object");
  }
  echo["test_set"] = test_echo;

  json criteria = json::object();
  for (const auto& m : methods) {
    RunConfig run;
    run.name = cfg.name;
    run.method = method_from_string(m);
    run.objective = objective;
    run.bounds = bounds;
    run.initial_design = design;
    run.n0 = design ? static_cast<std::size_t>(design->rows()) : n0;
    run.maximin_iters = maximin_iters;
    run.surrogate = surrogate;
    run.criterion = crit;
    if (run.method != Method::kInversion) run.criterion.kind = default_criterion(run.method);
    run.criterion = run.criterion.with_defaults();
    criteria[m] = to_json(run.criterion);
    run.up = up;
    run.inner = inner;
    run.max_iterations = iterations;
    run.stagnation_window = stagnation_window;
    run.stagnation_tol = stagnation_tol;
    run.sequential_restarts = sequential_restarts;
    run.test_set = test;
    try {
      run.validate();
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, e.what());
    }
    cfg.runs.push_back(std::move(run));
  }
  echo["criteria"] = std::move(criteria);
  cfg.echo = std::move(echo);
  return cfg;
}

CampaignConfig load_campaign(const std::string& path, const std::string& subcommand) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfig, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, path + ": " + e.what());
  }
  return parse_campaign(doc, subcommand);
}

}  // namespace updist
