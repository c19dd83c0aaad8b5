#include "updist/engine.hpp"

#include "updist/error.hpp"
#include "updist/minimize.hpp"
#include "updist/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace updist {

namespace {

struct MethodName {
  const char* name;
  Method method;
};

constexpr MethodName kMethods[] = {{"up_ego", Method::kUpEgo},
                                   {"ego", Method::kEgo},
                                   {"up_smart", Method::kUpSmart},
                                   {"kriging_variance", Method::kKrigingVariance},
                                   {"inversion", Method::kInversion}};

std::string describe_point(const Point& x) {
  std::ostringstream out;
  out << '(';
  for (Eigen::Index j = 0; j < x.size(); ++j) out << (j ? ", " : "") << format_double(x(j));
  out << ')';
  return out.str();
}

struct FitState {
  ModelPtr master;
  std::shared_ptr<const CvEnsemble> cv;
  std::optional<UpPredictor> up;
};

FitState fit_state(const RunConfig& cfg, const CriterionSpec& crit, const Dataset& data, std::size_t iter,
                   const FitState* previous) {
  SurrogateSpec spec = cfg.surrogate;
  auto seed_kriging = [&](KrigingParams& k, std::uint64_t tag) {
    k.seed = derive_seed(cfg.seed, 2000 + 97 * iter + tag);
    if (iter > 0) k.restarts = cfg.sequential_restarts;
  };
  if (spec.family == Family::kKriging) {
    seed_kriging(spec.kriging, 0);
    if (previous != nullptr) {
      if (const auto* k = dynamic_cast<const KrigingModel*>(previous->master.get())) {
        spec.kriging.warm_start = k->log_lengthscales();
      }
    }
  }
  for (std::size_t m = 0; m < spec.members.size(); ++m) {
    if (spec.members[m].family == Family::kKriging) seed_kriging(spec.members[m].kriging, m + 1);
  }

  FitState state;
  state.master = fit(spec, data);
  if (crit.uses_up()) {
    state.cv = std::make_shared<const CvEnsemble>(fit_loo_submodels(spec, data, state.master));
    state.up.emplace(state.cv, cfg.up);
  }
  return state;
}

double band_accuracy(const Model& model, const TestSet& test, double threshold) {
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < test.points.rows(); ++i) {
    const bool predicted = model.predict_mean(test.points.row(i).transpose()) >= threshold;
    const bool actual = test.values(i) >= threshold;
    if (predicted == actual) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double evaluate_objective(const Objective& f, const Point& x, const std::string& where) {
  double y = 0.0;
  try {
    y = f(x);
  } catch (const Error& e) {
    fail(ErrorKind::kRun, where + ": " + e.what());
  } catch (const std::exception& e) {
    fail(ErrorKind::kRun, where + ": objective failed: " + e.what());
  }
  if (!std::isfinite(y)) fail(ErrorKind::kRun, where + ": objective returned a non-finite value at " + describe_point(x));
  return y;
}

}  // namespace

std::string to_string(Method m) {
  for (const auto& e : kMethods) {
    if (e.method == m) return e.name;
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  for (const auto& e : kMethods) {
    if (name == e.name) return e.method;
  }
  fail(ErrorKind::kConfig, "unknown method '" + name + "'");
}

CriterionKind default_criterion(Method m) {
  switch (m) {
    case Method::kUpEgo: return CriterionKind::kUpEi;
    case Method::kEgo: return CriterionKind::kGaussianEi;
    case Method::kUpSmart: return CriterionKind::kUpSmart;
    case Method::kKrigingVariance: return CriterionKind::kKrigingVariance;
    case Method::kInversion: return CriterionKind::kBichon;
  }
  return CriterionKind::kUpEi;
}

Proposal propose_from_pool(const CriterionFn& criterion, const Bounds& bounds, const PointSet& design,
                           const PointSet& pool, const InnerOptConfig& cfg) {
  const std::size_t p = bounds.dim();
  const PointSet design_s = scale_rows_to_unit(design, bounds);
  const PointSet pool_s = scale_rows_to_unit(pool, bounds);
  const Bounds unit = Bounds::unit(p);
  auto is_duplicate = [&](const Point& u) { return min_dist(u, design_s) < kDuplicateTolerance; };

  std::vector<double> values(static_cast<std::size_t>(pool.rows()));
  for (Eigen::Index i = 0; i < pool.rows(); ++i) values[static_cast<std::size_t>(i)] = criterion(pool.row(i).transpose());

  std::optional<Proposal> best;
  auto offer = [&](const Point& u, double value) {
    if (!std::isfinite(value) || is_duplicate(u)) return;
    if (!best || value > best->value) best = Proposal{unscale_from_unit(u, bounds), value};
  };
  for (Eigen::Index i = 0; i < pool.rows(); ++i) offer(pool_s.row(i).transpose(), values[static_cast<std::size_t>(i)]);

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  const double step = 1.0 / std::pow(static_cast<double>(std::max<Eigen::Index>(pool.rows(), 1)), 1.0 / static_cast<double>(p));
  const std::size_t starts = std::min(cfg.polish_starts, order.size());
  for (std::size_t k = 0; k < starts && cfg.polish_iterations > 0; ++k) {
    const Point start = pool_s.row(static_cast<Eigen::Index>(order[k])).transpose();
    auto negated = [&](const Eigen::VectorXd& u) {
      const Point c = unit.clamp(u);
      return -criterion(unscale_from_unit(c, bounds)) + (u - c).squaredNorm();
    };
    const MinimizeResult r = nelder_mead(negated, start, step, cfg.polish_iterations, 1e-8);
    const Point u = unit.clamp(r.x);
    offer(u, criterion(unscale_from_unit(u, bounds)));
  }

  if (!best) fail(ErrorKind::kRun, "every candidate coincides with an existing design point");
  return *best;
}

Proposal propose_next(const CriterionFn& criterion, const Bounds& bounds, const PointSet& design,
                      const InnerOptConfig& cfg) {
  DoeConfig doe{std::max<std::size_t>(cfg.pool_per_dim * bounds.dim(), 2), bounds.dim(), cfg.seed, 0};
  return propose_from_pool(criterion, bounds, design, lhs(doe, bounds), cfg);
}

void RunConfig::validate() const {
  if (!objective) fail(ErrorKind::kConfig, "run: objective missing");
  if (bounds.dim() == 0) fail(ErrorKind::kConfig, "run: bounds missing");
  if (max_iterations < 1) fail(ErrorKind::kConfig, "run: iterations must be >= 1");
  const std::size_t n0_eff = initial_design ? static_cast<std::size_t>(initial_design->rows()) : n0;
  const bool needs_up = method == Method::kUpEgo || method == Method::kUpSmart || method == Method::kInversion;
  if (needs_up && n0_eff < 3) fail(ErrorKind::kConfig, "run: UP-based methods need n0 >= 3");
  if (n0_eff < 2) fail(ErrorKind::kConfig, "run: n0 must be >= 2");
  if ((method == Method::kEgo || method == Method::kKrigingVariance) && surrogate.family != Family::kKriging) {
    fail(ErrorKind::kConfig, "run: method " + to_string(method) + " requires the kriging surrogate");
  }
  if (method == Method::kInversion && !criterion.inversion()) {
    fail(ErrorKind::kConfig, "run: inversion needs one of tmse, tmse_reg, bichon, ranjan");
  }
  if (up.rho_policy == RhoPolicy::kFixed && !(up.rho > 0.0)) fail(ErrorKind::kConfig, "run: fixed rho must be > 0");
  if (inner.pool_per_dim == 0) fail(ErrorKind::kConfig, "run: pool_per_dim must be positive");
  surrogate.validate();
  criterion.validate();
}

PointSet initial_design(const RunConfig& cfg) {
  if (cfg.initial_design) return *cfg.initial_design;
  return lhs(DoeConfig{cfg.n0, cfg.bounds.dim(), derive_seed(cfg.seed, 0), cfg.maximin_iters}, cfg.bounds);
}

ExperimentRecord run_experiment(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  if (cfg.method != Method::kInversion) cfg.criterion.kind = default_criterion(cfg.method);
  cfg.validate();

  ExperimentRecord rec;
  rec.name = cfg.name;
  rec.method = cfg.method;
  rec.seed = cfg.seed;
  rec.initial_design = initial_design(cfg);
  rec.initial_values = Eigen::VectorXd::Constant(rec.initial_design.rows(), std::numeric_limits<double>::quiet_NaN());
  std::optional<Dataset> initial;
  std::optional<FitState> initial_state;
  try {
    for (Eigen::Index i = 0; i < rec.initial_design.rows(); ++i) {
      rec.initial_values(i) = evaluate_objective(cfg.objective, rec.initial_design.row(i).transpose(),
                                                 "initial design point " + std::to_string(i + 1));
    }
    initial.emplace(rec.initial_design, rec.initial_values, cfg.bounds);
    initial_state.emplace(fit_state(cfg, cfg.criterion, *initial, 0, nullptr));
    if (cfg.test_set) {
      rec.initial_metrics = evaluate_metrics(*initial_state->master, *cfg.test_set);
      if (cfg.method == Method::kInversion) {
        rec.initial_accuracy = band_accuracy(*initial_state->master, *cfg.test_set, cfg.criterion.threshold);
      }
    }
  } catch (const std::exception& e) {
    const std::string what = e.what();
    rec.error = what.rfind("initial", 0) == 0 ? what : "initial design: " + what;
    rec.stop_reason = "error";
    rec.points = rec.initial_design.topRows(0);
    rec.values.resize(0);
    rec.final_model = nullptr;
    return rec;
  }
  Dataset data = std::move(*initial);
  FitState state = std::move(*initial_state);

  double incumbent = data.min_value();
  std::size_t since_improvement = 0;
  rec.stop_reason = "iteration budget";
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const ResolvedCriterion crit = resolve(cfg.criterion, data);
      const UpPredictor* up = state.up ? &*state.up : nullptr;
      const Model& master = *state.master;
      InnerOptConfig inner = cfg.inner;
      inner.seed = derive_seed(cfg.seed, 1000 + it);
      const Proposal prop = propose_next([&](const Point& x) { return evaluate(crit, x, up, master); }, cfg.bounds,
                                         data.points(), inner);
      const double y = evaluate_objective(cfg.objective, prop.x, "iteration " + std::to_string(it));
      data = data.with(prop.x, y);
      state = fit_state(cfg, cfg.criterion, data, it, &state);

      IterationRecord row;
      row.iter = it;
      row.x = prop.x;
      row.y = y;
      row.best_y = data.min_value();
      row.criterion_value = prop.value;
      if (cfg.test_set) {
        row.metrics = evaluate_metrics(*state.master, *cfg.test_set);
        if (cfg.method == Method::kInversion) row.accuracy = band_accuracy(*state.master, *cfg.test_set, cfg.criterion.threshold);
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rec.iterations.push_back(std::move(row));
    } catch (const std::exception& e) {
      const std::string what = e.what();
      rec.error = what.rfind("iteration", 0) == 0 ? what : "iteration " + std::to_string(it) + ": " + what;
      rec.stop_reason = "error";
      break;
    }

    if (cfg.stagnation_window > 0) {
      if (incumbent - data.min_value() > cfg.stagnation_tol) {
        since_improvement = 0;
      } else if (++since_improvement >= cfg.stagnation_window) {
        rec.stop_reason = "stagnation";
        incumbent = std::min(incumbent, data.min_value());
        break;
      }
      incumbent = std::min(incumbent, data.min_value());
    }
  }

  rec.points = data.points();
  rec.values = data.values();
  rec.final_model = state.master->describe();
  return rec;
}

ExperimentRecord run_up_ego(RunConfig cfg) {
  cfg.method = Method::kUpEgo;
  return run_experiment(cfg);
}

ExperimentRecord run_up_smart(RunConfig cfg) {
  cfg.method = Method::kUpSmart;
  return run_experiment(cfg);
}

ExperimentRecord run_inversion(RunConfig cfg) {
  cfg.method = Method::kInversion;
  return run_experiment(cfg);
}

ExperimentRecord run_baseline(RunConfig cfg, bool refinement) {
  cfg.method = refinement ? Method::kKrigingVariance : Method::kEgo;
  return run_experiment(cfg);
}

}  // namespace updist
