#pragma once

#include "updist/core.hpp"
#include "updist/criteria.hpp"
#include "updist/doe.hpp"
#include "updist/metrics.hpp"
#include "updist/surrogate.hpp"
#include "updist/updist.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace updist {

using Objective = std::function<double(const Point&)>;

enum class Method {
  kUpEgo,            ///< optimization, empirical EI + distance penalty
  kEgo,              ///< optimization, Gaussian EI of the kriging master
  kUpSmart,          ///< refinement, UP variance + distance penalty
  kKrigingVariance,  ///< refinement, kriging variance
  kInversion,        ///< contour estimation with an inversion criterion
};

std::string to_string(Method m);
Method method_from_string(const std::string& name);
/// Criterion a method maximizes unless the run overrides it.
CriterionKind default_criterion(Method m);

struct InnerOptConfig {
  /// Candidate pool size is pool_per_dim * p.
  std::size_t pool_per_dim = 200;
  std::size_t polish_starts = 5;
  std::size_t polish_iterations = 100;
  std::uint64_t seed = 0;
};

struct Proposal {
  Point x;
  double value = 0.0;
};

using CriterionFn = std::function<double(const Point&)>;

/// Maximizes the criterion over the box: seeded LHS pool, then Nelder-Mead
/// polish from the best pool entries. Points within the duplicate tolerance
/// of `design` (raw coordinates) are never returned; throws when every
/// candidate is a duplicate.
Proposal propose_next(const CriterionFn& criterion, const Bounds& bounds, const PointSet& design,
                      const InnerOptConfig& cfg);
/// Same with an explicit candidate pool (raw coordinates, one per row).
Proposal propose_from_pool(const CriterionFn& criterion, const Bounds& bounds, const PointSet& design,
                           const PointSet& pool, const InnerOptConfig& cfg);

struct RunConfig {
  std::string name = "run";
  Method method = Method::kUpEgo;
  Objective objective;
  Bounds bounds;
  /// Used instead of an LHS when set (raw coordinates).
  std::optional<PointSet> initial_design;
  std::size_t n0 = 10;
  std::size_t maximin_iters = 1000;
  SurrogateSpec surrogate;
  CriterionSpec criterion;
  UpParams up;
  InnerOptConfig inner;
  std::size_t max_iterations = 10;
  /// Stop after `stagnation_window` iterations without an incumbent
  /// improvement larger than `stagnation_tol`. 0 disables.
  std::size_t stagnation_window = 0;
  double stagnation_tol = 0.0;
  /// Likelihood-search restarts after the first fit (the previous optimum is
  /// always tried first).
  std::size_t sequential_restarts = 1;
  std::optional<TestSet> test_set;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IterationRecord {
  std::size_t iter = 0;
  Point x;
  double y = 0.0;
  double best_y = 0.0;
  double criterion_value = 0.0;
  std::optional<MetricSnapshot> metrics;
  /// Fraction of test points on the correct side of the threshold (inversion only).
  std::optional<double> accuracy;
  double wall_ms = 0.0;
};

struct ExperimentRecord {
  std::string name;
  Method method = Method::kUpEgo;
  std::uint64_t seed = 0;
  PointSet initial_design;
  Eigen::VectorXd initial_values;
  std::optional<MetricSnapshot> initial_metrics;
  std::optional<double> initial_accuracy;
  std::vector<IterationRecord> iterations;
  /// Final observation set (initial design plus every evaluated proposal).
  PointSet points;
  Eigen::VectorXd values;
  nlohmann::json final_model;
  std::string stop_reason;
  /// Empty on success.
  std::string error;

  bool failed() const { return !error.empty(); }
  double best() const { return values.minCoeff(); }
};

ExperimentRecord run_experiment(const RunConfig& cfg);
ExperimentRecord run_up_ego(RunConfig cfg);
ExperimentRecord run_up_smart(RunConfig cfg);
ExperimentRecord run_inversion(RunConfig cfg);
/// Kriging-variance refinement when `refinement`, Gaussian-EI EGO otherwise.
ExperimentRecord run_baseline(RunConfig cfg, bool refinement);

/// Initial design the run would use (deterministic in the seed).
PointSet initial_design(const RunConfig& cfg);

}  // namespace updist
