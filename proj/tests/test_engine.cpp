#include "updist/benchfns.hpp"
#include "updist/doe.hpp"
#include "updist/engine.hpp"
#include "updist/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace updist {
namespace {

RunConfig branin_run(Method method, std::size_t n0, std::size_t iterations, std::uint64_t seed) {
  const Benchmark b = benchmark_by_name("branin");
  RunConfig cfg;
  cfg.method = method;
  cfg.objective = b.evaluate;
  cfg.bounds = b.bounds;
  cfg.n0 = n0;
  cfg.max_iterations = iterations;
  cfg.seed = seed;
  cfg.inner.pool_per_dim = 100;
  return cfg;
}

TEST(ProposalTest, FindsTheMaximumOfAConcaveCriterion) {
  const Bounds b = Bounds::parse("-5:10,0:15");
  const Point target = (Point(2) << 2.0, 7.0).finished();
  PointSet design(1, 2);
  design << 0.0, 0.0;
  InnerOptConfig inner;
  inner.seed = 3;
  const Proposal p = propose_next([&](const Point& x) { return -(x - target).squaredNorm(); }, b, design, inner);
  EXPECT_LT((p.x - target).norm(), 1e-3);
  EXPECT_TRUE(b.contains(p.x));
}

TEST(ProposalTest, StaysInsideTheBoxForBoundaryMaxima) {
  const Bounds b = Bounds::unit(3);
  PointSet design(1, 3);
  design << 0.0, 0.0, 0.0;
  InnerOptConfig inner;
  const Proposal p = propose_next([](const Point& x) { return x.sum(); }, b, design, inner);
  EXPECT_TRUE(b.contains(p.x, 0.0));
  EXPECT_NEAR(p.value, 3.0, 1e-3);
}

TEST(ProposalTest, NeverReturnsADesignPoint) {
  const Bounds b = Bounds::unit(1);
  PointSet design(3, 1);
  design << -1.0, 0.0, 1.0;
  PointSet pool(4, 1);
  pool << -1.0, 0.0, 0.25, 1.0;
  InnerOptConfig inner;
  // The criterion peaks exactly on a design point.
  const Proposal p = propose_from_pool([](const Point& x) { return -std::abs(x(0)); }, b, design, pool, inner);
  EXPECT_GE(min_dist(p.x, design), kDuplicateTolerance);
}

TEST(ProposalTest, AllDuplicatePoolIsAnError) {
  const Bounds b = Bounds::unit(1);
  PointSet design(2, 1);
  design << -0.5, 0.5;
  InnerOptConfig inner;
  inner.polish_starts = 0;
  EXPECT_THROW(propose_from_pool([](const Point&) { return 1.0; }, b, design, design, inner), Error);
  PointSet pool(3, 1);
  pool << -0.5, 0.0, 0.5;
  const Proposal p = propose_from_pool([](const Point& x) { return -std::abs(x(0) - 0.5); }, b, design, pool, inner);
  EXPECT_EQ(p.x(0), 0.0);
}

TEST(RunTest, UpEgoTraceIsConsistent) {
  const ExperimentRecord rec = run_experiment(branin_run(Method::kUpEgo, 5, 6, 1));
  ASSERT_FALSE(rec.failed()) << rec.error;
  ASSERT_EQ(rec.iterations.size(), 6u);
  EXPECT_EQ(rec.points.rows(), 11);
  double best = rec.initial_values.minCoeff();
  for (std::size_t k = 0; k < rec.iterations.size(); ++k) {
    const auto& it = rec.iterations[k];
    EXPECT_EQ(it.iter, k + 1);
    EXPECT_EQ(it.y, branin(it.x(0), it.x(1)));
    best = std::min(best, it.y);
    EXPECT_EQ(it.best_y, best);
    EXPECT_GE(it.criterion_value, 0.0);
    EXPECT_FALSE(it.metrics.has_value());
  }
  EXPECT_GE(min_pairwise_dist(scale_rows_to_unit(rec.points, benchmark_by_name("branin").bounds)), kDuplicateTolerance);
  EXPECT_EQ(rec.stop_reason, "iteration budget");
}

TEST(RunTest, DeterministicInSeed) {
  const ExperimentRecord a = run_experiment(branin_run(Method::kUpSmart, 6, 4, 9));
  const ExperimentRecord b = run_experiment(branin_run(Method::kUpSmart, 6, 4, 9));
  ASSERT_EQ(a.points.rows(), b.points.rows());
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.values, b.values);
  const ExperimentRecord c = run_experiment(branin_run(Method::kUpSmart, 6, 4, 10));
  EXPECT_NE(a.points, c.points);
}

TEST(RunTest, EveryMethodRuns) {
  for (Method m : {Method::kUpEgo, Method::kEgo, Method::kUpSmart, Method::kKrigingVariance}) {
    const ExperimentRecord rec = run_experiment(branin_run(m, 5, 2, 2));
    EXPECT_FALSE(rec.failed()) << to_string(m) << ": " << rec.error;
    EXPECT_EQ(rec.iterations.size(), 2u);
  }
}

TEST(RunTest, MetricsAreRecordedWhenATestSetIsGiven) {
  RunConfig cfg = branin_run(Method::kUpSmart, 8, 3, 4);
  TestSet test;
  test.points = full_grid(10, cfg.bounds);
  test.values.resize(test.points.rows());
  for (Eigen::Index i = 0; i < test.points.rows(); ++i) test.values(i) = cfg.objective(test.points.row(i).transpose());
  cfg.test_set = test;
  const ExperimentRecord rec = run_experiment(cfg);
  ASSERT_TRUE(rec.initial_metrics.has_value());
  for (const auto& it : rec.iterations) {
    ASSERT_TRUE(it.metrics.has_value());
    EXPECT_LE(it.metrics->q2, 1.0);
  }
}

TEST(RunTest, ObjectiveFailureKeepsThePartialTrace) {
  RunConfig cfg = branin_run(Method::kUpEgo, 5, 6, 5);
  int calls = 0;
  const auto inner = cfg.objective;
  cfg.objective = [&calls, inner](const Point& x) {
    if (++calls == 8) fail(ErrorKind::kRun, "simulator crashed");
    return inner(x);
  };
  const ExperimentRecord rec = run_experiment(cfg);
  EXPECT_TRUE(rec.failed());
  EXPECT_EQ(rec.iterations.size(), 2u);
  EXPECT_NE(rec.error.find("iteration 3"), std::string::npos) << rec.error;
  EXPECT_NE(rec.error.find("simulator crashed"), std::string::npos) << rec.error;
  EXPECT_EQ(rec.points.rows(), 7);
}

TEST(RunTest, InitialDesignFailureIsRecorded) {
  RunConfig cfg = branin_run(Method::kUpEgo, 5, 2, 5);
  cfg.objective = [](const Point&) -> double { fail(ErrorKind::kRun, "no licence"); };
  const ExperimentRecord rec = run_experiment(cfg);
  EXPECT_TRUE(rec.failed());
  EXPECT_TRUE(rec.iterations.empty());
  EXPECT_NE(rec.error.find("initial design"), std::string::npos) << rec.error;
}

TEST(RunTest, NonFiniteObjectiveIsAnError) {
  RunConfig cfg = branin_run(Method::kUpEgo, 5, 3, 5);
  cfg.objective = [](const Point& x) { return x(0) > 100.0 ? 0.0 : std::nan(""); };
  EXPECT_TRUE(run_experiment(cfg).failed());
}

TEST(RunTest, StagnationStopsEarly) {
  RunConfig cfg = branin_run(Method::kUpEgo, 5, 30, 6);
  cfg.objective = [](const Point& x) { return x.norm() < 1e-3 ? -1.0 : 1.0 + 1e-9 * x(0); };
  cfg.stagnation_window = 3;
  cfg.stagnation_tol = 1e-3;
  const ExperimentRecord rec = run_experiment(cfg);
  EXPECT_EQ(rec.stop_reason, "stagnation");
  EXPECT_EQ(rec.iterations.size(), 3u);
}

TEST(RunTest, ValidationRejectsBadSettings) {
  RunConfig cfg = branin_run(Method::kUpEgo, 2, 3, 1);
  EXPECT_THROW(cfg.validate(), Error);
  cfg = branin_run(Method::kEgo, 5, 3, 1);
  cfg.surrogate.family = Family::kRbf;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = branin_run(Method::kUpEgo, 5, 0, 1);
  EXPECT_THROW(cfg.validate(), Error);
  cfg = branin_run(Method::kInversion, 5, 3, 1);
  cfg.criterion.kind = CriterionKind::kUpEi;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(RunTest, InversionConcentratesNearTheContour) {
  RunConfig cfg;
  cfg.method = Method::kInversion;
  cfg.objective = [](const Point& x) { return x(0); };
  cfg.bounds = Bounds::parse("-1:1");
  cfg.n0 = 5;
  cfg.max_iterations = 8;
  cfg.criterion.kind = CriterionKind::kTmseRegularized;
  cfg.criterion.threshold = 0.0;
  cfg.seed = 3;
  const ExperimentRecord rec = run_experiment(cfg);
  ASSERT_FALSE(rec.failed()) << rec.error;
  std::vector<double> dist;
  for (const auto& it : rec.iterations) dist.push_back(std::abs(it.x(0)));
  std::sort(dist.begin(), dist.end());
  EXPECT_LT(dist[dist.size() / 2], 0.5);
}

TEST(RunTest, ExplicitInitialDesignIsUsedVerbatim) {
  RunConfig cfg = branin_run(Method::kUpEgo, 0, 1, 1);
  PointSet design(4, 2);
  design << -5, 0, 10, 15, 0, 7, 5, 3;
  cfg.initial_design = design;
  EXPECT_EQ(initial_design(cfg), design);
  const ExperimentRecord rec = run_experiment(cfg);
  EXPECT_EQ(rec.initial_design, design);
}

}  // namespace
}  // namespace updist
