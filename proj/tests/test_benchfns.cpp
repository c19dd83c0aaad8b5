#include "updist/benchfns.hpp"
#include "updist/doe.hpp"
#include "updist/error.hpp"
#include "updist/minimize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace updist {
namespace {

// Dense grid over the box followed by a Nelder-Mead polish of the best cell.
double grid_polish_minimum(const Benchmark& bench, std::size_t per_axis) {
  const PointSet g = full_grid(per_axis, bench.bounds);
  double best = std::numeric_limits<double>::infinity();
  Point arg;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const double v = bench.evaluate(g.row(i).transpose());
    if (v < best) {
      best = v;
      arg = g.row(i).transpose();
    }
  }
  const auto res = nelder_mead([&](const Point& x) { return bench.evaluate(bench.bounds.clamp(x)); }, arg,
                               1e-2, 2000, 1e-12);
  return std::min(best, res.value);
}

TEST(BenchmarkTest, VianaMatchesClosedForm) {
  EXPECT_DOUBLE_EQ(viana(0.0), 25.0 / 50.0);
  EXPECT_NEAR(viana(1.2), (10.0 * std::cos(2.4) + 15.0 - 6.0 + 1.44) / 50.0, 1e-15);
  const Benchmark b = benchmark_by_name("viana");
  EXPECT_EQ(b.dim(), 1u);
  EXPECT_DOUBLE_EQ(b.bounds.lower()(0), -3.0);
}

TEST(BenchmarkTest, KnownMinimaEvaluateToTheirValues) {
  for (const auto& name : benchmark_names()) {
    const Benchmark b = benchmark_by_name(name);
    for (const auto& m : b.known_minima) {
      EXPECT_NEAR(b.evaluate(m.location), m.value, 1e-6) << name;
    }
  }
}

TEST(BenchmarkTest, BraninGridOracle) {
  const Benchmark b = benchmark_by_name("branin");
  EXPECT_NEAR(grid_polish_minimum(b, 1001), 0.397887, 1e-6);
  EXPECT_NEAR(b.known_minima.front().value, 5.0 / (4.0 * std::numbers::pi), 1e-12);
}

TEST(BenchmarkTest, CamelGridOracle) {
  const Benchmark b = benchmark_by_name("camel");
  EXPECT_NEAR(grid_polish_minimum(b, 1001), -1.0316284534898774, 1e-9);
}

TEST(BenchmarkTest, AckleyMinimumAtOrigin) {
  EXPECT_NEAR(ackley(0.0, 0.0), 0.0, 1e-12);
  const Benchmark b = benchmark_by_name("ackley");
  EXPECT_NEAR(grid_polish_minimum(b, 401), 0.0, 1e-6);
  EXPECT_GT(ackley(1.0, 1.0), 3.0);
}

TEST(BenchmarkTest, Hartmann6MultistartOracle) {
  const Benchmark b = benchmark_by_name("hartmann6");
  const PointSet starts = lhs({40, 6, 5, 0}, b.bounds);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < starts.rows(); ++i) {
    const auto res = nelder_mead([&](const Point& x) { return b.evaluate(b.bounds.clamp(x)); },
                                 starts.row(i).transpose(), 0.1, 4000, 1e-10);
    best = std::min(best, res.value);
  }
  EXPECT_NEAR(best, -3.32237, 1e-5);
  EXPECT_NEAR(b.known_minima.front().value, best, 1e-6);
}

TEST(BenchmarkTest, RejectsWrongDimensionAndUnknownNames) {
  const Benchmark b = benchmark_by_name("branin");
  EXPECT_THROW(b.evaluate(Point::Zero(3)), Error);
  EXPECT_THROW(benchmark_by_name("rosenbrock"), Error);
}

}  // namespace
}  // namespace updist
