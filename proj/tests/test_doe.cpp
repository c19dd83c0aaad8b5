#include "updist/doe.hpp"
#include "updist/error.hpp"

#include <gtest/gtest.h>

#include <set>

namespace updist {
namespace {

TEST(LhsTest, OnePointPerStratumOnEveryAxis) {
  const Bounds b = Bounds::parse("-5:10,0:15,1:2");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const std::size_t n = 17;
    const PointSet xs = lhs({n, 3, seed, 200}, b);
    ASSERT_EQ(xs.rows(), 17);
    for (Eigen::Index j = 0; j < 3; ++j) {
      std::set<long> strata;
      for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        const double u = (xs(i, j) - b.lower()(j)) / (b.upper()(j) - b.lower()(j));
        ASSERT_GE(u, 0.0);
        ASSERT_LE(u, 1.0);
        strata.insert(std::min<long>(static_cast<long>(u * n), n - 1));
      }
      EXPECT_EQ(strata.size(), n) << "axis " << j;
    }
  }
}

TEST(LhsTest, DeterministicInSeed) {
  const Bounds b = Bounds::unit(4);
  EXPECT_EQ(lhs({12, 4, 99, 100}, b), lhs({12, 4, 99, 100}, b));
  EXPECT_NE(lhs({12, 4, 99, 100}, b), lhs({12, 4, 100, 100}, b));
}

TEST(LhsTest, MaximinSwapsNeverShrinkSeparation) {
  const Bounds b = Bounds::unit(2);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double plain = min_pairwise_dist(lhs({20, 2, seed, 0}, b));
    const double improved = min_pairwise_dist(lhs({20, 2, seed, 2000}, b));
    EXPECT_GE(improved, plain);
  }
}

TEST(LhsTest, RejectsEmptyRequests) {
  EXPECT_THROW(lhs({0, 2, 1, 0}, Bounds::unit(2)), Error);
  EXPECT_THROW(lhs({5, 3, 1, 0}, Bounds::unit(2)), Error);
}

TEST(GridTest, IncludesCornersAndCountsPoints) {
  const Bounds b = Bounds::parse("-5:10,0:15");
  const PointSet g = full_grid(40, b);
  ASSERT_EQ(g.rows(), 1600);
  bool lo = false;
  bool hi = false;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    lo = lo || (g(i, 0) == -5.0 && g(i, 1) == 0.0);
    hi = hi || (g(i, 0) == 10.0 && g(i, 1) == 15.0);
  }
  EXPECT_TRUE(lo);
  EXPECT_TRUE(hi);
  EXPECT_NEAR(min_pairwise_dist(g), 15.0 / 39.0, 1e-12);
}

TEST(GridTest, RejectsHugeGrids) {
  EXPECT_THROW(full_grid(1000, Bounds::unit(6)), Error);
  EXPECT_THROW(full_grid(1, Bounds::unit(2)), Error);
}

}  // namespace
}  // namespace updist
