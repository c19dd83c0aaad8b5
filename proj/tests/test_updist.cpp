#include "updist/criteria.hpp"
#include "updist/error.hpp"
#include "updist/updist.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace updist {
namespace {

PointSet random_points(std::size_t n, std::size_t p, Rng& rng) {
  PointSet xs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < xs.cols(); ++j) xs(i, j) = rng.uniform(-1.0, 1.0);
  }
  return xs;
}

TEST(WeightsTest, SumToOneAndVanishAtOwnSite) {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + rng.index(4);
    const PointSet design = random_points(3 + rng.index(20), p, rng);
    const double rho = rng.uniform(0.05, 2.0);
    const Point x = random_points(1, p, rng).row(0).transpose();
    const Eigen::VectorXd w = weights_smooth(x, design, rho);
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_TRUE((w.array() >= 0.0).all());
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
      const Eigen::VectorXd wi = weights_smooth(design.row(i).transpose(), design, rho);
      EXPECT_EQ(wi(i), 0.0);
      EXPECT_NEAR(wi.sum(), 1.0, 1e-12);
    }
  }
}

TEST(WeightsTest, MatchesClosedFormForTwoPoints) {
  PointSet design(2, 1);
  design << -1.0, 1.0;
  const Point x = (Point(1) << 0.5).finished();
  const double rho = 0.7;
  const double phi0 = 1.0 - std::exp(-2.25 / (rho * rho));
  const double phi1 = 1.0 - std::exp(-0.25 / (rho * rho));
  const Eigen::VectorXd w = weights_smooth(x, design, rho);
  EXPECT_NEAR(w(0), phi0 / (phi0 + phi1), 1e-15);
  EXPECT_NEAR(w(1), phi1 / (phi0 + phi1), 1e-15);
}

TEST(WeightsTest, DegenerateNormaliserFallsBackToUniform) {
  PointSet design(3, 1);
  design << -1.0, 0.0, 1.0;
  bool degenerate = false;
  // With a huge rho every phi underflows to zero.
  const Eigen::VectorXd w = weights_smooth((Point(1) << 0.3).finished(), design, 1e200, &degenerate);
  EXPECT_TRUE(degenerate);
  EXPECT_NEAR(w(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  const Eigen::VectorXd saturated = weights_smooth(design.row(1).transpose(), design, 1e-300, &degenerate);
  EXPECT_FALSE(degenerate);
  EXPECT_EQ(saturated(1), 0.0);
  EXPECT_DOUBLE_EQ(saturated(0), 0.5);
}

TEST(WeightsTest, BinaryWeightsSkipNearestSite) {
  PointSet design(3, 1);
  design << -1.0, 0.0, 1.0;
  const Eigen::VectorXd w = weights_binary((Point(1) << 0.2).finished(), design);
  EXPECT_EQ(w(1), 0.0);
  EXPECT_DOUBLE_EQ(w(0), 0.5);
  EXPECT_DOUBLE_EQ(w(2), 0.5);
  // Tie between sites 0 and 1: the lower index is dropped.
  const Eigen::VectorXd tie = weights_binary((Point(1) << -0.5).finished(), design);
  EXPECT_EQ(tie(0), 0.0);
}

TEST(WeightsTest, LemmaBoundHolds) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = 1 + rng.index(6);
    const PointSet design = random_points(2 + rng.index(30), p, rng);
    const double rho = rng.uniform(0.01, 3.0);
    const Point x = random_points(1, p, rng).row(0).transpose();
    const double d12 = (design.row(0) - design.row(1)).norm();
    const double phi_2rho = 1.0 - std::exp(-d12 * d12 / (4.0 * rho * rho));
    const double theta = 1.0 / (rho * rho * phi_2rho);
    const Eigen::VectorXd w = weights_smooth(x, design, rho);
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
      const double d = (x - design.row(i).transpose()).norm();
      EXPECT_LE(w(i), theta * d * d * (1.0 + 1e-12)) << "trial " << trial;
    }
  }
}

TEST(RhoTest, PoliciesResolve) {
  PointSet design(3, 1);
  design << -1.0, 0.0, 1.0;
  EXPECT_DOUBLE_EQ(resolve_rho(UpParams{1.0, RhoPolicy::kDbar}, design), 1.0);
  EXPECT_DOUBLE_EQ(resolve_rho(UpParams{0.25, RhoPolicy::kFixed}, design), 0.25);
}

TEST(UpDistributionTest, MomentsOfAKnownDistribution) {
  UpDistribution d;
  d.predictions = (Eigen::VectorXd(3) << 1.0, 2.0, 4.0).finished();
  d.weights = (Eigen::VectorXd(3) << 0.5, 0.25, 0.25).finished();
  EXPECT_DOUBLE_EQ(up_mean(d), 2.0);
  EXPECT_DOUBLE_EQ(up_variance(d), 0.5 * 1.0 + 0.25 * 0.0 + 0.25 * 4.0);
}

TEST(UpDistributionTest, VanishesAtDesignPointsForInterpolators) {
  Rng rng(13);
  for (auto family : {Family::kKriging, Family::kRbf}) {
    SurrogateSpec spec;
    spec.family = family;
    const Dataset d = testing::random_dataset(10, 2, rng);
    const auto cv = std::make_shared<const CvEnsemble>(fit_loo_submodels(spec, d));
    const UpPredictor up(cv, UpParams{});
    const double range = d.value_range();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const UpDistribution dist = up.at(d.point(i));
      EXPECT_EQ(dist.weights(static_cast<Eigen::Index>(i)), 0.0);
      EXPECT_LE(up_variance(dist), 1e-10 * range * range);
      EXPECT_GE(up_variance(dist), 0.0);
      EXPECT_EQ(up.distance_to_design(d.point(i)), 0.0);
    }
  }
}

TEST(UpDistributionTest, PositiveVarianceAwayFromDesign) {
  Rng rng(14);
  const Dataset d = testing::random_dataset(8, 1, rng);
  const auto cv = std::make_shared<const CvEnsemble>(fit_loo_submodels(SurrogateSpec{}, d));
  const UpPredictor up(cv, UpParams{});
  const Point mid = (d.bounds().lower() + d.bounds().upper()) / 2.0 + Point::Constant(1, 1e-3);
  EXPECT_GT(up_variance(up.at(mid)), 0.0);
  EXPECT_NEAR(up.rho(), dbar(d.scaled_points()), 1e-15);
}

TEST(CriteriaTest, KappaVanishesAtDesignPoints) {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = testing::random_dataset(5 + rng.index(10), 1 + rng.index(2), rng);
    const auto cv = std::make_shared<const CvEnsemble>(fit_loo_submodels(SurrogateSpec{}, d));
    const UpPredictor up(cv, UpParams{});
    const ResolvedCriterion c = resolve(CriterionSpec{CriterionKind::kUpEi}, d);
    EXPECT_GT(c.delta, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(evaluate(c, d.point(i), &up, cv->master()), 0.0);
    }
  }
}

TEST(CriteriaTest, DefaultsResolveAgainstTheOutputRange) {
  PointSet xs(3, 1);
  xs << -0.5, 0.0, 0.5;
  const Dataset d(xs, (Eigen::VectorXd(3) << 0.0, 10.0, 20.0).finished(), Bounds::unit(1));
  EXPECT_DOUBLE_EQ(resolve(CriterionSpec{CriterionKind::kUpSmart}, d).delta, 0.2);
  EXPECT_DOUBLE_EQ(resolve(CriterionSpec{CriterionKind::kUpEi}, d).delta, 0.001);
  CriterionSpec tmse;
  tmse.kind = CriterionKind::kTmse;
  const auto r = resolve(tmse, d);
  EXPECT_DOUBLE_EQ(r.epsilon, 1.0);
  EXPECT_DOUBLE_EQ(r.sigma_eps, 1.0);
  EXPECT_DOUBLE_EQ(r.delta, 0.0);
  CriterionSpec ranjan;
  ranjan.kind = CriterionKind::kRanjan;
  EXPECT_DOUBLE_EQ(resolve(ranjan, d).alpha, 1.96);
  ranjan.kind = CriterionKind::kBichon;
  EXPECT_DOUBLE_EQ(resolve(ranjan, d).alpha, 2.0);
  EXPECT_DOUBLE_EQ(d.min_value(), resolve(tmse, d).y_star);
}

TEST(CriteriaTest, GaussianEiMatchesMonteCarlo) {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const double m = rng.uniform(-5.0, 5.0);
    const double s = rng.uniform(0.1, 3.0);
    const double y_star = m + s * rng.uniform(-2.0, 2.0);
    const double mc = testing::monte_carlo_ei(m, s, y_star, 200000, rng);
    EXPECT_NEAR(gaussian_ei(m, s, y_star), mc, 1e-2 * mc);
  }
  EXPECT_EQ(gaussian_ei(1.0, 0.0, 5.0), 0.0);
  EXPECT_NEAR(gaussian_ei(0.0, 1.0, 0.0), 1.0 / std::sqrt(2.0 * 3.141592653589793), 1e-15);
}

TEST(CriteriaTest, EeiOfAKnownDistribution) {
  UpDistribution d;
  d.predictions = (Eigen::VectorXd(3) << 1.0, 2.0, 4.0).finished();
  d.weights = (Eigen::VectorXd(3) << 0.5, 0.25, 0.25).finished();
  EXPECT_DOUBLE_EQ(eei(d, 3.0), 0.5 * 2.0 + 0.25 * 1.0);
  EXPECT_DOUBLE_EQ(up_ei_kappa(d, 0.5, 2.0, 3.0), 1.25 + 1.0);
  EXPECT_DOUBLE_EQ(up_smart_gamma(d, 0.5, 2.0), 1.5 + 1.0);
}

TEST(InversionTest, BandCriteriaOnAKnownDistribution) {
  UpDistribution d;
  d.predictions = (Eigen::VectorXd(4) << -0.5, 0.1, 0.3, 2.0).finished();
  d.weights = (Eigen::VectorXd(4) << 0.25, 0.25, 0.25, 0.25).finished();
  EXPECT_DOUBLE_EQ(tmse(d, 0.0, 0.35), 0.5);
  EXPECT_DOUBLE_EQ(bichon_ef(d, 0.0, 0.4), 0.25 * 0.3 + 0.25 * 0.1);
  EXPECT_DOUBLE_EQ(ranjan(d, 0.0, 0.4), 0.25 * (0.16 - 0.01) + 0.25 * (0.16 - 0.09));
  const double s = 0.2;
  const double norm = 1.0 / (s * std::sqrt(2.0 * 3.141592653589793));
  double expected = 0.0;
  for (double v : {-0.5, 0.1, 0.3, 2.0}) expected += 0.25 * norm * std::exp(-0.5 * v * v / (s * s));
  EXPECT_NEAR(tmse_regularized(d, 0.0, s), expected, 1e-14);
}

UpDistribution random_distribution(Rng& rng, std::size_t n) {
  UpDistribution d;
  d.predictions.resize(static_cast<Eigen::Index>(n));
  d.weights.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < d.weights.size(); ++i) {
    d.predictions(i) = rng.uniform(-3.0, 3.0);
    d.weights(i) = rng.uniform();
  }
  d.weights /= d.weights.sum();
  return d;
}

TEST(InversionTest, RandomisedProperties) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const UpDistribution d = random_distribution(rng, 2 + rng.index(20));
    const double t = rng.uniform(-3.0, 3.0);
    const double eps = rng.uniform(0.01, 1.0);
    const double ex = band_half_width(d, rng.uniform(0.5, 3.0), BandScale::kStdDev);
    EXPECT_GE(tmse(d, t, eps), 0.0);
    EXPECT_GE(bichon_ef(d, t, ex), 0.0);
    EXPECT_GE(ranjan(d, t, ex), 0.0);
    const double log_reg = log_tmse_regularized(d, t, eps);
    EXPECT_TRUE(std::isfinite(log_reg));
    if (log_reg > std::log(std::numeric_limits<double>::min())) {
      EXPECT_GT(tmse_regularized(d, t, eps), 0.0);
      EXPECT_NEAR(std::exp(log_reg), tmse_regularized(d, t, eps), 1e-12 * tmse_regularized(d, t, eps));
    }

    // Threshold far outside every prediction's band.
    const double far = d.predictions.maxCoeff() + 10.0 + ex + eps;
    EXPECT_EQ(tmse(d, far, eps), 0.0);
    EXPECT_EQ(bichon_ef(d, far, ex), 0.0);
    EXPECT_EQ(ranjan(d, far, ex), 0.0);

    UpDistribution shifted = d;
    const double c = rng.uniform(-100.0, 100.0);
    shifted.predictions.array() += c;
    EXPECT_NEAR(tmse(shifted, t + c, eps), tmse(d, t, eps), 1e-12);
    EXPECT_NEAR(tmse_regularized(shifted, t + c, eps), tmse_regularized(d, t, eps), 1e-9 * tmse_regularized(d, t, eps) + 1e-12);
    EXPECT_NEAR(bichon_ef(shifted, t + c, ex), bichon_ef(d, t, ex), 1e-9);
    EXPECT_NEAR(ranjan(shifted, t + c, ex), ranjan(d, t, ex), 1e-9);
  }
}

TEST(CriterionSpecTest, JsonRoundTripAndValidation) {
  const auto spec = criterion_spec_from_json(nlohmann::json{{"criterion", "ranjan"}, {"threshold", 1.5}, {"band_scale", "variance"}});
  EXPECT_EQ(spec.kind, CriterionKind::kRanjan);
  EXPECT_EQ(spec.band_scale, BandScale::kVariance);
  EXPECT_EQ(criterion_spec_from_json(to_json(spec)).threshold, 1.5);
  EXPECT_THROW(criterion_spec_from_json(nlohmann::json{{"criterion", "poi"}}), Error);
  EXPECT_THROW(criterion_spec_from_json(nlohmann::json{{"criterion", "tmse"}, {"epsilon_pct", -1.0}}), Error);
  EXPECT_THROW(criterion_spec_from_json(nlohmann::json{{"criterion", "tmse"}, {"bogus", 1}}), Error);
}

TEST(CriteriaTest, MasterOnlyCriteriaNeedNoUpPredictor) {
  Rng rng(18);
  const Dataset d = testing::random_dataset(8, 2, rng);
  const auto model = fit(SurrogateSpec{}, d);
  const Point x = d.bounds().clamp(Point::Zero(2));
  EXPECT_GE(evaluate(resolve(CriterionSpec{CriterionKind::kKrigingVariance}, d), x, nullptr, *model), 0.0);
  EXPECT_GE(evaluate(resolve(CriterionSpec{CriterionKind::kGaussianEi}, d), x, nullptr, *model), 0.0);
  EXPECT_THROW(evaluate(resolve(CriterionSpec{CriterionKind::kUpSmart}, d), x, nullptr, *model), Error);
}

}  // namespace
}  // namespace updist
