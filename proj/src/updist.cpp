#include "updist/updist.hpp"

#include "updist/error.hpp"

#include <cmath>
#include <limits>

namespace updist {

Eigen::VectorXd weights_smooth(const Point& x, const PointSet& design, double rho, bool* degenerate) {
  const Eigen::Index n = design.rows();
  if (n < 2) fail(ErrorKind::kInvalidArgument, "weights_smooth: need at least 2 design points");
  if (!(rho > 0.0)) fail(ErrorKind::kInvalidArgument, "weights_smooth: rho must be > 0");
  Eigen::VectorXd w(n);
  const double inv_rho2 = 1.0 / (rho * rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    // -expm1(-u) keeps full precision for u near 0.
    const double d2 = (design.row(i) - x.transpose()).squaredNorm();
    w(i) = d2 == 0.0 ? 0.0 : -std::expm1(-d2 * inv_rho2);
  }
  const double total = w.sum();
  const bool fallback = !(total > 0.0) || !std::isfinite(total);
  if (degenerate != nullptr) *degenerate = fallback;
  if (fallback) return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return w / total;
}

Eigen::VectorXd weights_binary(const Point& x, const PointSet& design) {
  const Eigen::Index n = design.rows();
  if (n < 2) fail(ErrorKind::kInvalidArgument, "weights_binary: need at least 2 design points");
  Eigen::Index nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (design.row(i) - x.transpose()).squaredNorm();
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n - 1));
  w(nearest) = 0.0;
  return w;
}

double resolve_rho(const UpParams& params, const PointSet& scaled_design) {
  if (params.rho_policy == RhoPolicy::kDbar) return dbar(scaled_design);
  if (!(params.rho > 0.0)) fail(ErrorKind::kInvalidArgument, "fixed rho must be > 0");
  return params.rho;
}

UpDistribution up_at(const Point& x, const CvEnsemble& cv, const UpParams& params) {
  const Dataset& data = cv.data();
  UpDistribution d;
  d.query = x;
  d.predictions = cv.predict(x);
  d.weights = weights_smooth(scale_to_unit(x, data.bounds()), data.scaled_points(),
                             resolve_rho(params, data.scaled_points()), &d.degenerate);
  return d;
}

double up_mean(const UpDistribution& d) { return d.weights.dot(d.predictions); }

double up_variance(const UpDistribution& d) {
  const double m = up_mean(d);
  return std::max(0.0, d.weights.dot((d.predictions.array() - m).square().matrix()));
}

UpPredictor::UpPredictor(std::shared_ptr<const CvEnsemble> cv, const UpParams& params)
    : cv_(std::move(cv)), rho_(resolve_rho(params, cv_->data().scaled_points())) {}

UpDistribution UpPredictor::at(const Point& x) const {
  const Dataset& data = cv_->data();
  UpDistribution d;
  d.query = x;
  d.predictions = cv_->predict(x);
  d.weights = weights_smooth(scale_to_unit(x, data.bounds()), data.scaled_points(), rho_, &d.degenerate);
  return d;
}

double UpPredictor::distance_to_design(const Point& x) const {
  return min_dist(scale_to_unit(x, cv_->data().bounds()), cv_->data().scaled_points());
}

}  // namespace updist
