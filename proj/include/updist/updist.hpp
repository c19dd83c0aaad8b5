#pragma once

#include "updist/core.hpp"
#include "updist/surrogate.hpp"

#include <memory>

namespace updist {

enum class RhoPolicy {
  kFixed,  ///< use UpParams::rho as given
  kDbar,   ///< rho = dbar(X_n), recomputed for every design
};

struct UpParams {
  double rho = 1.0;
  RhoPolicy rho_policy = RhoPolicy::kDbar;
};

/// Weighted empirical distribution of the leave-one-out predictions at a
/// query point.
struct UpDistribution {
  Point query;
  Eigen::VectorXd predictions;
  Eigen::VectorXd weights;
  /// Set when the weight normalizer vanished and uniform weights were used.
  bool degenerate = false;
};

/// Smoothed weights w_i = phi_i / sum_j phi_j with phi_i = 1 - exp(-d(x, x_i)^2 / rho^2).
/// Coordinates are taken as-is (callers pass [-1,1]^p-scaled points).
Eigen::VectorXd weights_smooth(const Point& x, const PointSet& design, double rho, bool* degenerate = nullptr);

/// 1/(n-1) everywhere except the nearest design point (lowest index on ties), which gets 0.
Eigen::VectorXd weights_binary(const Point& x, const PointSet& design);

/// rho for the given design under the policy.
double resolve_rho(const UpParams& params, const PointSet& scaled_design);

/// UP distribution at x (raw coordinates; distances are computed after
/// scaling to [-1,1]^p with the dataset's bounds).
UpDistribution up_at(const Point& x, const CvEnsemble& cv, const UpParams& params);

double up_mean(const UpDistribution& d);
double up_variance(const UpDistribution& d);

/// A CvEnsemble with rho resolved once, for evaluating many query points.
class UpPredictor {
 public:
  UpPredictor(std::shared_ptr<const CvEnsemble> cv, const UpParams& params);

  UpDistribution at(const Point& x) const;
  /// Scaled distance from x to the nearest design point.
  double distance_to_design(const Point& x) const;

  double rho() const { return rho_; }
  const CvEnsemble& ensemble() const { return *cv_; }
  const Dataset& data() const { return cv_->data(); }

 private:
  std::shared_ptr<const CvEnsemble> cv_;
  double rho_;
};

}  // namespace updist
