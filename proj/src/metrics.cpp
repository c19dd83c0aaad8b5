#include "updist/metrics.hpp"

#include "updist/error.hpp"

#include <cmath>
#include <limits>

namespace updist {

namespace {

void check(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed, const char* what) {
  if (predicted.size() != observed.size()) fail(ErrorKind::kInvalidArgument, std::string(what) + ": size mismatch");
  if (observed.size() < 1) fail(ErrorKind::kInvalidArgument, std::string(what) + ": empty test set");
}

template <typename F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

double q2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed) {
  check(predicted, observed, "q2");
  const double ss_tot = (observed.array() - observed.mean()).square().sum();
  if (!(ss_tot > 0.0)) fail(ErrorKind::kInvalidArgument, "q2: test set has zero variance");
  return 1.0 - (observed - predicted).squaredNorm() / ss_tot;
}

double rmse_paper(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed) {
  check(predicted, observed, "rmse");
  return (observed - predicted).squaredNorm() / static_cast<double>(observed.size());
}

double rmse_sqrt(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed) {
  return std::sqrt(rmse_paper(predicted, observed));
}

double rrmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed) {
  check(predicted, observed, "rrmse");
  if ((observed.array() == 0.0).any()) fail(ErrorKind::kInvalidArgument, "rrmse: test set contains a zero value");
  return ((observed - predicted).array() / observed.array()).square().mean();
}

double raae(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed) {
  check(predicted, observed, "raae");
  const double sd = std::sqrt((observed.array() - observed.mean()).square().mean());
  if (!(sd > 0.0)) fail(ErrorKind::kInvalidArgument, "raae: test set has zero standard deviation");
  return (observed - predicted).array().abs().mean() / sd;
}

Eigen::VectorXd predict_all(const Model& model, const PointSet& points) {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out(i) = model.predict_mean(points.row(i).transpose());
  return out;
}

MetricSnapshot evaluate_metrics(const Model& model, const TestSet& test) {
  const Eigen::VectorXd pred = predict_all(model, test.points);
  const Eigen::VectorXd& obs = test.values;
  return {or_nan([&] { return q2(pred, obs); }), or_nan([&] { return rmse_paper(pred, obs); }),
          or_nan([&] { return rmse_sqrt(pred, obs); }), or_nan([&] { return rrmse(pred, obs); }),
          or_nan([&] { return raae(pred, obs); })};
}

}  // namespace updist
