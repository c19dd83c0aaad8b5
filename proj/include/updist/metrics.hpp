#pragma once

#include "updist/core.hpp"
#include "updist/surrogate.hpp"

namespace updist {

struct TestSet {
  PointSet points;
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

/// 1 - sum (y - yhat)^2 / sum (y - ybar)^2.
double q2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed);
/// Mean of squared errors (the "RMSE" of the reference tables, no root).
double rmse_paper(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed);
/// Conventional root mean squared error.
double rmse_sqrt(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed);
/// Mean of squared relative errors ((y - yhat) / y)^2.
double rrmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed);
/// Mean absolute error over the (population) standard deviation of the observations.
double raae(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed);

struct MetricSnapshot {
  double q2 = 0.0;
  double rmse_paper = 0.0;
  double rmse_sqrt = 0.0;
  double rrmse = 0.0;
  double raae = 0.0;
};

Eigen::VectorXd predict_all(const Model& model, const PointSet& points);

/// All metrics of the model on the test set; undefined ones are NaN.
MetricSnapshot evaluate_metrics(const Model& model, const TestSet& test);

}  // namespace updist
