#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace updist::detail {

/// Leave-one-out predictions for interpolants of the form
///   s(x) = [k(x); h(x)]^T C [Y; 0],  C = [[K, H], [H^T, 0]]^{-1}.
/// Removing observation i from the system gives the closed form
///   s_{-i}(x) = s(x) - u_i(x) c_i / C_ii,  u = C [k(x); h(x)],  c = C [Y; 0].
/// `snapped` is the index of a design site coinciding with x: every model
/// still trained on it returns its observation there.
inline Eigen::VectorXd bordered_loo(const Eigen::MatrixXd& inverse, const Eigen::VectorXd& coef,
                                    const Eigen::VectorXd& kernel_and_trend, const Eigen::VectorXd& values,
                                    std::optional<Eigen::Index> snapped) {
  const Eigen::Index n = values.size();
  const Eigen::VectorXd u = inverse * kernel_and_trend;
  const double full = kernel_and_trend.dot(coef);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = full - u(i) * coef(i) / inverse(i, i);
  if (snapped) {
    const Eigen::Index j = *snapped;
    const double keep = out(j);
    out.setConstant(values(j));
    out(j) = keep;
  }
  return out;
}

}  // namespace updist::detail
