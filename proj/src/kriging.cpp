#include "updist/surrogate.hpp"

#include "bordered.hpp"
#include "updist/doe.hpp"
#include "updist/error.hpp"
#include "updist/minimize.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace updist {

namespace {

constexpr double kMaxNugget = 1e-4;
constexpr double kVarianceFloor = 1e-300;

struct Factorization {
  bool ok = false;
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd rinv_h;
  Eigen::LLT<Eigen::MatrixXd> gram;
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;
  double sigma2 = 0.0;
  double loglik = -std::numeric_limits<double>::infinity();
};

double weighted_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                         const Eigen::ArrayXd& inv_ls) {
  return std::sqrt(((a - b).array().transpose() * inv_ls).square().sum());
}

Eigen::MatrixXd correlation_matrix(const PointSet& s, const Eigen::ArrayXd& inv_ls, Covariance kind, double nugget) {
  const Eigen::Index n = s.rows();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0 + nugget;
    for (Eigen::Index j = 0; j < i; ++j) {
      r(i, j) = r(j, i) = correlation_of_distance(kind, weighted_distance(s.row(i), s.row(j), inv_ls));
    }
  }
  return r;
}

Factorization factorize(const Dataset& data, const Eigen::VectorXd& log_ls, Covariance kind, double nugget) {
  Factorization f;
  const Eigen::ArrayXd inv_ls = (-log_ls.array()).exp();
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  f.llt.compute(correlation_matrix(data.scaled_points(), inv_ls, kind, nugget));
  if (f.llt.info() != Eigen::Success) return f;
  const Eigen::MatrixXd& l = f.llt.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) return f;
  }
  const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(n, 1);
  f.rinv_h = f.llt.solve(h);
  f.gram.compute(h.transpose() * f.rinv_h);
  if (f.gram.info() != Eigen::Success) return f;
  const Eigen::VectorXd& y = data.values();
  f.beta = f.gram.solve(f.rinv_h.transpose() * y);
  const Eigen::VectorXd resid = y - h * f.beta;
  f.alpha = f.llt.solve(resid);
  f.sigma2 = std::max(resid.dot(f.alpha) / static_cast<double>(n), kVarianceFloor);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  f.loglik = -0.5 * static_cast<double>(n) * (std::log(f.sigma2) + 1.0 + std::log(2.0 * std::numbers::pi)) - 0.5 * log_det;
  f.ok = std::isfinite(f.loglik);
  return f;
}

}  // namespace

double correlation_of_distance(Covariance kind, double r) {
  switch (kind) {
    case Covariance::kMatern52: {
      const double t = std::sqrt(5.0) * r;
      return (1.0 + t + t * t / 3.0) * std::exp(-t);
    }
    case Covariance::kMatern32: {
      const double t = std::sqrt(3.0) * r;
      return (1.0 + t) * std::exp(-t);
    }
    case Covariance::kGaussian:
      return std::exp(-0.5 * r * r);
  }
  return 0.0;
}

double KrigingModel::concentrated_log_likelihood(const Dataset& data, const Eigen::VectorXd& log_ls,
                                                 const KrigingParams& params, double nugget) {
  return factorize(data, log_ls, params.covariance, nugget).loglik;
}

KrigingModel::KrigingModel(const SurrogateSpec& spec, const Dataset& data) : spec_(spec), data_(data) {
  const KrigingParams& kp = spec_.kriging;
  const std::size_t p = data_.dim();
  if (data_.size() < 2) fail(ErrorKind::kInvalidArgument, "kriging: need at least 2 observations");

  // The nugget is escalated only when no starting point can be factored.
  nugget_ = kp.nugget;

  if (kp.fixed_log_lengthscales) {
    if (static_cast<std::size_t>(kp.fixed_log_lengthscales->size()) != p) {
      fail(ErrorKind::kInvalidArgument, "kriging: fixed lengthscale dimension mismatch");
    }
    factor(*kp.fixed_log_lengthscales);
    return;
  }

  const double lo = std::log(kp.min_lengthscale);
  const double hi = std::log(kp.max_lengthscale);
  const auto pp = static_cast<Eigen::Index>(p);
  std::vector<Eigen::VectorXd> starts;
  if (kp.warm_start && kp.warm_start->size() == pp) {
    starts.push_back(kp.warm_start->cwiseMax(lo).cwiseMin(hi));
  } else {
    starts.push_back(Eigen::VectorXd::Zero(pp).cwiseMax(lo).cwiseMin(hi));
  }
  if (kp.restarts > 0) {
    const Bounds box(Eigen::VectorXd::Constant(pp, lo), Eigen::VectorXd::Constant(pp, hi));
    if (kp.restarts == 1) {
      DoeConfig cfg{2, p, kp.seed, 0};
      const PointSet pts = lhs(cfg, box);
      starts.emplace_back(pts.row(0).transpose());
    } else {
      DoeConfig cfg{kp.restarts, p, kp.seed, 0};
      const PointSet pts = lhs(cfg, box);
      for (Eigen::Index i = 0; i < pts.rows(); ++i) starts.emplace_back(pts.row(i).transpose());
    }
  }

  for (;;) {
    auto objective = [&](const Eigen::VectorXd& t) {
      const Eigen::VectorXd c = t.cwiseMax(lo).cwiseMin(hi);
      const double ll = factorize(data_, c, kp.covariance, nugget_).loglik;
      if (!std::isfinite(ll)) return std::numeric_limits<double>::infinity();
      return -ll + 1e3 * (t - c).squaredNorm();
    };

    start_logliks_.clear();
    Eigen::VectorXd best;
    double best_value = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
      const double at_start = objective(s);
      start_logliks_.push_back(-at_start);
      if (at_start < best_value) {
        best_value = at_start;
        best = s;
      }
      const MinimizeResult r = nelder_mead(objective, s, 1.0, kp.max_evaluations, 1e-3);
      if (r.value < best_value) {
        best_value = r.value;
        best = r.x.cwiseMax(lo).cwiseMin(hi);
      }
    }
    if (std::isfinite(best_value)) {
      factor(best);
      return;
    }
    if (nugget_ * 10.0 > kMaxNugget * (1 + 1e-12)) break;
    nugget_ *= 10.0;
  }
  std::ostringstream msg;
  msg << "kriging: correlation matrix not positive definite for any searched lengthscale (n = " << data_.size()
      << ", nugget up to " << nugget_ << ")";
  fail(ErrorKind::kNumeric, msg.str());
}

void KrigingModel::factor(const Eigen::VectorXd& log_ls) {
  Factorization f;
  for (;;) {
    f = factorize(data_, log_ls, spec_.kriging.covariance, nugget_);
    if (f.ok) break;
    if (nugget_ * 10.0 > kMaxNugget * (1 + 1e-12)) {
      const Eigen::MatrixXd r =
          correlation_matrix(data_.scaled_points(), (-log_ls.array()).exp(), spec_.kriging.covariance, nugget_);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r, Eigen::EigenvaluesOnly).eigenvalues();
      std::ostringstream msg;
      msg << "kriging: singular correlation matrix (eigenvalues in [" << ev.minCoeff() << ", " << ev.maxCoeff()
          << "], nugget " << nugget_ << ")";
      fail(ErrorKind::kNumeric, msg.str());
    }
    nugget_ *= 10.0;
  }
  log_ls_ = log_ls;
  chol_ = std::move(f.llt);
  rinv_trend_ = std::move(f.rinv_h);
  trend_gram_ = std::move(f.gram);
  beta_ = std::move(f.beta);
  alpha_ = std::move(f.alpha);
  sigma2_ = f.sigma2;
  loglik_ = f.loglik;
  const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
  const Eigen::Index q = beta_.size();
  trend_ = Eigen::MatrixXd::Ones(n, q);

  const Eigen::MatrixXd rinv = chol_.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd ginv = trend_gram_.solve(Eigen::MatrixXd::Identity(q, q));
  const Eigen::MatrixXd b = rinv_trend_ * ginv;
  bordered_inv_.resize(n + q, n + q);
  bordered_inv_.topLeftCorner(n, n) = rinv - b * rinv_trend_.transpose();
  bordered_inv_.topRightCorner(n, q) = b;
  bordered_inv_.bottomLeftCorner(q, n) = b.transpose();
  bordered_inv_.bottomRightCorner(q, q) = -ginv;
  bordered_coef_.resize(n + q);
  bordered_coef_ << alpha_, beta_;
}

double KrigingModel::correlation(const Point& a, const Point& b) const {
  const Eigen::ArrayXd inv_ls = (-log_ls_.array()).exp();
  const Point sa = scale_to_unit(a, data_.bounds());
  const Point sb = scale_to_unit(b, data_.bounds());
  return correlation_of_distance(spec_.kriging.covariance, weighted_distance(sa.transpose(), sb.transpose(), inv_ls));
}

Eigen::VectorXd KrigingModel::correlations(const Point& s) const {
  const Eigen::ArrayXd inv_ls = (-log_ls_.array()).exp();
  const PointSet& xs = data_.scaled_points();
  Eigen::VectorXd r(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    r(i) = correlation_of_distance(spec_.kriging.covariance, weighted_distance(xs.row(i), s.transpose(), inv_ls));
  }
  return r;
}

namespace {

std::optional<Eigen::Index> coinciding_site(const PointSet& scaled, const Point& s) {
  Eigen::Index idx = 0;
  const double d2 = (scaled.rowwise() - s.transpose()).rowwise().squaredNorm().minCoeff(&idx);
  if (std::sqrt(d2) < kDuplicateTolerance) return idx;
  return std::nullopt;
}

}  // namespace

Prediction KrigingModel::predict(const Point& x) const {
  const Point s = scale_to_unit(x, data_.bounds());
  if (const auto j = coinciding_site(data_.scaled_points(), s)) {
    return {data_.value(static_cast<std::size_t>(*j)), 0.0};
  }
  const Eigen::VectorXd r = correlations(s);
  const Eigen::VectorXd h = Eigen::VectorXd::Ones(beta_.size());
  const double mean = h.dot(beta_) + r.dot(alpha_);
  const Eigen::VectorXd rinv_r = chol_.solve(r);
  const Eigen::VectorXd v = h - rinv_trend_.transpose() * r;
  const double var = sigma2_ * (1.0 - r.dot(rinv_r) + v.dot(trend_gram_.solve(v)));
  return {mean, std::max(var, 0.0)};
}

double KrigingModel::predict_mean(const Point& x) const {
  const Point s = scale_to_unit(x, data_.bounds());
  if (const auto j = coinciding_site(data_.scaled_points(), s)) return data_.value(static_cast<std::size_t>(*j));
  return beta_.sum() + correlations(s).dot(alpha_);
}

Eigen::VectorXd KrigingModel::loo_predict(const Point& x) const {
  const Point s = scale_to_unit(x, data_.bounds());
  const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
  Eigen::VectorXd rt(n + beta_.size());
  rt.head(n) = correlations(s);
  rt.tail(beta_.size()).setOnes();
  return detail::bordered_loo(bordered_inv_, bordered_coef_, rt, data_.values(),
                              coinciding_site(data_.scaled_points(), s));
}

nlohmann::json KrigingModel::describe() const {
  const Eigen::VectorXd ls = lengthscales();
  return {{"family", "kriging"},
          {"lengthscales", std::vector<double>(ls.data(), ls.data() + ls.size())},
          {"process_variance", sigma2_},
          {"beta", beta_(0)},
          {"nugget", nugget_},
          {"log_likelihood", loglik_}};
}

}  // namespace updist
