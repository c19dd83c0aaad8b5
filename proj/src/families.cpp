#include "families.hpp"

#include "bordered.hpp"
#include "updist/error.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace updist::detail {

namespace {

std::optional<Eigen::Index> coinciding_site(const PointSet& scaled, const Point& s) {
  Eigen::Index idx = 0;
  const double d2 = (scaled.rowwise() - s.transpose()).rowwise().squaredNorm().minCoeff(&idx);
  if (std::sqrt(d2) < kDuplicateTolerance) return idx;
  return std::nullopt;
}

void monomials(std::size_t p, int degree, std::vector<int>& current, std::size_t axis, int remaining,
               std::vector<std::vector<int>>& out) {
  if (axis == p) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[axis] = e;
    monomials(p, degree, current, axis + 1, remaining - e, out);
  }
  current[axis] = 0;
}

// --- Polynomial regression -------------------------------------------------

class PolynomialModel final : public Model {
 public:
  PolynomialModel(const SurrogateSpec& spec, const Dataset& data) : spec_(spec), data_(data) {
    std::vector<int> current(data_.dim(), 0);
    monomials(data_.dim(), spec_.polynomial.degree, current, 0, spec_.polynomial.degree, exponents_);
    const auto m = static_cast<Eigen::Index>(exponents_.size());
    const auto n = static_cast<Eigen::Index>(data_.size());
    if (n < m) {
      fail(ErrorKind::kInvalidArgument, "polynomial: degree " + std::to_string(spec_.polynomial.degree) + " needs " +
                                            std::to_string(m) + " observations, got " + std::to_string(n));
    }
    Eigen::MatrixXd design(n, m);
    for (Eigen::Index i = 0; i < n; ++i) design.row(i) = basis(data_.scaled_points().row(i).transpose()).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < m) {
      std::ostringstream msg;
      msg << "polynomial: rank-deficient design matrix (rank " << qr.rank() << " of " << m
          << ", max pivot ratio " << qr.maxPivot() << ")";
      fail(ErrorKind::kNumeric, msg.str());
    }
    coef_ = qr.solve(data_.values());
  }

  Prediction predict(const Point& x) const override {
    return {basis(scale_to_unit(x, data_.bounds())).dot(coef_), 0.0};
  }
  bool interpolating() const override { return false; }
  const Dataset& data() const override { return data_; }
  const SurrogateSpec& spec() const override { return spec_; }
  nlohmann::json describe() const override {
    return {{"family", "polynomial"},
            {"degree", spec_.polynomial.degree},
            {"coefficients", std::vector<double>(coef_.data(), coef_.data() + coef_.size())}};
  }

 private:
  Eigen::VectorXd basis(const Point& s) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(exponents_.size()));
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
      double v = 1.0;
      for (std::size_t j = 0; j < exponents_[k].size(); ++j) v *= std::pow(s(static_cast<Eigen::Index>(j)), exponents_[k][j]);
      out(static_cast<Eigen::Index>(k)) = v;
    }
    return out;
  }

  SurrogateSpec spec_;
  Dataset data_;
  std::vector<std::vector<int>> exponents_;
  Eigen::VectorXd coef_;
};

// --- Radial basis interpolation ---------------------------------------------

class RbfModel final : public Model {
 public:
  RbfModel(const SurrogateSpec& spec, const Dataset& data) : spec_(spec), data_(data) {
    const auto n = static_cast<Eigen::Index>(data_.size());
    const auto p = static_cast<Eigen::Index>(data_.dim());
    q_ = linear_tail() ? p + 1 : 1;
    if (n <= q_) fail(ErrorKind::kInvalidArgument, "rbf: too few observations for the polynomial tail");
    const PointSet& s = data_.scaled_points();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + q_, n + q_);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = kernel((s.row(i) - s.row(j)).norm());
      const Eigen::VectorXd t = tail(s.row(i).transpose());
      m.block(i, n, 1, q_) = t.transpose();
      m.block(n, i, q_, 1) = t;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) {
      std::ostringstream msg;
      msg << "rbf: singular interpolation system (rank " << lu.rank() << " of " << (n + q_) << ")";
      fail(ErrorKind::kNumeric, msg.str());
    }
    inverse_ = lu.inverse();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + q_);
    rhs.head(n) = data_.values();
    coef_ = inverse_ * rhs;
  }

  Prediction predict(const Point& x) const override {
    const Point s = scale_to_unit(x, data_.bounds());
    if (const auto j = coinciding_site(data_.scaled_points(), s)) return {data_.value(static_cast<std::size_t>(*j)), 0.0};
    return {kernel_and_tail(s).dot(coef_), 0.0};
  }
  bool interpolating() const override { return true; }
  const Dataset& data() const override { return data_; }
  const SurrogateSpec& spec() const override { return spec_; }
  bool has_fast_loo() const override { return true; }
  Eigen::VectorXd loo_predict(const Point& x) const override {
    const Point s = scale_to_unit(x, data_.bounds());
    return bordered_loo(inverse_, coef_, kernel_and_tail(s), data_.values(), coinciding_site(data_.scaled_points(), s));
  }
  nlohmann::json describe() const override {
    return {{"family", "rbf"}, {"kernel", to_json(spec_)["kernel"]}, {"shape", spec_.rbf.shape}};
  }

 private:
  bool linear_tail() const {
    return spec_.rbf.kernel == RbfKernel::kCubic || spec_.rbf.kernel == RbfKernel::kThinPlate;
  }
  double kernel(double r) const {
    const double e = spec_.rbf.shape;
    switch (spec_.rbf.kernel) {
      case RbfKernel::kGaussian: return std::exp(-(e * r) * (e * r));
      case RbfKernel::kMultiquadric: return std::sqrt(1.0 + (e * r) * (e * r));
      case RbfKernel::kCubic: return r * r * r;
      case RbfKernel::kThinPlate: return r > 0.0 ? r * r * std::log(r) : 0.0;
    }
    return 0.0;
  }
  Eigen::VectorXd tail(const Point& s) const {
    Eigen::VectorXd t(q_);
    t(0) = 1.0;
    if (q_ > 1) t.tail(q_ - 1) = s;
    return t;
  }
  Eigen::VectorXd kernel_and_tail(const Point& s) const {
    const PointSet& xs = data_.scaled_points();
    const Eigen::Index n = xs.rows();
    Eigen::VectorXd out(n + q_);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = kernel((xs.row(i) - s.transpose()).norm());
    out.tail(q_) = tail(s);
    return out;
  }

  SurrogateSpec spec_;
  Dataset data_;
  Eigen::Index q_ = 1;
  Eigen::MatrixXd inverse_;
  Eigen::VectorXd coef_;
};

// --- CV-weighted ensemble ------------------------------------------------------

class EnsembleModel final : public Model {
 public:
  EnsembleModel(const SurrogateSpec& spec, const Dataset& data) : spec_(spec), data_(data) {
    Eigen::VectorXd inv_mse(static_cast<Eigen::Index>(spec_.members.size()));
    for (std::size_t m = 0; m < spec_.members.size(); ++m) {
      cvs_.push_back(fit_loo_submodels(spec_.members[m], data_));
      const double mse = cvs_.back().loo_errors().squaredNorm() / static_cast<double>(data_.size());
      inv_mse(static_cast<Eigen::Index>(m)) = 1.0 / (mse + 1e-12);
    }
    weights_ = inv_mse / inv_mse.sum();
  }

  Prediction predict(const Point& x) const override {
    double mean = 0.0;
    for (std::size_t m = 0; m < cvs_.size(); ++m) mean += weights_(static_cast<Eigen::Index>(m)) * cvs_[m].master().predict_mean(x);
    return {mean, 0.0};
  }
  bool interpolating() const override {
    for (const auto& cv : cvs_) {
      if (!cv.master().interpolating()) return false;
    }
    return true;
  }
  const Dataset& data() const override { return data_; }
  const SurrogateSpec& spec() const override { return spec_; }
  bool has_fast_loo() const override { return true; }
  Eigen::VectorXd loo_predict(const Point& x) const override {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data_.size()));
    for (std::size_t m = 0; m < cvs_.size(); ++m) out += weights_(static_cast<Eigen::Index>(m)) * cvs_[m].predict(x);
    return out;
  }
  nlohmann::json describe() const override {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t m = 0; m < cvs_.size(); ++m) {
      auto d = cvs_[m].master().describe();
      d["weight"] = weights_(static_cast<Eigen::Index>(m));
      members.push_back(std::move(d));
    }
    return {{"family", "ensemble"}, {"members", members}};
  }

 private:
  SurrogateSpec spec_;
  Dataset data_;
  std::vector<CvEnsemble> cvs_;
  Eigen::VectorXd weights_;
};

}  // namespace

std::size_t polynomial_basis_size(std::size_t p, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(p, 0);
  monomials(p, degree, current, 0, degree, out);
  return out.size();
}

ModelPtr fit_polynomial(const SurrogateSpec& spec, const Dataset& data) {
  return std::make_shared<PolynomialModel>(spec, data);
}
ModelPtr fit_rbf(const SurrogateSpec& spec, const Dataset& data) { return std::make_shared<RbfModel>(spec, data); }
ModelPtr fit_ensemble(const SurrogateSpec& spec, const Dataset& data) {
  return std::make_shared<EnsembleModel>(spec, data);
}

}  // namespace updist::detail
