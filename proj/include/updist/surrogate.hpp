#pragma once

#include "updist/core.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace updist {

enum class Family { kKriging, kPolynomial, kRbf, kEnsemble };
enum class Covariance { kMatern52, kMatern32, kGaussian };
enum class RbfKernel { kGaussian, kMultiquadric, kCubic, kThinPlate };

struct KrigingParams {
  Covariance covariance = Covariance::kMatern52;
  /// Diagonal jitter relative to the process variance. Escalated x10 (up to
  /// 1e-4) when the correlation matrix is not numerically positive definite.
  double nugget = 1e-8;
  /// Number of space-filling starting points for the likelihood search.
  std::size_t restarts = 5;
  std::size_t max_evaluations = 400;
  double min_lengthscale = 1e-2;
  double max_lengthscale = 1e2;
  std::uint64_t seed = 0;
  /// Leave-one-out sub-models re-estimate hyperparameters instead of reusing
  /// the master model's.
  bool full_loo_refit = false;
  /// Log-lengthscales tried before the restarts (previous optimum).
  std::optional<Eigen::VectorXd> warm_start;
  /// Skip estimation and use these log-lengthscales as-is.
  std::optional<Eigen::VectorXd> fixed_log_lengthscales;
};

struct PolynomialParams {
  int degree = 2;
};

struct RbfParams {
  RbfKernel kernel = RbfKernel::kCubic;
  double shape = 1.0;
};

struct SurrogateSpec {
  Family family = Family::kKriging;
  KrigingParams kriging;
  PolynomialParams polynomial;
  RbfParams rbf;
  std::vector<SurrogateSpec> members;  // ensemble only

  static SurrogateSpec kriging_default();
  void validate() const;
};

nlohmann::json to_json(const SurrogateSpec& spec);
SurrogateSpec surrogate_spec_from_json(const nlohmann::json& j);
std::string to_string(Family f);

struct Prediction {
  double mean = 0.0;
  double model_variance = 0.0;
};

/// A fitted surrogate. Immutable; predict is safe to call concurrently.
class Model {
 public:
  virtual ~Model() = default;

  virtual Prediction predict(const Point& x) const = 0;
  /// Mean only; families with a costly variance override this.
  virtual double predict_mean(const Point& x) const { return predict(x).mean; }
  virtual bool interpolating() const = 0;
  virtual const Dataset& data() const = 0;
  virtual const SurrogateSpec& spec() const = 0;

  /// Whether loo_predict is available without refitting.
  virtual bool has_fast_loo() const { return false; }
  /// Predictions at x of the n models trained on Z_{n,-i}, sharing this
  /// model's hyperparameters.
  virtual Eigen::VectorXd loo_predict(const Point& x) const;

  /// Learned state, for diagnostics and run records.
  virtual nlohmann::json describe() const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;

ModelPtr fit(const SurrogateSpec& spec, const Dataset& data);

/// The n leave-one-out sub-models of a master model.
class CvEnsemble {
 public:
  /// Sub-model predictions obtained from the master's downdating formula.
  explicit CvEnsemble(ModelPtr master);
  /// Explicitly refitted sub-models; subs[i] was trained without observation i.
  CvEnsemble(ModelPtr master, std::vector<ModelPtr> subs);

  /// (s_{n,-1}(x), ..., s_{n,-n}(x)).
  Eigen::VectorXd predict(const Point& x) const;
  std::size_t size() const { return master_->data().size(); }
  const Dataset& data() const { return master_->data(); }
  const Model& master() const { return *master_; }
  const ModelPtr& master_ptr() const { return master_; }
  bool explicit_refits() const { return !subs_.empty(); }
  const std::vector<ModelPtr>& submodels() const { return subs_; }

  /// s_{n,-i}(x_i) - y_i.
  Eigen::VectorXd loo_errors() const;

 private:
  ModelPtr master_;
  std::vector<ModelPtr> subs_;
};

/// Fits the master model (unless given) and its leave-one-out sub-models.
CvEnsemble fit_loo_submodels(const SurrogateSpec& spec, const Dataset& data, ModelPtr master = nullptr);

// --- Kriging --------------------------------------------------------------

/// Universal kriging with constant trend and profiled process variance.
class KrigingModel final : public Model {
 public:
  KrigingModel(const SurrogateSpec& spec, const Dataset& data);

  Prediction predict(const Point& x) const override;
  double predict_mean(const Point& x) const override;
  bool interpolating() const override { return true; }
  const Dataset& data() const override { return data_; }
  const SurrogateSpec& spec() const override { return spec_; }
  bool has_fast_loo() const override { return true; }
  Eigen::VectorXd loo_predict(const Point& x) const override;
  nlohmann::json describe() const override;

  const Eigen::VectorXd& log_lengthscales() const { return log_ls_; }
  Eigen::VectorXd lengthscales() const { return log_ls_.array().exp(); }
  double process_variance() const { return sigma2_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  double log_likelihood() const { return loglik_; }
  double nugget() const { return nugget_; }
  /// Log-likelihoods at the search's starting points.
  const std::vector<double>& start_log_likelihoods() const { return start_logliks_; }

  /// Concentrated log marginal likelihood at the given log-lengthscales
  /// (-inf when the correlation matrix cannot be factored).
  static double concentrated_log_likelihood(const Dataset& data, const Eigen::VectorXd& log_ls,
                                            const KrigingParams& params, double nugget);

  /// Scaled-space correlation between two points.
  double correlation(const Point& a, const Point& b) const;

 private:
  void factor(const Eigen::VectorXd& log_ls);
  Eigen::VectorXd correlations(const Point& scaled_x) const;

  SurrogateSpec spec_;
  Dataset data_;
  Eigen::VectorXd log_ls_;
  double nugget_ = 0.0;
  double sigma2_ = 0.0;
  double loglik_ = 0.0;
  std::vector<double> start_logliks_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::MatrixXd trend_;          // H, n x q
  Eigen::MatrixXd rinv_trend_;     // R^{-1} H
  Eigen::LLT<Eigen::MatrixXd> trend_gram_;  // H^T R^{-1} H
  Eigen::VectorXd beta_;
  Eigen::VectorXd alpha_;          // R^{-1}(Y - H beta)
  Eigen::MatrixXd bordered_inv_;   // inverse of [[R, H], [H^T, 0]]
  Eigen::VectorXd bordered_coef_;  // bordered_inv_ * [Y; 0]
};

/// Matern / Gaussian correlation as a function of scaled distance.
double correlation_of_distance(Covariance kind, double r);

}  // namespace updist
