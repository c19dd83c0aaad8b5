#pragma once

#include "updist/surrogate.hpp"
#include "updist/updist.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace updist {

enum class CriterionKind {
  kUpSmart,          ///< UP variance + delta * distance to design
  kUpEi,             ///< empirical EI + delta * distance to design
  kGaussianEi,       ///< closed-form EI of a kriging master model
  kKrigingVariance,  ///< kriging predictive variance
  kTmse,
  kTmseRegularized,
  kBichon,
  kRanjan,
};

/// How the band half-width eps_x of Bichon/Ranjan follows the UP spread.
enum class BandScale {
  kStdDev,    ///< eps_x = alpha * sigma_n(x)
  kVariance,  ///< eps_x = alpha * sigma_n(x)^2
};

struct CriterionSpec {
  CriterionKind kind = CriterionKind::kUpEi;
  /// Exploration parameter as a percentage of the observed output range.
  /// Negative selects the kind's default (0.005 for up_ei, 1 for up_smart, 0 otherwise).
  double delta_pct = -1.0;
  double threshold = 0.0;
  /// TMSE band half-width as a percentage of the observed output range.
  double epsilon_pct = 5.0;
  /// Regularized-TMSE density width, percent of range; negative means "same as epsilon".
  double sigma_eps_pct = -1.0;
  /// Negative selects 2 for Bichon and 1.96 for Ranjan.
  double alpha = -1.0;
  BandScale band_scale = BandScale::kStdDev;

  bool uses_up() const;
  /// Copy with every negative "use the default" field replaced by its value.
  CriterionSpec with_defaults() const;
  bool inversion() const;
  void validate() const;
};

std::string to_string(CriterionKind kind);
CriterionKind criterion_kind_from_string(const std::string& name);
nlohmann::json to_json(const CriterionSpec& spec);
CriterionSpec criterion_spec_from_json(const nlohmann::json& j);

// Formulas on a UP distribution. `distance` is the scaled distance from the
// query to the nearest design point.

double up_smart_gamma(const UpDistribution& d, double distance, double delta);
double eei(const UpDistribution& d, double y_star);
double up_ei_kappa(const UpDistribution& d, double distance, double delta, double y_star);
double tmse(const UpDistribution& d, double threshold, double epsilon);
double tmse_regularized(const UpDistribution& d, double threshold, double sigma_eps);
/// Log of tmse_regularized; finite where the plain value underflows.
double log_tmse_regularized(const UpDistribution& d, double threshold, double sigma_eps);
double bichon_ef(const UpDistribution& d, double threshold, double epsilon_x);
double ranjan(const UpDistribution& d, double threshold, double epsilon_x);
double band_half_width(const UpDistribution& d, double alpha, BandScale scale);

/// E[max(y_star - Y, 0)] for Y ~ N(mean, sd^2); 0 when sd == 0.
double gaussian_ei(double mean, double sd, double y_star);

// Point-wise forms.

double up_smart_gamma(const Point& x, const UpPredictor& up, double delta);
double eei(const Point& x, const UpPredictor& up, double y_star);
double up_ei_kappa(const Point& x, const UpPredictor& up, double delta, double y_star);
double gaussian_ei(const Point& x, const Model& kriging, double y_star);

/// A criterion with every data-dependent parameter fixed for one design.
struct ResolvedCriterion {
  CriterionSpec spec;
  double delta = 0.0;
  double y_star = 0.0;
  double epsilon = 0.0;
  double sigma_eps = 0.0;
  double alpha = 0.0;
};

ResolvedCriterion resolve(const CriterionSpec& spec, const Dataset& data);

/// Evaluates the criterion at x. `up` may be null for criteria that only need
/// the master model.
double evaluate(const ResolvedCriterion& c, const Point& x, const UpPredictor* up, const Model& master);

}  // namespace updist
