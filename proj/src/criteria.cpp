#include "updist/criteria.hpp"

#include "updist/error.hpp"

#include <cmath>
#include <numbers>

namespace updist {

namespace {

struct KindName {
  const char* name;
  CriterionKind kind;
};

constexpr KindName kKinds[] = {
    {"up_smart", CriterionKind::kUpSmart},   {"up_ei", CriterionKind::kUpEi},
    {"gaussian_ei", CriterionKind::kGaussianEi}, {"kriging_variance", CriterionKind::kKrigingVariance},
    {"tmse", CriterionKind::kTmse},          {"tmse_reg", CriterionKind::kTmseRegularized},
    {"bichon", CriterionKind::kBichon},      {"ranjan", CriterionKind::kRanjan},
};

double normal_pdf(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

}  // namespace

std::string to_string(CriterionKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

CriterionKind criterion_kind_from_string(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  fail(ErrorKind::kConfig, "unknown criterion '" + name + "'");
}

bool CriterionSpec::uses_up() const {
  return kind != CriterionKind::kGaussianEi && kind != CriterionKind::kKrigingVariance;
}

bool CriterionSpec::inversion() const {
  return kind == CriterionKind::kTmse || kind == CriterionKind::kTmseRegularized || kind == CriterionKind::kBichon ||
         kind == CriterionKind::kRanjan;
}

void CriterionSpec::validate() const {
  if (!std::isfinite(threshold)) fail(ErrorKind::kConfig, "criterion threshold must be finite");
  if (!(epsilon_pct > 0.0)) fail(ErrorKind::kConfig, "epsilon_pct must be > 0");
  if (alpha == 0.0) fail(ErrorKind::kConfig, "alpha must be > 0");
  if (sigma_eps_pct == 0.0) fail(ErrorKind::kConfig, "sigma_eps_pct must be > 0");
}

nlohmann::json to_json(const CriterionSpec& spec) {
  nlohmann::json j{{"criterion", to_string(spec.kind)}, {"delta_pct", spec.delta_pct}};
  if (spec.inversion()) {
    j["threshold"] = spec.threshold;
    j["epsilon_pct"] = spec.epsilon_pct;
    j["sigma_eps_pct"] = spec.sigma_eps_pct;
    j["alpha"] = spec.alpha;
    j["band_scale"] = spec.band_scale == BandScale::kStdDev ? "stddev" : "variance";
  }
  return j;
}

CriterionSpec criterion_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("criterion")) fail(ErrorKind::kConfig, "criterion: expected an object with 'criterion'");
  CriterionSpec spec;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "criterion") {
        spec.kind = criterion_kind_from_string(value.get<std::string>());
      } else if (key == "delta_pct") {
        spec.delta_pct = value.get<double>();
      } else if (key == "threshold") {
        spec.threshold = value.get<double>();
      } else if (key == "epsilon_pct") {
        spec.epsilon_pct = value.get<double>();
      } else if (key == "sigma_eps_pct") {
        spec.sigma_eps_pct = value.get<double>();
      } else if (key == "alpha") {
        spec.alpha = value.get<double>();
      } else if (key == "band_scale") {
        const auto s = value.get<std::string>();
        if (s != "stddev" && s != "variance") fail(ErrorKind::kConfig, "criterion: band_scale must be stddev or variance");
        spec.band_scale = s == "stddev" ? BandScale::kStdDev : BandScale::kVariance;
      } else {
        fail(ErrorKind::kConfig, "criterion: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::kConfig, "criterion: key '" + key + "' has the wrong type");
    }
  }
  spec.validate();
  return spec;
}

double up_smart_gamma(const UpDistribution& d, double distance, double delta) {
  return up_variance(d) + delta * distance;
}

double eei(const UpDistribution& d, double y_star) {
  return d.weights.dot((y_star - d.predictions.array()).max(0.0).matrix());
}

double up_ei_kappa(const UpDistribution& d, double distance, double delta, double y_star) {
  return eei(d, y_star) + delta * distance;
}

double tmse(const UpDistribution& d, double threshold, double epsilon) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.weights.size(); ++i) {
    if (std::abs(d.predictions(i) - threshold) <= epsilon) total += d.weights(i);
  }
  return total;
}

double tmse_regularized(const UpDistribution& d, double threshold, double sigma_eps) {
  const double norm = 1.0 / (sigma_eps * std::sqrt(2.0 * std::numbers::pi));
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.weights.size(); ++i) {
    const double u = (d.predictions(i) - threshold) / sigma_eps;
    total += d.weights(i) * norm * std::exp(-0.5 * u * u);
  }
  return total;
}

double log_tmse_regularized(const UpDistribution& d, double threshold, double sigma_eps) {
  const Eigen::ArrayXd u = (d.predictions.array() - threshold) / sigma_eps;
  const Eigen::ArrayXd terms = d.weights.array().log() - 0.5 * u.square();
  const double top = terms.maxCoeff();
  return top + std::log((terms - top).exp().sum()) - std::log(sigma_eps * std::sqrt(2.0 * std::numbers::pi));
}

double bichon_ef(const UpDistribution& d, double threshold, double epsilon_x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.weights.size(); ++i) {
    const double gap = std::abs(d.predictions(i) - threshold);
    if (gap <= epsilon_x) total += d.weights(i) * (epsilon_x - gap);
  }
  return total;
}

double ranjan(const UpDistribution& d, double threshold, double epsilon_x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.weights.size(); ++i) {
    const double gap = d.predictions(i) - threshold;
    if (std::abs(gap) <= epsilon_x) total += d.weights(i) * (epsilon_x * epsilon_x - gap * gap);
  }
  return total;
}

double band_half_width(const UpDistribution& d, double alpha, BandScale scale) {
  const double var = up_variance(d);
  return alpha * (scale == BandScale::kStdDev ? std::sqrt(var) : var);
}

double gaussian_ei(double mean, double sd, double y_star) {
  if (!(sd > 0.0)) return 0.0;
  const double u = (y_star - mean) / sd;
  return std::max(0.0, (y_star - mean) * normal_cdf(u) + sd * normal_pdf(u));
}

double up_smart_gamma(const Point& x, const UpPredictor& up, double delta) {
  return up_smart_gamma(up.at(x), up.distance_to_design(x), delta);
}

double eei(const Point& x, const UpPredictor& up, double y_star) { return eei(up.at(x), y_star); }

double up_ei_kappa(const Point& x, const UpPredictor& up, double delta, double y_star) {
  return up_ei_kappa(up.at(x), up.distance_to_design(x), delta, y_star);
}

double gaussian_ei(const Point& x, const Model& kriging, double y_star) {
  const Prediction p = kriging.predict(x);
  return gaussian_ei(p.mean, std::sqrt(p.model_variance), y_star);
}

CriterionSpec CriterionSpec::with_defaults() const {
  CriterionSpec s = *this;
  if (s.delta_pct < 0.0) {
    s.delta_pct = kind == CriterionKind::kUpEi ? 0.005 : kind == CriterionKind::kUpSmart ? 1.0 : 0.0;
  }
  if (s.sigma_eps_pct <= 0.0) s.sigma_eps_pct = s.epsilon_pct;
  if (s.alpha <= 0.0) s.alpha = kind == CriterionKind::kRanjan ? 1.96 : 2.0;
  return s;
}

ResolvedCriterion resolve(const CriterionSpec& spec, const Dataset& data) {
  spec.validate();
  ResolvedCriterion r;
  r.spec = spec.with_defaults();
  const double range = data.value_range();
  r.delta = r.spec.delta_pct / 100.0 * range;
  r.y_star = data.min_value();
  // A zero range (constant observations) would collapse the band to a point.
  const double scale = range > 0.0 ? range : 1.0;
  r.epsilon = r.spec.epsilon_pct / 100.0 * scale;
  r.sigma_eps = r.spec.sigma_eps_pct / 100.0 * scale;
  r.alpha = r.spec.alpha;
  return r;
}

double evaluate(const ResolvedCriterion& c, const Point& x, const UpPredictor* up, const Model& master) {
  const CriterionKind kind = c.spec.kind;
  if (kind == CriterionKind::kGaussianEi) return gaussian_ei(x, master, c.y_star);
  if (kind == CriterionKind::kKrigingVariance) return master.predict(x).model_variance;
  if (up == nullptr) fail(ErrorKind::kInvalidArgument, "criterion " + to_string(kind) + " needs a UP predictor");

  const UpDistribution d = up->at(x);
  const double penalty = c.delta > 0.0 ? c.delta * up->distance_to_design(x) : 0.0;
  switch (kind) {
    case CriterionKind::kUpSmart: return up_variance(d) + penalty;
    case CriterionKind::kUpEi: return eei(d, c.y_star) + penalty;
    case CriterionKind::kTmse: return tmse(d, c.spec.threshold, c.epsilon) + penalty;
    case CriterionKind::kTmseRegularized: return tmse_regularized(d, c.spec.threshold, c.sigma_eps) + penalty;
    case CriterionKind::kBichon:
      return bichon_ef(d, c.spec.threshold, band_half_width(d, c.alpha, c.spec.band_scale)) + penalty;
    case CriterionKind::kRanjan:
      return ranjan(d, c.spec.threshold, band_half_width(d, c.alpha, c.spec.band_scale)) + penalty;
    default: break;
  }
  fail(ErrorKind::kInvalidArgument, "unhandled criterion");
}

}  // namespace updist
