#include "updist/surrogate.hpp"

#include "families.hpp"
#include "updist/error.hpp"

#include <set>

namespace updist {

namespace {

template <typename E>
struct Names {
  const char* name;
  E value;
};

constexpr Names<Family> kFamilies[] = {
    {"kriging", Family::kKriging}, {"polynomial", Family::kPolynomial}, {"rbf", Family::kRbf}, {"ensemble", Family::kEnsemble}};
constexpr Names<Covariance> kCovariances[] = {
    {"matern52", Covariance::kMatern52}, {"matern32", Covariance::kMatern32}, {"gaussian", Covariance::kGaussian}};
constexpr Names<RbfKernel> kKernels[] = {{"gaussian", RbfKernel::kGaussian},
                                         {"multiquadric", RbfKernel::kMultiquadric},
                                         {"cubic", RbfKernel::kCubic},
                                         {"thin_plate", RbfKernel::kThinPlate}};

template <typename E, std::size_t N>
E lookup(const Names<E> (&table)[N], const std::string& name, const char* what) {
  for (const auto& entry : table) {
    if (name == entry.name) return entry.value;
  }
  fail(ErrorKind::kConfig, std::string("unknown ") + what + " '" + name + "'");
}

template <typename E, std::size_t N>
const char* name_of(const Names<E> (&table)[N], E value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "?";
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) fail(ErrorKind::kConfig, std::string(where) + ": unknown key '" + key + "'");
  }
}

}  // namespace

std::string to_string(Family f) { return name_of(kFamilies, f); }

SurrogateSpec SurrogateSpec::kriging_default() { return SurrogateSpec{}; }

void SurrogateSpec::validate() const {
  switch (family) {
    case Family::kKriging:
      if (!(kriging.nugget >= 0.0)) fail(ErrorKind::kConfig, "kriging nugget must be >= 0");
      if (!(kriging.min_lengthscale > 0.0 && kriging.min_lengthscale < kriging.max_lengthscale)) {
        fail(ErrorKind::kConfig, "kriging lengthscale bounds must satisfy 0 < min < max");
      }
      if (kriging.max_evaluations == 0) fail(ErrorKind::kConfig, "kriging max_evaluations must be positive");
      break;
    case Family::kPolynomial:
      if (polynomial.degree < 0 || polynomial.degree > 8) fail(ErrorKind::kConfig, "polynomial degree must be in [0, 8]");
      break;
    case Family::kRbf:
      if (!(rbf.shape > 0.0)) fail(ErrorKind::kConfig, "rbf shape must be > 0");
      break;
    case Family::kEnsemble:
      if (members.empty()) fail(ErrorKind::kConfig, "ensemble needs at least one member");
      for (const auto& m : members) {
        if (m.family == Family::kEnsemble) fail(ErrorKind::kConfig, "ensembles cannot be nested");
        m.validate();
      }
      break;
  }
}

nlohmann::json to_json(const SurrogateSpec& spec) {
  nlohmann::json j;
  j["family"] = name_of(kFamilies, spec.family);
  switch (spec.family) {
    case Family::kKriging:
      j["covariance"] = name_of(kCovariances, spec.kriging.covariance);
      j["nugget"] = spec.kriging.nugget;
      j["restarts"] = spec.kriging.restarts;
      j["max_evaluations"] = spec.kriging.max_evaluations;
      j["min_lengthscale"] = spec.kriging.min_lengthscale;
      j["max_lengthscale"] = spec.kriging.max_lengthscale;
      j["seed"] = spec.kriging.seed;
      j["full_loo_refit"] = spec.kriging.full_loo_refit;
      break;
    case Family::kPolynomial:
      j["degree"] = spec.polynomial.degree;
      break;
    case Family::kRbf:
      j["kernel"] = name_of(kKernels, spec.rbf.kernel);
      j["shape"] = spec.rbf.shape;
      break;
    case Family::kEnsemble:
      j["members"] = nlohmann::json::array();
      for (const auto& m : spec.members) j["members"].push_back(to_json(m));
      break;
  }
  return j;
}

SurrogateSpec surrogate_spec_from_json(const nlohmann::json& j) {
  SurrogateSpec spec;
  if (j.is_string()) {
    spec.family = lookup(kFamilies, j.get<std::string>(), "surrogate family");
    if (spec.family == Family::kEnsemble) {
      SurrogateSpec krig;
      SurrogateSpec poly;
      poly.family = Family::kPolynomial;
      SurrogateSpec rbf;
      rbf.family = Family::kRbf;
      spec.members = {krig, poly, rbf};
    }
    spec.validate();
    return spec;
  }
  if (!j.is_object() || !j.contains("family")) fail(ErrorKind::kConfig, "surrogate: expected an object with 'family'");
  try {
    spec.family = lookup(kFamilies, j.at("family").get<std::string>(), "surrogate family");
    switch (spec.family) {
      case Family::kKriging: {
        reject_unknown_keys(j, {"family", "covariance", "nugget", "restarts", "max_evaluations", "min_lengthscale",
                                "max_lengthscale", "seed", "full_loo_refit"},
                            "surrogate");
        auto& k = spec.kriging;
        if (j.contains("covariance")) k.covariance = lookup(kCovariances, j["covariance"].get<std::string>(), "covariance");
        k.nugget = j.value("nugget", k.nugget);
        k.restarts = j.value("restarts", k.restarts);
        k.max_evaluations = j.value("max_evaluations", k.max_evaluations);
        k.min_lengthscale = j.value("min_lengthscale", k.min_lengthscale);
        k.max_lengthscale = j.value("max_lengthscale", k.max_lengthscale);
        k.seed = j.value("seed", k.seed);
        k.full_loo_refit = j.value("full_loo_refit", k.full_loo_refit);
        break;
      }
      case Family::kPolynomial:
        reject_unknown_keys(j, {"family", "degree"}, "surrogate");
        spec.polynomial.degree = j.value("degree", spec.polynomial.degree);
        break;
      case Family::kRbf:
        reject_unknown_keys(j, {"family", "kernel", "shape"}, "surrogate");
        if (j.contains("kernel")) spec.rbf.kernel = lookup(kKernels, j["kernel"].get<std::string>(), "rbf kernel");
        spec.rbf.shape = j.value("shape", spec.rbf.shape);
        break;
      case Family::kEnsemble:
        reject_unknown_keys(j, {"family", "members"}, "surrogate");
        for (const auto& m : j.at("members")) spec.members.push_back(surrogate_spec_from_json(m));
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, std::string("surrogate: ") + e.what());
  }
  spec.validate();
  return spec;
}

Eigen::VectorXd Model::loo_predict(const Point&) const {
  fail(ErrorKind::kInvalidArgument, "this model family has no closed-form leave-one-out predictor");
}

ModelPtr fit(const SurrogateSpec& spec, const Dataset& data) {
  spec.validate();
  switch (spec.family) {
    case Family::kKriging: return std::make_shared<KrigingModel>(spec, data);
    case Family::kPolynomial: return detail::fit_polynomial(spec, data);
    case Family::kRbf: return detail::fit_rbf(spec, data);
    case Family::kEnsemble: return detail::fit_ensemble(spec, data);
  }
  fail(ErrorKind::kInvalidArgument, "unknown surrogate family");
}

CvEnsemble::CvEnsemble(ModelPtr master) : master_(std::move(master)) {
  if (!master_->has_fast_loo()) {
    fail(ErrorKind::kInvalidArgument, "CvEnsemble: master has no closed-form leave-one-out predictor");
  }
}

CvEnsemble::CvEnsemble(ModelPtr master, std::vector<ModelPtr> subs) : master_(std::move(master)), subs_(std::move(subs)) {
  if (subs_.size() != master_->data().size()) fail(ErrorKind::kInvalidArgument, "CvEnsemble: need one sub-model per observation");
}

Eigen::VectorXd CvEnsemble::predict(const Point& x) const {
  if (subs_.empty()) return master_->loo_predict(x);
  Eigen::VectorXd out(static_cast<Eigen::Index>(subs_.size()));
  for (std::size_t i = 0; i < subs_.size(); ++i) out(static_cast<Eigen::Index>(i)) = subs_[i]->predict_mean(x);
  return out;
}

Eigen::VectorXd CvEnsemble::loo_errors() const {
  const Dataset& d = data();
  Eigen::VectorXd e(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    e(static_cast<Eigen::Index>(i)) = predict(d.point(i))(static_cast<Eigen::Index>(i)) - d.value(i);
  }
  return e;
}

CvEnsemble fit_loo_submodels(const SurrogateSpec& spec, const Dataset& data, ModelPtr master) {
  if (data.size() < 3) fail(ErrorKind::kInvalidArgument, "leave-one-out sub-models need at least 3 observations");
  if (!master) master = fit(spec, data);
  const bool refit = spec.family == Family::kPolynomial ||
                     (spec.family == Family::kKriging && spec.kriging.full_loo_refit) || !master->has_fast_loo();
  if (!refit) return CvEnsemble(master);

  std::vector<ModelPtr> subs;
  subs.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      subs.push_back(fit(spec, data.without(i)));
    } catch (const Error& e) {
      fail(e.kind(), "leave-one-out sub-model " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return CvEnsemble(std::move(master), std::move(subs));
}

}  // namespace updist
