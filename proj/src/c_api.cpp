#include "updist/updist.h"

#include "updist/benchfns.hpp"
#include "updist/campaign.hpp"
#include "updist/criteria.hpp"
#include "updist/doe.hpp"
#include "updist/error.hpp"

#include <cstring>
#include <fstream>
#include <new>

struct upd_dataset {
  updist::Dataset data;
};

struct upd_model {
  updist::ModelPtr model;
};

struct upd_up {
  updist::UpPredictor predictor;
};

namespace {

thread_local std::string g_last_error;

upd_status status_of(updist::ErrorKind kind) {
  switch (kind) {
    case updist::ErrorKind::kRun:
      return UPD_ERR_RUN;
    case updist::ErrorKind::kConfig:
      return UPD_ERR_CONFIG;
    case updist::ErrorKind::kInvalidArgument:
      return UPD_ERR_INVALID_ARGUMENT;
    case updist::ErrorKind::kNumeric:
      return UPD_ERR_NUMERIC;
    case updist::ErrorKind::kIo:
      return UPD_ERR_IO;
  }
  return UPD_ERR_INTERNAL;
}

template <typename F>
upd_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const updist::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return UPD_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return UPD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UPD_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) updist::fail(updist::ErrorKind::kInvalidArgument, what);
}

updist::Point point_of(const double* x, std::size_t p) {
  updist::Point out(static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) out(static_cast<Eigen::Index>(j)) = x[j];
  return out;
}

updist::Bounds bounds_of(const double* lower, const double* upper, std::size_t p) {
  return updist::Bounds(point_of(lower, p), point_of(upper, p));
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* upd_last_error(void) { return g_last_error.c_str(); }

const char* upd_version(void) { return updist::kLibraryVersion; }

void upd_string_free(char* s) { std::free(s); }

upd_status upd_dataset_create(const double* points, const double* values, size_t n, size_t p, const double* lower,
                              const double* upper, upd_dataset** out) {
  return guarded([&] {
    require(points && values && lower && upper && out, "null argument");
    require(p > 0, "dimension must be positive");
    updist::PointSet xs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    Eigen::VectorXd ys(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = points[i * p + j];
      ys(static_cast<Eigen::Index>(i)) = values[i];
    }
    *out = new upd_dataset{updist::Dataset(xs, ys, bounds_of(lower, upper, p))};
    return UPD_OK;
  });
}

upd_status upd_dataset_load_csv(const char* path, const char* bounds, upd_dataset** out) {
  return guarded([&] {
    require(path && bounds && out, "null argument");
    *out = new upd_dataset{updist::read_dataset_csv(path, updist::Bounds::parse(bounds))};
    return UPD_OK;
  });
}

upd_status upd_dataset_size(const upd_dataset* data, size_t* n, size_t* p) {
  return guarded([&] {
    require(data && n && p, "null argument");
    *n = data->data.size();
    *p = data->data.dim();
    return UPD_OK;
  });
}

void upd_dataset_free(upd_dataset* data) { delete data; }

upd_status upd_model_fit(const upd_dataset* data, const char* spec_json, upd_model** out) {
  return guarded([&] {
    require(data && out, "null argument");
    updist::SurrogateSpec spec;
    if (spec_json != nullptr) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(spec_json);
      } catch (const nlohmann::json::parse_error&) {
        j = std::string(spec_json);
      }
      spec = updist::surrogate_spec_from_json(j);
    }
    *out = new upd_model{updist::fit(spec, data->data)};
    return UPD_OK;
  });
}

upd_status upd_model_predict(const upd_model* model, const double* x, double* mean, double* variance) {
  return guarded([&] {
    require(model && x && mean, "null argument");
    const auto pred = model->model->predict(point_of(x, model->model->data().dim()));
    *mean = pred.mean;
    if (variance != nullptr) *variance = pred.model_variance;
    return UPD_OK;
  });
}

upd_status upd_model_describe(const upd_model* model, char** json_out) {
  return guarded([&] {
    require(model && json_out, "null argument");
    *json_out = copy_string(model->model->describe().dump());
    return UPD_OK;
  });
}

void upd_model_free(upd_model* model) { delete model; }

upd_status upd_up_create(const upd_model* model, const char* up_json, upd_up** out) {
  return guarded([&] {
    require(model && out, "null argument");
    updist::UpParams params;
    if (up_json != nullptr) {
      const auto j = nlohmann::json::parse(up_json);
      for (const auto& [key, value] : j.items()) {
        if (key != "rho") updist::fail(updist::ErrorKind::kConfig, "up: unknown key '" + key + "'");
        if (value.is_string() && value.get<std::string>() == "dbar") {
          params.rho_policy = updist::RhoPolicy::kDbar;
        } else if (value.is_number() && value.get<double>() > 0.0) {
          params.rho_policy = updist::RhoPolicy::kFixed;
          params.rho = value.get<double>();
        } else {
          updist::fail(updist::ErrorKind::kConfig, "up: rho must be \"dbar\" or a positive number");
        }
      }
    }
    const auto& master = model->model;
    auto cv = std::make_shared<const updist::CvEnsemble>(
        updist::fit_loo_submodels(master->spec(), master->data(), master));
    *out = new upd_up{updist::UpPredictor(cv, params)};
    return UPD_OK;
  });
}

upd_status upd_up_eval(const upd_up* up, const double* x, double* mean, double* variance, double* weights,
                       double* predictions) {
  return guarded([&] {
    require(up && x, "null argument");
    const auto d = up->predictor.at(point_of(x, up->predictor.data().dim()));
    if (mean != nullptr) *mean = updist::up_mean(d);
    if (variance != nullptr) *variance = updist::up_variance(d);
    for (Eigen::Index i = 0; i < d.weights.size(); ++i) {
      if (weights != nullptr) weights[i] = d.weights(i);
      if (predictions != nullptr) predictions[i] = d.predictions(i);
    }
    return UPD_OK;
  });
}

upd_status upd_up_rho(const upd_up* up, double* rho) {
  return guarded([&] {
    require(up && rho, "null argument");
    *rho = up->predictor.rho();
    return UPD_OK;
  });
}

upd_status upd_criterion_eval(const upd_up* up, const char* criterion_json, const double* x, double* value) {
  return guarded([&] {
    require(up && criterion_json && x && value, "null argument");
    const auto spec = updist::criterion_spec_from_json(nlohmann::json::parse(criterion_json));
    const auto resolved = updist::resolve(spec, up->predictor.data());
    *value = updist::evaluate(resolved, point_of(x, up->predictor.data().dim()), &up->predictor,
                              up->predictor.ensemble().master());
    return UPD_OK;
  });
}

void upd_up_free(upd_up* up) { delete up; }

upd_status upd_lhs(size_t n, size_t p, uint64_t seed, const double* lower, const double* upper, double* out) {
  return guarded([&] {
    require(lower && upper && out, "null argument");
    const auto xs = updist::lhs(updist::DoeConfig{n, p, seed}, bounds_of(lower, upper, p));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) out[i * p + j] = xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return UPD_OK;
  });
}

upd_status upd_write_design_csv(const char* path, const double* points, const double* values, size_t n, size_t p) {
  return guarded([&] {
    require(path && points, "null argument");
    updist::PointSet xs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    Eigen::VectorXd ys(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = points[i * p + j];
      if (values != nullptr) ys(static_cast<Eigen::Index>(i)) = values[i];
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) updist::fail(updist::ErrorKind::kIo, std::string("cannot write ") + path);
    updist::write_design_csv(file, xs, values != nullptr ? &ys : nullptr);
    if (!file) updist::fail(updist::ErrorKind::kIo, std::string("write failed: ") + path);
    return UPD_OK;
  });
}

upd_status upd_benchmark_info(const char* name, size_t* p, double* lower, double* upper) {
  return guarded([&] {
    require(name && p, "null argument");
    const auto b = updist::benchmark_by_name(name);
    *p = b.dim();
    for (std::size_t j = 0; j < b.dim(); ++j) {
      if (lower != nullptr) lower[j] = b.bounds.lower()(static_cast<Eigen::Index>(j));
      if (upper != nullptr) upper[j] = b.bounds.upper()(static_cast<Eigen::Index>(j));
    }
    return UPD_OK;
  });
}

upd_status upd_benchmark_eval(const char* name, const double* x, size_t p, double* value) {
  return guarded([&] {
    require(name && x && value, "null argument");
    const auto b = updist::benchmark_by_name(name);
    if (p != b.dim()) updist::fail(updist::ErrorKind::kInvalidArgument, std::string(name) + " expects dimension " + std::to_string(b.dim()));
    *value = b.evaluate(point_of(x, p));
    return UPD_OK;
  });
}

upd_status upd_run_campaign(const char* subcommand, const char* config_path, const char* out_dir, size_t jobs,
                            int64_t seed_offset, size_t* runs, size_t* failures) {
  return guarded([&] {
    require(subcommand && config_path && out_dir, "null argument");
    const auto cfg = updist::load_campaign(config_path, subcommand);
    const auto result = updist::run_campaign(cfg, out_dir, jobs, seed_offset);
    std::size_t total = 0;
    std::string first_error;
    for (const auto& [method, records] : result.records) {
      total += records.size();
      for (const auto& r : records) {
        if (r.failed() && first_error.empty()) {
          first_error = method + " seed " + std::to_string(r.seed) + ": " + r.error;
        }
      }
    }
    if (runs != nullptr) *runs = total;
    if (failures != nullptr) *failures = result.failures;
    if (result.failures > 0) {
      g_last_error = std::to_string(result.failures) + " of " + std::to_string(total) + " runs failed; first: " + first_error;
      return UPD_ERR_RUN;
    }
    return UPD_OK;
  });
}

upd_status upd_validate_file(const char* path) {
  return guarded([&] {
    require(path != nullptr, "null argument");
    updist::validate_file(path);
    return UPD_OK;
  });
}

}  // extern "C"
