#include "updist/minimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <cmath>
#include <limits>
#include <memory>

namespace updist {

namespace {

struct Context {
  const std::function<double(const Eigen::VectorXd&)>* objective;
  Eigen::VectorXd scratch;
  std::size_t evaluations = 0;
  Eigen::VectorXd best_x;
  double best_value = std::numeric_limits<double>::infinity();
};

double trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<Context*>(params);
  for (Eigen::Index j = 0; j < ctx->scratch.size(); ++j) ctx->scratch(j) = gsl_vector_get(v, static_cast<std::size_t>(j));
  ++ctx->evaluations;
  double f = (*ctx->objective)(ctx->scratch);
  if (!std::isfinite(f)) f = std::numeric_limits<double>::max();
  if (f < ctx->best_value) {
    ctx->best_value = f;
    ctx->best_x = ctx->scratch;
  }
  return f;
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                           const Eigen::VectorXd& start, double initial_step, std::size_t max_iterations,
                           double size_tolerance) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;

  const auto dim = static_cast<std::size_t>(start.size());
  Context ctx{&objective, start, 0, start, std::numeric_limits<double>::infinity()};

  if (dim == 0 || max_iterations == 0) {
    return {start, trampoline(nullptr, &ctx), 1};
  }

  std::unique_ptr<gsl_vector, VectorDeleter> x0(gsl_vector_alloc(dim));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(dim));
  for (std::size_t j = 0; j < dim; ++j) gsl_vector_set(x0.get(), j, start(static_cast<Eigen::Index>(j)));
  gsl_vector_set_all(step.get(), initial_step);

  gsl_multimin_function fn{&trampoline, dim, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
  gsl_multimin_fminimizer_set(m.get(), &fn, x0.get(), step.get());

  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(m.get());
    if (gsl_multimin_test_size(size, size_tolerance) == GSL_SUCCESS) break;
  }
  return {ctx.best_x, ctx.best_value, ctx.evaluations};
}

}  // namespace updist
