#include "updist/doe.hpp"

#include "updist/error.hpp"
#include "updist/rng.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace updist {

PointSet lhs(const DoeConfig& cfg, const Bounds& b) {
  if (cfg.n < 2) fail(ErrorKind::kInvalidArgument, "lhs: need n >= 2");
  if (cfg.p != b.dim()) fail(ErrorKind::kInvalidArgument, "lhs: dimension does not match bounds");
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto p = static_cast<Eigen::Index>(cfg.p);
  Rng rng(cfg.seed);

  // Unit-cube design: stratum index plus jitter.
  PointSet unit(n, p);
  std::vector<std::size_t> perm(cfg.n);
  for (Eigen::Index j = 0; j < p; ++j) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    for (Eigen::Index i = 0; i < n; ++i) {
      unit(i, j) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + rng.uniform()) / static_cast<double>(n);
    }
  }

  if (cfg.maximin_iters > 0) {
    double current = min_pairwise_dist(unit);
    for (std::size_t it = 0; it < cfg.maximin_iters; ++it) {
      const auto col = static_cast<Eigen::Index>(rng.index(cfg.p));
      const auto a = static_cast<Eigen::Index>(rng.index(cfg.n));
      auto c = static_cast<Eigen::Index>(rng.index(cfg.n - 1));
      if (c >= a) ++c;
      std::swap(unit(a, col), unit(c, col));
      const double candidate = min_pairwise_dist(unit);
      if (candidate >= current) {
        current = candidate;
      } else {
        std::swap(unit(a, col), unit(c, col));
      }
    }
  }

  PointSet out(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out(i, j) = b.lower()(j) + unit(i, j) * (b.upper()(j) - b.lower()(j));
    }
  }
  return out;
}

PointSet full_grid(std::size_t n_per_axis, const Bounds& b) {
  if (n_per_axis < 2) fail(ErrorKind::kInvalidArgument, "full_grid: need at least 2 points per axis");
  const std::size_t p = b.dim();
  double total = std::pow(static_cast<double>(n_per_axis), static_cast<double>(p));
  if (total > static_cast<double>(kMaxGridPoints)) {
    fail(ErrorKind::kInvalidArgument, "full_grid: " + std::to_string(n_per_axis) + "^" + std::to_string(p) +
                                          " points exceeds the grid limit");
  }
  const auto count = static_cast<Eigen::Index>(std::llround(total));
  PointSet out(count, static_cast<Eigen::Index>(p));
  std::vector<std::size_t> idx(p, 0);
  for (Eigen::Index r = 0; r < count; ++r) {
    for (std::size_t j = 0; j < p; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double t = static_cast<double>(idx[j]) / static_cast<double>(n_per_axis - 1);
      out(r, jj) = idx[j] + 1 == n_per_axis ? b.upper()(jj) : b.lower()(jj) + t * (b.upper()(jj) - b.lower()(jj));
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (++idx[j] < n_per_axis) break;
      idx[j] = 0;
    }
  }
  return out;
}

}  // namespace updist
