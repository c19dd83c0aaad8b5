#pragma once

#include "updist/core.hpp"
#include "updist/rng.hpp"

#include <cmath>
#include <filesystem>
#include <string>

#include <unistd.h>

namespace updist::testing {

inline Bounds random_bounds(std::size_t p, Rng& rng) {
  Eigen::VectorXd lo(static_cast<Eigen::Index>(p));
  Eigen::VectorXd hi(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < lo.size(); ++j) {
    lo(j) = rng.uniform(-5.0, 5.0);
    hi(j) = lo(j) + rng.uniform(0.5, 10.0);
  }
  return Bounds(lo, hi);
}

/// Uniform random points in the box with a smooth response.
inline Dataset random_dataset(std::size_t n, std::size_t p, Rng& rng, const Bounds& b) {
  PointSet xs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd ys(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < xs.cols(); ++j) {
      xs(i, j) = rng.uniform(b.lower()(j), b.upper()(j));
      const double u = (xs(i, j) - b.lower()(j)) / (b.upper()(j) - b.lower()(j));
      acc += std::sin(3.0 * u + static_cast<double>(j)) + u * u;
    }
    ys(i) = acc;
  }
  return Dataset(xs, ys, b);
}

inline Dataset random_dataset(std::size_t n, std::size_t p, Rng& rng) {
  return random_dataset(n, p, rng, random_bounds(p, rng));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("updist_" + tag + "_" + std::to_string(static_cast<unsigned long long>(std::hash<std::string>{}(tag) ^
                                                                                      static_cast<unsigned long long>(::getpid()))));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace updist::testing
