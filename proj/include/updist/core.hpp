#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace updist {

using Point = Eigen::VectorXd;
/// n x p matrix, one point per row.
using PointSet = Eigen::MatrixXd;

/// Two points closer than this (Euclidean, in [-1,1]^p coordinates) are
/// considered the same design site.
inline constexpr double kDuplicateTolerance = 1e-9;

/// Axis-aligned box [lower, upper].
class Bounds {
 public:
  Bounds() = default;
  Bounds(Eigen::VectorXd lower, Eigen::VectorXd upper);

  /// The box [-1, 1]^p.
  static Bounds unit(std::size_t p);
  /// Parses "lo:hi,lo:hi,...".
  static Bounds parse(const std::string& text);

  std::size_t dim() const { return static_cast<std::size_t>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  bool contains(const Point& x, double slack = 1e-12) const;
  Point clamp(const Point& x) const;

  bool operator==(const Bounds& other) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Affine map from the box onto [-1, 1]^p.
Point scale_to_unit(const Point& x, const Bounds& b);
Point unscale_from_unit(const Point& u, const Bounds& b);
PointSet scale_rows_to_unit(const PointSet& xs, const Bounds& b);

/// Euclidean distance from x to the nearest row of a.
double min_dist(const Point& x, const PointSet& a);
/// Largest nearest-neighbour distance among the rows of a.
double dbar(const PointSet& a);
/// Smallest pairwise distance among the rows of a.
double min_pairwise_dist(const PointSet& a);

/// Observations Z_n = (X_n, Y_n) inside a box. Immutable once built.
class Dataset {
 public:
  Dataset(PointSet points, Eigen::VectorXd values, Bounds bounds);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  std::size_t dim() const { return bounds_.dim(); }
  const PointSet& points() const { return points_; }
  const Eigen::VectorXd& values() const { return values_; }
  const Bounds& bounds() const { return bounds_; }
  /// Points mapped to [-1, 1]^p.
  const PointSet& scaled_points() const { return scaled_; }

  Point point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
  double value(std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

  /// Copy with observation i removed (Z_{n,-i}).
  Dataset without(std::size_t i) const;
  /// Copy with (x, y) appended. Throws on a duplicate site.
  Dataset with(const Point& x, double y) const;

  double min_value() const { return values_.minCoeff(); }
  double value_range() const { return values_.maxCoeff() - values_.minCoeff(); }

 private:
  PointSet points_;
  Eigen::VectorXd values_;
  Bounds bounds_;
  PointSet scaled_;
};

/// CSV with header x1,...,xp,y. Bounds are not stored in the file.
Dataset read_dataset_csv(const std::string& path, const Bounds& bounds);
/// Reads the x columns of a design CSV (a trailing y column is optional).
PointSet read_design_csv(const std::string& path, std::vector<double>* values = nullptr);
void write_design_csv(std::ostream& out, const PointSet& xs, const Eigen::VectorXd* values = nullptr);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace updist
