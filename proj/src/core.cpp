#include "updist/core.hpp"

#include "updist/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace updist {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(ErrorKind::kIo, where + ": not a number: '" + t + "'");
  }
  return v;
}

}  // namespace

Bounds::Bounds(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    fail(ErrorKind::kInvalidArgument, "bounds: lower/upper dimension mismatch");
  }
  for (Eigen::Index j = 0; j < lower_.size(); ++j) {
    if (!(lower_(j) < upper_(j)) || !std::isfinite(lower_(j)) || !std::isfinite(upper_(j))) {
      fail(ErrorKind::kInvalidArgument, "bounds: need finite lower < upper on axis " + std::to_string(j + 1));
    }
  }
}

Bounds Bounds::unit(std::size_t p) {
  const auto n = static_cast<Eigen::Index>(p);
  return Bounds(Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Constant(n, 1.0));
}

Bounds Bounds::parse(const std::string& text) {
  const auto axes = split(text, ',');
  Eigen::VectorXd lo(static_cast<Eigen::Index>(axes.size()));
  Eigen::VectorXd hi(lo.size());
  for (std::size_t j = 0; j < axes.size(); ++j) {
    const auto parts = split(axes[j], ':');
    if (parts.size() != 2) fail(ErrorKind::kInvalidArgument, "bounds: expected lo:hi, got '" + axes[j] + "'");
    lo(static_cast<Eigen::Index>(j)) = parse_number(parts[0], "bounds");
    hi(static_cast<Eigen::Index>(j)) = parse_number(parts[1], "bounds");
  }
  return Bounds(lo, hi);
}

bool Bounds::contains(const Point& x, double slack) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double w = (upper_(j) - lower_(j)) * slack;
    if (x(j) < lower_(j) - w || x(j) > upper_(j) + w) return false;
  }
  return true;
}

Point Bounds::clamp(const Point& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

bool Bounds::operator==(const Bounds& other) const {
  return lower_ == other.lower_ && upper_ == other.upper_;
}

Point scale_to_unit(const Point& x, const Bounds& b) {
  if (static_cast<std::size_t>(x.size()) != b.dim()) {
    fail(ErrorKind::kInvalidArgument, "scale_to_unit: dimension mismatch");
  }
  return (2.0 * (x - b.lower()).array() / (b.upper() - b.lower()).array() - 1.0).matrix();
}

Point unscale_from_unit(const Point& u, const Bounds& b) {
  if (static_cast<std::size_t>(u.size()) != b.dim()) {
    fail(ErrorKind::kInvalidArgument, "unscale_from_unit: dimension mismatch");
  }
  return (b.lower().array() + (u.array() + 1.0) * 0.5 * (b.upper() - b.lower()).array()).matrix();
}

PointSet scale_rows_to_unit(const PointSet& xs, const Bounds& b) {
  if (static_cast<std::size_t>(xs.cols()) != b.dim()) {
    fail(ErrorKind::kInvalidArgument, "scale_rows_to_unit: dimension mismatch");
  }
  PointSet out(xs.rows(), xs.cols());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.row(i) = scale_to_unit(xs.row(i).transpose(), b).transpose();
  return out;
}

double min_dist(const Point& x, const PointSet& a) {
  if (a.rows() == 0) fail(ErrorKind::kInvalidArgument, "min_dist: empty point set");
  if (a.cols() != x.size()) fail(ErrorKind::kInvalidArgument, "min_dist: dimension mismatch");
  return std::sqrt((a.rowwise() - x.transpose()).rowwise().squaredNorm().minCoeff());
}

double dbar(const PointSet& a) {
  if (a.rows() < 2) fail(ErrorKind::kInvalidArgument, "dbar: need at least 2 points");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      if (j != i) nearest = std::min(nearest, (a.row(i) - a.row(j)).squaredNorm());
    }
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

double min_pairwise_dist(const PointSet& a) {
  if (a.rows() < 2) fail(ErrorKind::kInvalidArgument, "min_pairwise_dist: need at least 2 points");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.rows(); ++j) best = std::min(best, (a.row(i) - a.row(j)).squaredNorm());
  }
  return std::sqrt(best);
}

Dataset::Dataset(PointSet points, Eigen::VectorXd values, Bounds bounds)
    : points_(std::move(points)), values_(std::move(values)), bounds_(std::move(bounds)) {
  if (points_.rows() != values_.size()) fail(ErrorKind::kInvalidArgument, "dataset: |X| != |Y|");
  if (points_.rows() < 2) fail(ErrorKind::kInvalidArgument, "dataset: need at least 2 observations");
  if (static_cast<std::size_t>(points_.cols()) != bounds_.dim()) {
    fail(ErrorKind::kInvalidArgument, "dataset: point dimension does not match bounds");
  }
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (!std::isfinite(values_(i)) || !points_.row(i).allFinite()) {
      fail(ErrorKind::kInvalidArgument, "dataset: non-finite entry in observation " + std::to_string(i + 1));
    }
    if (!bounds_.contains(points_.row(i).transpose(), 1e-9)) {
      fail(ErrorKind::kInvalidArgument, "dataset: observation " + std::to_string(i + 1) + " lies outside bounds");
    }
  }
  scaled_ = scale_rows_to_unit(points_, bounds_);
  for (Eigen::Index i = 0; i < scaled_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < scaled_.rows(); ++j) {
      if ((scaled_.row(i) - scaled_.row(j)).norm() < kDuplicateTolerance) {
        fail(ErrorKind::kInvalidArgument, "dataset: observations " + std::to_string(i + 1) + " and " +
                                              std::to_string(j + 1) + " are duplicates");
      }
    }
  }
}

Dataset Dataset::without(std::size_t i) const {
  const auto n = points_.rows();
  const auto k = static_cast<Eigen::Index>(i);
  if (k >= n) fail(ErrorKind::kInvalidArgument, "dataset: index out of range");
  PointSet xs(n - 1, points_.cols());
  Eigen::VectorXd ys(n - 1);
  for (Eigen::Index r = 0, o = 0; r < n; ++r) {
    if (r == k) continue;
    xs.row(o) = points_.row(r);
    ys(o) = values_(r);
    ++o;
  }
  return Dataset(std::move(xs), std::move(ys), bounds_);
}

Dataset Dataset::with(const Point& x, double y) const {
  PointSet xs(points_.rows() + 1, points_.cols());
  xs.topRows(points_.rows()) = points_;
  xs.row(points_.rows()) = x.transpose();
  Eigen::VectorXd ys(values_.size() + 1);
  ys.head(values_.size()) = values_;
  ys(values_.size()) = y;
  return Dataset(std::move(xs), std::move(ys), bounds_);
}

PointSet read_design_csv(const std::string& path, std::vector<double>* values) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kIo, path + ": empty file");
  const auto header = split(trim(line), ',');
  std::size_t p = 0;
  while (p < header.size() && trim(header[p]) == "x" + std::to_string(p + 1)) ++p;
  const bool has_y = p + 1 == header.size() && trim(header[p]) == "y";
  if (p == 0 || (p != header.size() && !has_y)) {
    fail(ErrorKind::kIo, path + ": header must be x1,...,xp[,y]");
  }
  if (values != nullptr && !has_y) fail(ErrorKind::kIo, path + ": missing y column");
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != header.size()) {
      fail(ErrorKind::kIo, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_number(f, path + ":" + std::to_string(line_no)));
    rows.push_back(std::move(row));
  }
  PointSet xs(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  if (values != nullptr) values->clear();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    if (values != nullptr) values->push_back(rows[i][p]);
  }
  return xs;
}

Dataset read_dataset_csv(const std::string& path, const Bounds& bounds) {
  std::vector<double> ys;
  PointSet xs = read_design_csv(path, &ys);
  return Dataset(std::move(xs), Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())), bounds);
}

void write_design_csv(std::ostream& out, const PointSet& xs, const Eigen::VectorXd* values) {
  for (Eigen::Index j = 0; j < xs.cols(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  if (values != nullptr) out << ",y";
  out << '\n';
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < xs.cols(); ++j) out << (j ? "," : "") << format_double(xs(i, j));
    if (values != nullptr) out << ',' << format_double((*values)(i));
    out << '\n';
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace updist
