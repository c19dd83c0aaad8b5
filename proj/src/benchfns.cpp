#include "updist/benchfns.hpp"

#include "updist/error.hpp"

#include <cmath>
#include <numbers>

namespace updist {

namespace {

constexpr double kHartmannAlpha[4] = {1.0, 1.2, 3.0, 3.2};
constexpr double kHartmannA[4][6] = {
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
};
constexpr double kHartmannP[4][6] = {
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
};

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) p(i++) = c;
  return p;
}

Bounds box(std::initializer_list<double> lo, std::initializer_list<double> hi) { return Bounds(pt(lo), pt(hi)); }

}  // namespace

double viana(double x) { return (10.0 * std::cos(2.0 * x) + 15.0 - 5.0 * x + x * x) / 50.0; }

double branin(double x1, double x2) {
  constexpr double pi = std::numbers::pi;
  const double a = x2 - 5.1 / (4.0 * pi * pi) * x1 * x1 + 5.0 / pi * x1 - 6.0;
  return a * a + 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(x1) + 10.0;
}

double camel(double x1, double x2) {
  const double x1sq = x1 * x1;
  return (4.0 - 2.1 * x1sq + x1sq * x1sq / 3.0) * x1sq + x1 * x2 + x2 * x2 * (4.0 * x2 * x2 - 4.0);
}

double hartmann6(const Point& x) {
  if (x.size() != 6) fail(ErrorKind::kInvalidArgument, "hartmann6: expected 6 coordinates");
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x(j) - kHartmannP[i][j];
      inner += kHartmannA[i][j] * d * d;
    }
    total += kHartmannAlpha[i] * std::exp(-inner);
  }
  return -total;
}

double ackley(double x1, double x2) {
  constexpr double a = 20.0;
  constexpr double b = 0.2;
  constexpr double c = 2.0 * std::numbers::pi;
  const double r = std::sqrt(0.5 * (x1 * x1 + x2 * x2));
  const double s = 0.5 * (std::cos(c * x1) + std::cos(c * x2));
  return -a * std::exp(-b * r) - std::exp(s) + a + std::numbers::e;
}

Benchmark benchmark_by_name(const std::string& name) {
  constexpr double pi = std::numbers::pi;
  auto check = [](const Point& x, Eigen::Index p, const char* what) {
    if (x.size() != p) fail(ErrorKind::kInvalidArgument, std::string(what) + ": wrong dimension");
  };
  if (name == "viana") {
    return {name, box({-3.0}, {3.0}), [check](const Point& x) { check(x, 1, "viana"); return viana(x(0)); }, {}};
  }
  if (name == "branin") {
    return {name,
            box({-5.0, 0.0}, {10.0, 15.0}),
            [check](const Point& x) { check(x, 2, "branin"); return branin(x(0), x(1)); },
            {{pt({-pi, 12.275}), 0.39788735772973816},
             {pt({pi, 2.275}), 0.39788735772973816},
             {pt({3.0 * pi, 2.475}), 0.39788735772973816}}};
  }
  if (name == "camel") {
    return {name,
            box({-3.0, -2.0}, {3.0, 2.0}),
            [check](const Point& x) { check(x, 2, "camel"); return camel(x(0), x(1)); },
            {{pt({0.0898420131, -0.7126564030}), -1.0316284534898774},
             {pt({-0.0898420131, 0.7126564030}), -1.0316284534898774}}};
  }
  if (name == "hartmann6") {
    return {name,
            Bounds(Eigen::VectorXd::Zero(6), Eigen::VectorXd::Ones(6)),
            [](const Point& x) { return hartmann6(x); },
            {{pt({0.20168952, 0.15001069, 0.47687398, 0.27533243, 0.31165162, 0.65730054}), -3.3223680114155156}}};
  }
  if (name == "ackley") {
    return {name,
            box({-5.0, -5.0}, {5.0, 5.0}),
            [check](const Point& x) { check(x, 2, "ackley"); return ackley(x(0), x(1)); },
            {{pt({0.0, 0.0}), 0.0}}};
  }
  fail(ErrorKind::kConfig, "unknown benchmark '" + name + "'");
}

std::vector<std::string> benchmark_names() { return {"viana", "branin", "camel", "hartmann6", "ackley"}; }

}  // namespace updist
