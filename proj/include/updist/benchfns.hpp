#pragma once

#include "updist/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace updist {

double viana(double x);
double branin(double x1, double x2);
double camel(double x1, double x2);
/// Hartmann 6-D on [0,1]^6 with the Dixon-Szego constants.
double hartmann6(const Point& x);
/// Ackley with (a, b, c) = (20, 0.2, 2 pi).
double ackley(double x1, double x2);

struct KnownMinimum {
  Point location;
  double value;
};

struct Benchmark {
  std::string name;
  Bounds bounds;
  std::function<double(const Point&)> evaluate;
  std::vector<KnownMinimum> known_minima;

  std::size_t dim() const { return bounds.dim(); }
};

/// viana, branin, camel, hartmann6, ackley.
Benchmark benchmark_by_name(const std::string& name);
std::vector<std::string> benchmark_names();

}  // namespace updist
