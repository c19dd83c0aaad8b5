#pragma once

#include "updist/core.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace updist {

/// An objective computed by a child process: the point is written to its
/// standard input as one line of whitespace-separated reals, and the value is
/// read back as one real from its standard output.
struct ExternalCommand {
  std::vector<std::string> argv;
  double timeout_s = 60.0;
  /// Extra attempts after a timeout or a non-zero exit status.
  std::size_t retries = 0;
};

double evaluate_external(const ExternalCommand& cmd, const Point& x);

}  // namespace updist
