#pragma once

#include "updist/core.hpp"

#include <cstddef>
#include <cstdint>

namespace updist {

struct DoeConfig {
  std::size_t n = 10;
  std::size_t p = 1;
  std::uint64_t seed = 0;
  std::size_t maximin_iters = 1000;
};

/// Latin hypercube design in the box: one point per stratum on every axis,
/// then `maximin_iters` random within-column swaps, each kept only if the
/// minimum pairwise distance does not drop.
PointSet lhs(const DoeConfig& cfg, const Bounds& b);

/// Tensor grid with n_per_axis points per axis, corners included.
PointSet full_grid(std::size_t n_per_axis, const Bounds& b);

inline constexpr std::size_t kMaxGridPoints = 10'000'000;

}  // namespace updist
