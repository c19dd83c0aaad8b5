#pragma once

#include "updist/surrogate.hpp"

namespace updist::detail {

ModelPtr fit_polynomial(const SurrogateSpec& spec, const Dataset& data);
ModelPtr fit_rbf(const SurrogateSpec& spec, const Dataset& data);
ModelPtr fit_ensemble(const SurrogateSpec& spec, const Dataset& data);

/// Number of monomials of total degree <= degree in p variables.
std::size_t polynomial_basis_size(std::size_t p, int degree);

}  // namespace updist::detail
