#pragma once

#include <functional>

#include "agile/nn/mlp.hpp"

namespace agile::nn {

// Central finite differences of a scalar objective over every parameter.
GradBundle finite_difference(const std::function<double(const MlpParams&)>& objective, const MlpParams& params,
                             double h = 1e-5);

// Central finite differences with respect to an input vector.
Vector finite_difference(const std::function<double(const Vector&)>& objective, const Vector& x, double h = 1e-5);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps entries
// that are zero in both bundles from dividing by zero.
double max_relative_error(const GradBundle& a, const GradBundle& b, double floor = 1e-6);
double max_relative_error(const Vector& a, const Vector& b, double floor = 1e-6);

}  // namespace agile::nn
