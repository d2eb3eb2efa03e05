#pragma once

#include <cstdint>

#include "agile/nn/mlp.hpp"

namespace agile::nn {

struct AdamState {
  GradBundle m;
  GradBundle v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const MlpParams& params, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
};

// One bias-corrected Adam descent step on `params` in place.
// Throws NumericError naming the layer if `grads` holds a non-finite value;
// neither params nor state are modified in that case.
void adam_step(AdamState& state, MlpParams& params, const GradBundle& grads, double lr);

}  // namespace agile::nn
