#include "agile/nn/adam.hpp"

#include <cmath>
#include <string>

#include "agile/errors.hpp"

namespace agile::nn {

AdamState AdamState::for_params(const MlpParams& params, double beta1, double beta2, double eps) {
  AdamState s;
  s.m = GradBundle::zeros_like(params);
  s.v = GradBundle::zeros_like(params);
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  return s;
}

void adam_step(AdamState& state, MlpParams& params, const GradBundle& grads, double lr) {
  if (!(lr > 0.0)) throw ContractError("adam learning rate must be positive");
  if (!same_shape(params, grads) || !same_shape(params, state.m) || !same_shape(params, state.v)) {
    throw ShapeError("adam: gradient/state shape does not match params");
  }
  for (std::size_t i = 0; i < grads.layers.size(); ++i) {
    if (!grads.layers[i].weight.allFinite() || !grads.layers[i].bias.allFinite()) {
      throw NumericError("adam: non-finite gradient in layer " + std::to_string(i));
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.eps;

  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < grads.layers.size(); ++i) {
    update(params.layers[i].weight, state.m.layers[i].weight, state.v.layers[i].weight, grads.layers[i].weight);
    update(params.layers[i].bias, state.m.layers[i].bias, state.v.layers[i].bias, grads.layers[i].bias);
  }
}

}  // namespace agile::nn
