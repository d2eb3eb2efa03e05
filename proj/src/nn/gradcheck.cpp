#include "agile/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "agile/errors.hpp"

namespace agile::nn {
namespace {

template <typename A, typename B>
double rel_err(const A& a, const B& b, double floor) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    const double denom = std::max({std::abs(x), std::abs(y), floor});
    worst = std::max(worst, std::abs(x - y) / denom);
  }
  return worst;
}

}  // namespace

GradBundle finite_difference(const std::function<double(const MlpParams&)>& objective, const MlpParams& params,
                             double h) {
  GradBundle g = GradBundle::zeros_like(params);
  MlpParams probe = params;
  auto perturb = [&](double& slot, double& out) {
    const double orig = slot;
    slot = orig + h;
    const double up = objective(probe);
    slot = orig - h;
    const double down = objective(probe);
    slot = orig;
    out = (up - down) / (2.0 * h);
  };
  for (std::size_t k = 0; k < probe.layers.size(); ++k) {
    auto& l = probe.layers[k];
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) perturb(l.weight.data()[i], g.layers[k].weight.data()[i]);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) perturb(l.bias.data()[i], g.layers[k].bias.data()[i]);
  }
  return g;
}

Vector finite_difference(const std::function<double(const Vector&)>& objective, const Vector& x, double h) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = objective(probe);
    probe(i) = x(i) - h;
    const double down = objective(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

double max_relative_error(const GradBundle& a, const GradBundle& b, double floor) {
  if (a.layers.size() != b.layers.size()) throw ShapeError("grad bundles differ in layer count");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    if (a.layers[k].weight.size() != b.layers[k].weight.size() || a.layers[k].bias.size() != b.layers[k].bias.size())
      throw ShapeError("grad bundles differ in shape");
    worst = std::max(worst, rel_err(a.layers[k].weight, b.layers[k].weight, floor));
    worst = std::max(worst, rel_err(a.layers[k].bias, b.layers[k].bias, floor));
  }
  return worst;
}

double max_relative_error(const Vector& a, const Vector& b, double floor) {
  if (a.size() != b.size()) throw ShapeError("vectors differ in length");
  return rel_err(a, b, floor);
}

}  // namespace agile::nn
