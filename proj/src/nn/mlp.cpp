#include "agile/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "agile/errors.hpp"

namespace agile::nn {
namespace {

void apply_hidden(const HiddenActivation& act, Matrix& z) {
  if (act.kind == HiddenKind::ReLU) {
    z = z.cwiseMax(0.0);
  } else {
    const double slope = act.slope;
    z = z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
  }
}

// Multiplies `grad` in place by the hidden activation derivative at `pre`.
void hidden_derivative(const HiddenActivation& act, const Matrix& pre, Matrix& grad) {
  const double neg = act.kind == HiddenKind::ReLU ? 0.0 : act.slope;
  grad = grad.binaryExpr(pre, [neg](double g, double z) { return z > 0.0 ? g : neg * g; });
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_input(const MlpParams& params, const Matrix& input) {
  if (params.layers.empty()) throw ShapeError("mlp has no layers");
  if (input.rows() != params.input_dim()) {
    throw ShapeError("mlp input has " + std::to_string(input.rows()) + " rows, expected " +
                     std::to_string(params.input_dim()));
  }
  if (!input.allFinite()) throw NumericError("mlp input contains a non-finite value");
}

Vector scale_of(const MlpParams& params) {
  if (params.output_scale.size() == 0) return Vector::Ones(params.output_dim());
  return params.output_scale;
}

}  // namespace

int MlpParams::input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }

int MlpParams::output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows()); }

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void MlpParams::validate() const {
  if (layers.empty()) throw ShapeError("mlp has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.bias.size() != l.weight.rows()) throw ShapeError("layer " + std::to_string(i) + ": bias/weight mismatch");
    if (i > 0 && layers[i - 1].weight.rows() != l.weight.cols()) {
      throw ShapeError("layer " + std::to_string(i) + ": input dim does not match previous output dim");
    }
    if (!l.weight.allFinite() || !l.bias.allFinite()) {
      throw NumericError("layer " + std::to_string(i) + ": non-finite parameter");
    }
  }
  if (output_scale.size() != 0) {
    if (output_scale.size() != output_dim()) throw ShapeError("output_scale length does not match output dim");
    if ((output_scale.array() <= 0.0).any() || !output_scale.allFinite()) {
      throw ShapeError("output_scale must be strictly positive");
    }
  }
}

GradBundle GradBundle::zeros_like(const MlpParams& params) {
  GradBundle g;
  g.layers.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return g;
}

GradBundle& GradBundle::operator+=(const GradBundle& other) {
  if (other.layers.size() != layers.size()) throw ShapeError("grad bundle layer count mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

GradBundle& GradBundle::operator*=(double s) {
  for (auto& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
  return *this;
}

MlpParams make_mlp(const MlpShape& shape, Rng& rng) {
  if (shape.input_dim <= 0 || shape.output_dim <= 0) throw ShapeError("mlp dims must be positive");
  MlpParams p;
  p.hidden = shape.hidden_activation;
  p.output = shape.output;
  p.output_scale = shape.output_scale;

  std::vector<int> dims{shape.input_dim};
  dims.insert(dims.end(), shape.hidden.begin(), shape.hidden.end());
  dims.push_back(shape.output_dim);

  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int in = dims[i];
    const int out = dims[i + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    Layer l{Matrix(out, in), Vector(out)};
    for (int c = 0; c < in; ++c)
      for (int r = 0; r < out; ++r) l.weight(r, c) = u(rng);
    for (int r = 0; r < out; ++r) l.bias(r) = u(rng);
    p.layers.push_back(std::move(l));
  }
  p.layers.back().weight *= shape.final_layer_scale;
  p.layers.back().bias *= shape.final_layer_scale;
  p.validate();
  return p;
}

ForwardCache forward(const MlpParams& params, const Matrix& input) {
  check_input(params, input);
  ForwardCache cache;
  const std::size_t n = params.layers.size();
  cache.inputs.reserve(n);
  cache.pre.reserve(n);

  Matrix x = input;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = params.layers[i];
    Matrix z = l.weight * x;
    z.colwise() += l.bias;
    cache.inputs.push_back(std::move(x));
    cache.pre.push_back(z);
    if (i + 1 < n) {
      apply_hidden(params.hidden, z);
      x = std::move(z);
    } else {
      switch (params.output) {
        case OutputActivation::Identity:
          break;
        case OutputActivation::Tanh: {
          const Vector s = scale_of(params);
          z = z.array().tanh();
          z = s.asDiagonal() * z;
          // tanh rounds to exactly +-1 for |z| > ~19; keep outputs strictly inside the box.
          for (Eigen::Index r = 0; r < z.rows(); ++r) {
            const double hi = std::nextafter(s(r), 0.0);
            z.row(r) = z.row(r).cwiseMin(hi).cwiseMax(-hi);
          }
          break;
        }
        case OutputActivation::Sigmoid:
          z = z.unaryExpr([](double v) {
            return std::clamp(sigmoid(v), std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
          });
          break;
      }
      cache.output = std::move(z);
    }
  }
  return cache;
}

Vector forward(const MlpParams& params, const Vector& input) {
  return forward(params, Matrix(input)).output.col(0);
}

Matrix predict(const MlpParams& params, const Matrix& input) { return forward(params, input).output; }

BackwardResult backward_from_logits(const MlpParams& params, const ForwardCache& cache, const Matrix& logit_grad) {
  const std::size_t n = params.layers.size();
  if (cache.pre.size() != n || cache.inputs.size() != n) throw ShapeError("cache does not match params");
  if (logit_grad.rows() != params.output_dim() || logit_grad.cols() != cache.output.cols()) {
    throw ShapeError("output gradient shape does not match network output");
  }

  BackwardResult res;
  res.grads.layers.resize(n);
  Matrix delta = logit_grad;
  for (std::size_t k = n; k-- > 0;) {
    const auto& l = params.layers[k];
    res.grads.layers[k].weight = delta * cache.inputs[k].transpose();
    res.grads.layers[k].bias = delta.rowwise().sum();
    Matrix down = l.weight.transpose() * delta;
    if (k > 0) {
      hidden_derivative(params.hidden, cache.pre[k - 1], down);
    }
    delta = std::move(down);
  }
  res.input_grad = std::move(delta);
  return res;
}

BackwardResult backward(const MlpParams& params, const ForwardCache& cache, const Matrix& output_grad) {
  if (output_grad.rows() != params.output_dim() || output_grad.cols() != cache.output.cols()) {
    throw ShapeError("output gradient shape does not match network output");
  }
  Matrix logit_grad = output_grad;
  switch (params.output) {
    case OutputActivation::Identity:
      break;
    case OutputActivation::Tanh: {
      // d/dz s*tanh(z) = s*(1 - tanh^2)
      const Vector s = scale_of(params);
      const Matrix t = cache.pre.back().array().tanh().matrix();
      logit_grad = (s.asDiagonal() * output_grad).cwiseProduct((1.0 - t.array().square()).matrix());
      break;
    }
    case OutputActivation::Sigmoid:
      const Matrix p = cache.pre.back().unaryExpr([](double v) { return sigmoid(v); });
      logit_grad = output_grad.cwiseProduct((p.array() * (1.0 - p.array())).matrix());
      break;
  }
  return backward_from_logits(params, cache, logit_grad);
}

bool same_shape(const MlpParams& a, const GradBundle& g) {
  if (a.layers.size() != g.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].weight.rows() != g.layers[i].weight.rows() ||
        a.layers[i].weight.cols() != g.layers[i].weight.cols() || a.layers[i].bias.size() != g.layers[i].bias.size())
      return false;
  }
  return true;
}

bool same_shape(const MlpParams& a, const MlpParams& b) {
  GradBundle view{b.layers};
  return same_shape(a, view);
}

bool identical(const MlpParams& a, const MlpParams& b) {
  if (!same_shape(a, b)) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].weight != b.layers[i].weight || a.layers[i].bias != b.layers[i].bias) return false;
  }
  return true;
}

}  // namespace agile::nn
