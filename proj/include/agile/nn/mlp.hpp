#pragma once

#include <vector>

#include <Eigen/Dense>

#include "agile/rng.hpp"

namespace agile::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class HiddenKind { ReLU, LeakyReLU };

struct HiddenActivation {
  HiddenKind kind = HiddenKind::ReLU;
  double slope = 0.0;  // negative-side slope, LeakyReLU only

  static HiddenActivation relu() { return {HiddenKind::ReLU, 0.0}; }
  static HiddenActivation leaky_relu(double slope) { return {HiddenKind::LeakyReLU, slope}; }
};

enum class OutputActivation { Identity, Tanh, Sigmoid };

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// A fixed-architecture feed-forward network. Hidden layers share one
// activation; the last layer uses `output`. With Tanh output every dimension
// d is multiplied by output_scale[d], so outputs live in (-scale, +scale).
struct MlpParams {
  std::vector<Layer> layers;
  HiddenActivation hidden;
  OutputActivation output = OutputActivation::Identity;
  Vector output_scale;  // empty means all ones

  int input_dim() const;
  int output_dim() const;
  std::size_t parameter_count() const;

  // Throws ShapeError / NumericError when an invariant is broken.
  void validate() const;
};

// Per-layer parameter gradients, shape-congruent with an MlpParams.
struct GradBundle {
  std::vector<Layer> layers;

  static GradBundle zeros_like(const MlpParams& params);
  GradBundle& operator+=(const GradBundle& other);
  GradBundle& operator*=(double s);
};

// Everything backward needs. Columns are samples.
struct ForwardCache {
  std::vector<Matrix> inputs;  // input to each layer
  std::vector<Matrix> pre;     // pre-activation of each layer
  Matrix output;

  Vector output_column(int i = 0) const { return output.col(i); }
};

struct BackwardResult {
  GradBundle grads;
  Matrix input_grad;
};

struct MlpShape {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;
  HiddenActivation hidden_activation;
  OutputActivation output = OutputActivation::Identity;
  Vector output_scale;
  // Multiplies the initial weights and biases of the final layer.
  double final_layer_scale = 1.0;
};

// Uniform fan-in initialisation: every weight and bias ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
MlpParams make_mlp(const MlpShape& shape, Rng& rng);

// Batched forward pass; `input` is in_dim x batch.
ForwardCache forward(const MlpParams& params, const Matrix& input);
Vector forward(const MlpParams& params, const Vector& input);

// Forward without keeping intermediates.
Matrix predict(const MlpParams& params, const Matrix& input);

// Gradients of sum_b <output_grad[:, b], output[:, b]> with respect to every
// parameter and to the input.
BackwardResult backward(const MlpParams& params, const ForwardCache& cache, const Matrix& output_grad);

// Same, but `logit_grad` is taken with respect to the final pre-activation
// (before Tanh/Sigmoid/scaling). Used for numerically stable BCE gradients.
BackwardResult backward_from_logits(const MlpParams& params, const ForwardCache& cache, const Matrix& logit_grad);

bool same_shape(const MlpParams& a, const GradBundle& g);
bool same_shape(const MlpParams& a, const MlpParams& b);

// Bitwise equality of all parameters.
bool identical(const MlpParams& a, const MlpParams& b);

}  // namespace agile::nn
