#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "agile/errors.hpp"
#include "agile/nn/adam.hpp"
#include "agile/nn/gradcheck.hpp"
#include "agile/nn/mlp.hpp"

using namespace agile;
using namespace agile::nn;

namespace {

MlpParams single_layer(const Matrix& w, const Vector& b, OutputActivation out = OutputActivation::Identity) {
  MlpParams p;
  p.layers.push_back({w, b});
  p.output = out;
  return p;
}

// <u, output> summed over a batch; the scalar whose gradient backward computes.
double weighted_output(const MlpParams& p, const Matrix& x, const Matrix& u) {
  return predict(p, x).cwiseProduct(u).sum();
}

MlpParams random_net(Rng& rng, int max_layers, int max_units) {
  std::uniform_int_distribution<int> layers(1, max_layers);
  std::uniform_int_distribution<int> units(1, max_units);
  std::uniform_int_distribution<int> pick(0, 2);
  MlpShape s;
  s.input_dim = units(rng);
  const int n_hidden = layers(rng) - 1;
  for (int i = 0; i < n_hidden; ++i) s.hidden.push_back(units(rng));
  s.output_dim = units(rng);
  s.hidden_activation = pick(rng) == 0 ? HiddenActivation::leaky_relu(0.2) : HiddenActivation::relu();
  s.output = static_cast<OutputActivation>(pick(rng));
  if (s.output == OutputActivation::Tanh) {
    s.output_scale = Vector::Constant(s.output_dim, 2.5);
  }
  return make_mlp(s, rng);
}

}  // namespace

TEST(MlpForward, IdentityLayerPassesInputThrough) {
  const auto p = single_layer(Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector y = forward(p, Vector{{1.0, 2.0}});
  EXPECT_EQ(y, (Vector{{1.0, 2.0}}));
}

TEST(MlpForward, ReluClampsNegativeHiddenUnits) {
  MlpParams p;
  p.layers.push_back({Matrix::Identity(2, 2), Vector{{-1.0, 0.0}}});
  p.layers.push_back({Matrix::Identity(2, 2), Vector::Zero(2)});
  const auto cache = forward(p, Matrix(Vector{{0.5, 0.5}}));
  EXPECT_EQ(Vector(cache.pre[0].col(0)), (Vector{{-0.5, 0.5}}));
  EXPECT_EQ(Vector(cache.inputs[1].col(0)), (Vector{{0.0, 0.5}}));
  EXPECT_EQ(cache.output_column(), (Vector{{0.0, 0.5}}));
}

TEST(MlpForward, TanhOfZeroIsZero) {
  Rng rng(3);
  MlpShape s{4, {8, 8}, 3, HiddenActivation::relu(), OutputActivation::Tanh, Vector::Constant(3, 7.0)};
  auto p = make_mlp(s, rng);
  for (auto& l : p.layers) l.bias.setZero();
  EXPECT_EQ(forward(p, Vector(Vector::Zero(4))), Vector::Zero(3));
}

TEST(MlpForward, RejectsBadInput) {
  const auto p = single_layer(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_THROW(forward(p, Vector(Vector::Zero(3))), ShapeError);
  EXPECT_THROW(forward(p, Vector{{1.0, std::numeric_limits<double>::quiet_NaN()}}), NumericError);
}

TEST(MlpForward, ValidateCatchesBrokenInvariants) {
  MlpParams p;
  p.layers.push_back({Matrix::Ones(3, 2), Vector::Zero(3)});
  p.layers.push_back({Matrix::Ones(1, 4), Vector::Zero(1)});
  EXPECT_THROW(p.validate(), ShapeError);
  p.layers[1].weight = Matrix::Ones(1, 3);
  p.layers[1].weight(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(p.validate(), NumericError);
  p.layers[1].weight(0, 0) = 1.0;
  p.output = OutputActivation::Tanh;
  p.output_scale = Vector::Constant(1, -1.0);
  EXPECT_THROW(p.validate(), ShapeError);
}

TEST(MlpForward, TanhOutputsStayStrictlyInsideTheBox) {
  Rng rng(11);
  MlpShape s{3, {8}, 2, HiddenActivation::relu(), OutputActivation::Tanh, Vector{{0.5, 10.0}}};
  auto p = make_mlp(s, rng);
  p.layers.back().weight *= 1e6;
  std::normal_distribution<double> big(0.0, 1e4);
  for (int i = 0; i < 2000; ++i) {
    const Vector x{{big(rng), big(rng), big(rng)}};
    const Vector y = forward(p, x);
    EXPECT_LT(std::abs(y(0)), 0.5);
    EXPECT_LT(std::abs(y(1)), 10.0);
  }
}

TEST(MlpForward, SigmoidOutputsStayInOpenUnitInterval) {
  auto p = single_layer(Matrix::Constant(1, 1, 1.0), Vector::Zero(1), OutputActivation::Sigmoid);
  for (double x : {-1e4, -40.0, 0.0, 40.0, 1e4}) {
    const double y = forward(p, Vector(Vector::Constant(1, x)))(0);
    EXPECT_GT(y, 0.0);
    EXPECT_LT(y, 1.0);
  }
}

TEST(MlpForward, IsBitwiseDeterministic) {
  Rng a(5), b(5);
  const auto p = make_mlp({6, {8, 8}, 2, HiddenActivation::relu(), OutputActivation::Identity, {}}, a);
  const auto q = make_mlp({6, {8, 8}, 2, HiddenActivation::relu(), OutputActivation::Identity, {}}, b);
  ASSERT_TRUE(identical(p, q));
  const Matrix x = Matrix::Random(6, 17);
  EXPECT_EQ(predict(p, x), predict(p, x));
  EXPECT_EQ(predict(p, x), predict(q, x));
}

TEST(MlpBackward, LinearLayerGradientIsOuterProduct) {
  const auto p = single_layer(Matrix{{1.0, 2.0, 0.0}, {-1.0, 0.5, 3.0}}, Vector{{0.1, -0.2}});
  const Vector x{{0.3, -1.2, 2.0}};
  const Vector u{{1.5, -0.5}};
  const auto cache = forward(p, Matrix(x));
  const auto res = backward(p, cache, Matrix(u));
  EXPECT_TRUE(res.grads.layers[0].weight.isApprox(u * x.transpose(), 1e-15));
  EXPECT_EQ(res.grads.layers[0].bias, u);
  EXPECT_TRUE(res.input_grad.col(0).isApprox(p.layers[0].weight.transpose() * u, 1e-15));
}

TEST(MlpBackward, DeadReluUnitHasZeroIncomingGradient) {
  MlpParams p;
  p.layers.push_back({Matrix{{1.0, 1.0}, {1.0, -1.0}}, Vector{{-10.0, 0.0}}});  // unit 0 is dead
  p.layers.push_back({Matrix{{2.0, 3.0}}, Vector::Zero(1)});
  const auto cache = forward(p, Matrix(Vector{{1.0, 0.5}}));
  const auto res = backward(p, cache, Matrix::Ones(1, 1));
  EXPECT_EQ(res.grads.layers[0].weight(0, 0), 0.0);
  EXPECT_EQ(res.grads.layers[0].weight(0, 1), 0.0);
  EXPECT_EQ(res.grads.layers[0].bias(0), 0.0);
  EXPECT_NE(res.grads.layers[0].weight(1, 0), 0.0);
}

TEST(MlpBackward, TwoHiddenLayerReluNetMatchesFiniteDifferences) {
  Rng rng(42);
  const auto p = make_mlp({4, {8, 8}, 3, HiddenActivation::relu(), OutputActivation::Identity, {}}, rng);
  const Matrix x = Matrix::Random(4, 5);
  const Matrix u = Matrix::Random(3, 5);
  const auto res = backward(p, forward(p, x), u);
  const auto fd = finite_difference([&](const MlpParams& q) { return weighted_output(q, x, u); }, p, 1e-5);
  EXPECT_LT(max_relative_error(res.grads, fd), 1e-4);

  const Vector x0 = x.col(0);
  const Vector u0 = u.col(0);
  const auto res0 = backward(p, forward(p, Matrix(x0)), Matrix(u0));
  const Vector fd_in =
      finite_difference([&](const Vector& v) { return weighted_output(p, Matrix(v), Matrix(u0)); }, x0, 1e-5);
  EXPECT_LT(max_relative_error(Vector(res0.input_grad.col(0)), fd_in), 1e-4);
}

TEST(MlpBackward, RandomSmallNetsMatchFiniteDifferences) {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_net(rng, 3, 8);
    const Matrix x = Matrix::NullaryExpr(p.input_dim(), 3, [&] { return std::normal_distribution<double>()(rng); });
    const Matrix u = Matrix::NullaryExpr(p.output_dim(), 3, [&] { return std::normal_distribution<double>()(rng); });
    const auto res = backward(p, forward(p, x), u);
    const auto fd = finite_difference([&](const MlpParams& q) { return weighted_output(q, x, u); }, p, 1e-5);
    worst = std::max(worst, max_relative_error(res.grads, fd));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(MlpBackward, RejectsMismatchedOutputGradient) {
  const auto p = single_layer(Matrix::Identity(2, 2), Vector::Zero(2));
  const auto cache = forward(p, Matrix(Matrix::Ones(2, 3)));
  EXPECT_THROW(backward(p, cache, Matrix::Ones(3, 3)), ShapeError);
  EXPECT_THROW(backward(p, cache, Matrix::Ones(2, 2)), ShapeError);
}

namespace {

// Textbook scalar Adam, written independently of the library.
struct ScalarAdam {
  double m = 0, v = 0;
  int t = 0;
  double step(double p, double g, double lr, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    return p - lr * mh / (std::sqrt(vh) + eps);
  }
};

}  // namespace

TEST(Adam, FirstStepMovesByLearningRate) {
  auto p = single_layer(Matrix::Constant(1, 1, 1.0), Vector::Zero(1));
  auto state = AdamState::for_params(p);
  GradBundle g = GradBundle::zeros_like(p);
  g.layers[0].weight(0, 0) = 1.0;
  adam_step(state, p, g, 0.1);
  EXPECT_NEAR(p.layers[0].weight(0, 0), 1.0 - 0.1 * (1.0 / (1.0 + 1e-8)), 1e-15);
  EXPECT_NEAR(p.layers[0].weight(0, 0), 0.9, 1e-8);
  EXPECT_EQ(state.step, 1);
}

TEST(Adam, ZeroGradientIsAFixedPoint) {
  Rng rng(1);
  auto p = make_mlp({3, {4}, 2, HiddenActivation::relu(), OutputActivation::Identity, {}}, rng);
  const auto before = p;
  auto state = AdamState::for_params(p);
  for (int i = 0; i < 5; ++i) {
    adam_step(state, p, GradBundle::zeros_like(p), 1e-3);
    EXPECT_EQ(state.step, i + 1);
  }
  EXPECT_TRUE(identical(p, before));
}

TEST(Adam, MatchesScalarReferenceTrace) {
  auto p = single_layer(Matrix::Constant(1, 1, 0.7), Vector::Constant(1, -0.3));
  auto state = AdamState::for_params(p);
  GradBundle g = GradBundle::zeros_like(p);
  g.layers[0].weight(0, 0) = 0.25;
  g.layers[0].bias(0) = -1.5;
  ScalarAdam rw, rb;
  double w = 0.7, b = -0.3;
  for (int i = 0; i < 2; ++i) {
    adam_step(state, p, g, 0.01);
    w = rw.step(w, 0.25, 0.01);
    b = rb.step(b, -1.5, 0.01);
    EXPECT_NEAR(p.layers[0].weight(0, 0), w, 1e-12);
    EXPECT_NEAR(p.layers[0].bias(0), b, 1e-12);
  }
}

TEST(Adam, NonFiniteGradientNamesLayerAndLeavesStateAlone) {
  Rng rng(2);
  auto p = make_mlp({2, {3}, 1, HiddenActivation::relu(), OutputActivation::Identity, {}}, rng);
  const auto before = p;
  auto state = AdamState::for_params(p);
  auto g = GradBundle::zeros_like(p);
  g.layers[1].bias(0) = std::numeric_limits<double>::infinity();
  try {
    adam_step(state, p, g, 1e-3);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("layer 1"), std::string::npos);
  }
  EXPECT_EQ(state.step, 0);
  EXPECT_TRUE(identical(p, before));
}

TEST(Adam, RejectsNonPositiveLearningRate) {
  auto p = single_layer(Matrix::Identity(1, 1), Vector::Zero(1));
  auto state = AdamState::for_params(p);
  EXPECT_THROW(adam_step(state, p, GradBundle::zeros_like(p), 0.0), ContractError);
}

TEST(Init, FinalLayerScaleShrinksLastLayer) {
  Rng a(9), b(9);
  MlpShape s{3, {5}, 2, HiddenActivation::relu(), OutputActivation::Identity, {}};
  const auto full = make_mlp(s, a);
  s.final_layer_scale = 1e-2;
  const auto small = make_mlp(s, b);
  EXPECT_EQ(full.layers[0].weight, small.layers[0].weight);
  EXPECT_TRUE(small.layers[1].weight.isApprox(full.layers[1].weight * 1e-2));
  for (const auto& l : full.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
    EXPECT_LE(l.weight.cwiseAbs().maxCoeff(), bound);
  }
}
