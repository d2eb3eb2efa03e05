#pragma once

#include <cstdint>
#include <vector>

#include "agile/nn/adam.hpp"
#include "agile/nn/mlp.hpp"
#include "agile/rng.hpp"

namespace agile::td3 {

using nn::Matrix;
using nn::Vector;

struct Td3Config {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  // Noise magnitudes are fractions of the per-dimension action bound.
  double smoothing_noise_std = 0.2;
  double smoothing_clip = 0.5;
  double exploration_noise_std = 0.1;
  bool target_smoothing = true;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::vector<int> hidden{300, 300};
  // Scales the initial final-layer weights of the actor.
  double actor_final_layer_scale = 1e-2;

  void validate() const;
};

// Deterministic actor with twin critics and target copies of all three.
// The actor output is tanh-scaled to [-action_bound, action_bound].
// Critics see the action divided by action_bound.
struct Td3Agent {
  Td3Config cfg;
  Vector action_bound;
  nn::MlpParams actor, critic1, critic2;
  nn::MlpParams actor_target, critic1_target, critic2_target;
  nn::AdamState actor_opt, critic1_opt, critic2_opt;
  std::int64_t update_counter = 0;

  int obs_dim() const { return actor.input_dim(); }
  int action_dim() const { return actor.output_dim(); }
};

// Columns are transitions.
struct Batch {
  Matrix obs;
  Matrix action;
  Vector reward;
  Matrix next_obs;
  Vector done;  // 0 or 1

  int size() const { return static_cast<int>(reward.size()); }
  void validate(int obs_dim, int action_dim) const;
};

Td3Agent make_agent(int obs_dim, const Vector& action_bound, const Td3Config& cfg, Rng& rng);

Vector select_action(const Td3Agent& agent, const Vector& obs, bool explore, Rng& rng);
Matrix act(const Td3Agent& agent, const Matrix& obs);

// Q(s, a) of one critic for a batch; `action` in world units.
Vector q_value(const Td3Agent& agent, const nn::MlpParams& critic, const Matrix& obs, const Matrix& action);

struct CriticReport {
  double loss = 0.0;  // mse(Q1, y) + mse(Q2, y)
  Vector target;      // y
  Vector q1_target;   // Q1'(s', a~)
  Vector q2_target;   // Q2'(s', a~)
};

// y = r + gamma (1 - done) min(Q1'(s', a~), Q2'(s', a~)), a~ = clip(pi'(s') + clipped noise).
// Takes one Adam step on each critic. Targets are left untouched.
CriticReport critic_update(Td3Agent& agent, const Batch& batch, Rng& rng);

// Ascends mean Q1(s, pi(s)). `extra_grad` (action_dim x batch), when given,
// is an additional per-sample ascent direction in action space added to
// dQ1/da before backpropagating through the actor. Soft-updates every target
// afterwards. Returns -mean Q1(s, pi(s)) before the step.
double actor_update(Td3Agent& agent, const Matrix& obs, const Matrix* extra_grad = nullptr);

// Actor parameter gradient of -mean_b [Q1(s_b, pi(s_b)) + <extra_b, pi(s_b)>]
// without applying it. Exposed for gradient checks.
nn::GradBundle actor_loss_grad(const Td3Agent& agent, const Matrix& obs, const Matrix* extra_grad = nullptr);

// target <- (1 - tau) target + tau source
void soft_update(nn::MlpParams& target, const nn::MlpParams& source, double tau);

}  // namespace agile::td3
