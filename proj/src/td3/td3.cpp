#include "agile/td3/td3.hpp"

#include <algorithm>
#include <random>

#include "agile/errors.hpp"

namespace agile::td3 {
namespace {

Matrix critic_input(const Td3Agent& agent, const Matrix& obs, const Matrix& action) {
  Matrix in(obs.rows() + action.rows(), obs.cols());
  in.topRows(obs.rows()) = obs;
  in.bottomRows(action.rows()) = agent.action_bound.cwiseInverse().asDiagonal() * action;
  return in;
}

Matrix clip_to_box(const Matrix& a, const Vector& bound) {
  Matrix out = a;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    out.row(r) = out.row(r).cwiseMax(-bound(r)).cwiseMin(bound(r));
  }
  return out;
}

nn::MlpParams make_critic(int obs_dim, int action_dim, const Td3Config& cfg, Rng& rng) {
  nn::MlpShape s;
  s.input_dim = obs_dim + action_dim;
  s.hidden = cfg.hidden;
  s.output_dim = 1;
  s.hidden_activation = nn::HiddenActivation::relu();
  s.output = nn::OutputActivation::Identity;
  return nn::make_mlp(s, rng);
}

// Regresses one critic to `y` and returns its mean squared error.
double fit_critic(const Td3Agent& agent, nn::MlpParams& critic, nn::AdamState& opt, const Batch& batch,
                  const Vector& y) {
  const auto cache = nn::forward(critic, critic_input(agent, batch.obs, batch.action));
  const Vector err = cache.output.row(0).transpose() - y;
  const double n = static_cast<double>(batch.size());
  const Matrix grad = (2.0 / n) * err.transpose();
  auto res = nn::backward(critic, cache, grad);
  nn::adam_step(opt, critic, res.grads, agent.cfg.critic_lr);
  return err.squaredNorm() / n;
}

}  // namespace

void Td3Config::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractError("td3: gamma must lie in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ContractError("td3: tau must lie in (0, 1]");
  if (policy_delay < 1) throw ContractError("td3: policy_delay must be >= 1");
  if (smoothing_noise_std < 0.0 || smoothing_clip < 0.0 || exploration_noise_std < 0.0) {
    throw ContractError("td3: noise magnitudes must be non-negative");
  }
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ContractError("td3: learning rates must be positive");
  if (hidden.empty()) throw ContractError("td3: at least one hidden layer is required");
}

void Batch::validate(int obs_dim, int action_dim) const {
  const auto n = reward.size();
  if (n == 0) throw ContractError("td3: empty batch");
  if (obs.cols() != n || action.cols() != n || next_obs.cols() != n || done.size() != n) {
    throw ShapeError("td3: batch arrays differ in length");
  }
  if (obs.rows() != obs_dim || next_obs.rows() != obs_dim) throw ShapeError("td3: batch obs dimension mismatch");
  if (action.rows() != action_dim) throw ShapeError("td3: batch action dimension mismatch");
}

Td3Agent make_agent(int obs_dim, const Vector& action_bound, const Td3Config& cfg, Rng& rng) {
  cfg.validate();
  Td3Agent a;
  a.cfg = cfg;
  a.action_bound = action_bound;
  const int act_dim = static_cast<int>(action_bound.size());

  nn::MlpShape actor;
  actor.input_dim = obs_dim;
  actor.hidden = cfg.hidden;
  actor.output_dim = act_dim;
  actor.hidden_activation = nn::HiddenActivation::relu();
  actor.output = nn::OutputActivation::Tanh;
  actor.output_scale = action_bound;
  actor.final_layer_scale = cfg.actor_final_layer_scale;
  a.actor = nn::make_mlp(actor, rng);
  a.critic1 = make_critic(obs_dim, act_dim, cfg, rng);
  a.critic2 = make_critic(obs_dim, act_dim, cfg, rng);
  a.actor_target = a.actor;
  a.critic1_target = a.critic1;
  a.critic2_target = a.critic2;
  a.actor_opt = nn::AdamState::for_params(a.actor);
  a.critic1_opt = nn::AdamState::for_params(a.critic1);
  a.critic2_opt = nn::AdamState::for_params(a.critic2);
  return a;
}

Matrix act(const Td3Agent& agent, const Matrix& obs) { return nn::predict(agent.actor, obs); }

Vector select_action(const Td3Agent& agent, const Vector& obs, bool explore, Rng& rng) {
  if (obs.size() != agent.obs_dim()) throw ShapeError("td3: observation dimension mismatch");
  Vector a = nn::forward(agent.actor, obs);
  if (!explore || agent.cfg.exploration_noise_std == 0.0) return a;
  std::normal_distribution<double> noise(0.0, agent.cfg.exploration_noise_std);
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    a(d) = std::clamp(a(d) + noise(rng) * agent.action_bound(d), -agent.action_bound(d), agent.action_bound(d));
  }
  return a;
}

Vector q_value(const Td3Agent& agent, const nn::MlpParams& critic, const Matrix& obs, const Matrix& action) {
  return nn::predict(critic, critic_input(agent, obs, action)).row(0).transpose();
}

CriticReport critic_update(Td3Agent& agent, const Batch& batch, Rng& rng) {
  batch.validate(agent.obs_dim(), agent.action_dim());
  const auto& cfg = agent.cfg;

  Matrix next_action = nn::predict(agent.actor_target, batch.next_obs);
  if (cfg.target_smoothing && cfg.smoothing_noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.smoothing_noise_std);
    for (Eigen::Index c = 0; c < next_action.cols(); ++c) {
      for (Eigen::Index d = 0; d < next_action.rows(); ++d) {
        const double eps = std::clamp(noise(rng), -cfg.smoothing_clip, cfg.smoothing_clip);
        next_action(d, c) += eps * agent.action_bound(d);
      }
    }
    next_action = clip_to_box(next_action, agent.action_bound);
  }

  CriticReport rep;
  rep.q1_target = q_value(agent, agent.critic1_target, batch.next_obs, next_action);
  rep.q2_target = q_value(agent, agent.critic2_target, batch.next_obs, next_action);
  const Vector not_done = Vector::Ones(batch.size()) - batch.done;
  rep.target = batch.reward + cfg.gamma * not_done.cwiseProduct(rep.q1_target.cwiseMin(rep.q2_target));
  if (!rep.target.allFinite()) throw NumericError("td3: non-finite critic target");

  rep.loss = fit_critic(agent, agent.critic1, agent.critic1_opt, batch, rep.target);
  rep.loss += fit_critic(agent, agent.critic2, agent.critic2_opt, batch, rep.target);
  return rep;
}

namespace {

struct ActorPass {
  nn::GradBundle grads;
  double loss = 0.0;
};

ActorPass actor_pass(const Td3Agent& agent, const Matrix& obs, const Matrix* extra_grad) {
  if (obs.rows() != agent.obs_dim() || obs.cols() == 0) throw ShapeError("td3: actor batch shape mismatch");
  if (extra_grad && (extra_grad->rows() != agent.action_dim() || extra_grad->cols() != obs.cols())) {
    throw ShapeError("td3: extra_grad must be action_dim x batch");
  }
  const double n = static_cast<double>(obs.cols());
  const auto actor_cache = nn::forward(agent.actor, obs);
  const auto critic_cache = nn::forward(agent.critic1, critic_input(agent, obs, actor_cache.output));

  // d(-mean Q)/d(critic input), then keep the action rows and undo the input scaling.
  const Matrix q_grad = Matrix::Constant(1, obs.cols(), -1.0 / n);
  const auto through_critic = nn::backward(agent.critic1, critic_cache, q_grad);
  Matrix action_grad = agent.action_bound.cwiseInverse().asDiagonal() *
                       through_critic.input_grad.bottomRows(agent.action_dim());
  if (extra_grad) action_grad -= (*extra_grad) / n;

  ActorPass out;
  out.grads = nn::backward(agent.actor, actor_cache, action_grad).grads;
  out.loss = -critic_cache.output.mean();
  return out;
}

}  // namespace

nn::GradBundle actor_loss_grad(const Td3Agent& agent, const Matrix& obs, const Matrix* extra_grad) {
  return actor_pass(agent, obs, extra_grad).grads;
}

double actor_update(Td3Agent& agent, const Matrix& obs, const Matrix* extra_grad) {
  auto pass = actor_pass(agent, obs, extra_grad);
  nn::adam_step(agent.actor_opt, agent.actor, pass.grads, agent.cfg.actor_lr);
  soft_update(agent.actor_target, agent.actor, agent.cfg.tau);
  soft_update(agent.critic1_target, agent.critic1, agent.cfg.tau);
  soft_update(agent.critic2_target, agent.critic2, agent.cfg.tau);
  return pass.loss;
}

void soft_update(nn::MlpParams& target, const nn::MlpParams& source, double tau) {
  if (!nn::same_shape(target, source)) throw ShapeError("soft_update: shape mismatch");
  for (std::size_t i = 0; i < target.layers.size(); ++i) {
    target.layers[i].weight = (1.0 - tau) * target.layers[i].weight + tau * source.layers[i].weight;
    target.layers[i].bias = (1.0 - tau) * target.layers[i].bias + tau * source.layers[i].bias;
  }
}

}  // namespace agile::td3
