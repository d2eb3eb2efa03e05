#pragma once

#include <vector>

#include "agile/nn/adam.hpp"
#include "agile/nn/mlp.hpp"
#include "agile/rng.hpp"

namespace agile::adversarial {

using nn::Matrix;
using nn::Vector;

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before any log.
inline constexpr double kProbClamp = 1e-6;

struct AdversarialConfig {
  double alpha_adv = 1e-3;
  double disc_lr = 2e-4;
  std::vector<int> hidden{64, 16};
  double leaky_slope = 0.2;
  // Generator ascends -log D(G(s)) instead of -log(1 - D(G(s))).
  bool non_saturating = false;
  // Feed the high-level observation to D alongside the subgoal.
  bool condition_on_state = false;
  double final_layer_scale = 1e-2;
};

// Subgoal discriminator D(g): probability that g came from relabeled
// experience rather than from the current high-level actor.
struct AdversarialCtx {
  nn::MlpParams discriminator;  // Sigmoid output, one unit
  nn::AdamState disc_opt;
  double alpha_adv = 1e-3;
  double disc_lr = 2e-4;
  bool non_saturating = false;
  bool condition_on_state = false;
  Vector goal_bound;  // D sees g / goal_bound

  void validate() const;
};

AdversarialCtx make_context(const AdversarialConfig& cfg, const Vector& goal_bound, int obs_dim, Rng& rng);

// `subgoals` is goal_dim x n. `obs` is required iff condition_on_state.
Vector discriminate(const AdversarialCtx& ctx, const Matrix& subgoals, const Matrix* obs = nullptr);
double discriminate(const AdversarialCtx& ctx, const Vector& g, const Vector* obs = nullptr);

// -mean log D(relabeled) - mean log(1 - D(generated)); the negated value
// of the minimax objective, clamped probabilities.
double discriminator_loss(const AdversarialCtx& ctx, const Matrix& relabeled, const Matrix& generated,
                          const Matrix* relabeled_obs = nullptr, const Matrix* generated_obs = nullptr);

// Gradient of discriminator_loss with respect to the discriminator parameters.
nn::GradBundle discriminator_grad(const AdversarialCtx& ctx, const Matrix& relabeled, const Matrix& generated,
                                  const Matrix* relabeled_obs = nullptr, const Matrix* generated_obs = nullptr);

struct DiscriminatorReport {
  double loss = 0.0;       // before the step
  double mean_real = 0.0;  // mean D on relabeled subgoals, before the step
  double mean_fake = 0.0;  // mean D on generated subgoals, before the step
};

// One Adam step: relabeled subgoals are labelled 1, generated ones 0.
DiscriminatorReport discriminator_update(AdversarialCtx& ctx, const Matrix& relabeled, const Matrix& generated,
                                         const Matrix* relabeled_obs = nullptr, const Matrix* generated_obs = nullptr);

// Per-sample ascent direction for the generator in subgoal space:
// alpha_adv * d/dg [-log(1 - D(g))] (or alpha_adv * d/dg [log D(g)] when
// non_saturating). Shape goal_dim x n. Does not modify the discriminator.
Matrix generator_action_grad(const AdversarialCtx& ctx, const Matrix& generated, const Matrix* obs = nullptr);

// alpha_adv * mean log(1 - D(generated)): the adversarial term the generator minimises.
double adversarial_term(const AdversarialCtx& ctx, const Matrix& generated, const Matrix* obs = nullptr);

}  // namespace agile::adversarial
