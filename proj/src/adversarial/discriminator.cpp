#include "agile/adversarial/discriminator.hpp"

#include <algorithm>
#include <cmath>

#include "agile/errors.hpp"

namespace agile::adversarial {
namespace {

Matrix input_of(const AdversarialCtx& ctx, const Matrix& subgoals, const Matrix* obs) {
  if (subgoals.rows() != ctx.goal_bound.size()) throw ShapeError("discriminator: subgoal dimension mismatch");
  const Matrix g = ctx.goal_bound.cwiseInverse().asDiagonal() * subgoals;
  if (!ctx.condition_on_state) return g;
  if (!obs || obs->cols() != subgoals.cols()) throw ShapeError("discriminator: state-conditioned D needs obs");
  Matrix in(obs->rows() + g.rows(), g.cols());
  in.topRows(obs->rows()) = *obs;
  in.bottomRows(g.rows()) = g;
  return in;
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

void require_nonempty(const Matrix& m, const char* what) {
  if (m.cols() == 0) throw ContractError(std::string("discriminator: empty ") + what + " batch");
}

}  // namespace

void AdversarialCtx::validate() const {
  discriminator.validate();
  if (discriminator.output_dim() != 1) throw ShapeError("discriminator must have a single output");
  if (discriminator.output != nn::OutputActivation::Sigmoid) throw ShapeError("discriminator output must be Sigmoid");
  if (!std::isfinite(alpha_adv) || alpha_adv < 0.0) throw ContractError("alpha_adv must be finite and >= 0");
  if (!(disc_lr > 0.0)) throw ContractError("disc_lr must be positive");
}

AdversarialCtx make_context(const AdversarialConfig& cfg, const Vector& goal_bound, int obs_dim, Rng& rng) {
  nn::MlpShape s;
  s.input_dim = static_cast<int>(goal_bound.size()) + (cfg.condition_on_state ? obs_dim : 0);
  s.hidden = cfg.hidden;
  s.output_dim = 1;
  s.hidden_activation = nn::HiddenActivation::leaky_relu(cfg.leaky_slope);
  s.output = nn::OutputActivation::Sigmoid;
  s.final_layer_scale = cfg.final_layer_scale;

  AdversarialCtx ctx;
  ctx.discriminator = nn::make_mlp(s, rng);
  ctx.disc_opt = nn::AdamState::for_params(ctx.discriminator);
  ctx.alpha_adv = cfg.alpha_adv;
  ctx.disc_lr = cfg.disc_lr;
  ctx.non_saturating = cfg.non_saturating;
  ctx.condition_on_state = cfg.condition_on_state;
  ctx.goal_bound = goal_bound;
  ctx.validate();
  return ctx;
}

Vector discriminate(const AdversarialCtx& ctx, const Matrix& subgoals, const Matrix* obs) {
  Vector p = nn::predict(ctx.discriminator, input_of(ctx, subgoals, obs)).row(0).transpose();
  return p.unaryExpr([](double v) { return clamp_prob(v); });
}

double discriminate(const AdversarialCtx& ctx, const Vector& g, const Vector* obs) {
  const Matrix o = obs ? Matrix(*obs) : Matrix();
  return discriminate(ctx, Matrix(g), obs ? &o : nullptr)(0);
}

double discriminator_loss(const AdversarialCtx& ctx, const Matrix& relabeled, const Matrix& generated,
                          const Matrix* relabeled_obs, const Matrix* generated_obs) {
  require_nonempty(relabeled, "relabeled");
  require_nonempty(generated, "generated");
  const Vector pr = discriminate(ctx, relabeled, relabeled_obs);
  const Vector pf = discriminate(ctx, generated, generated_obs);
  return -pr.array().log().mean() - (1.0 - pf.array()).log().mean();
}

nn::GradBundle discriminator_grad(const AdversarialCtx& ctx, const Matrix& relabeled, const Matrix& generated,
                                  const Matrix* relabeled_obs, const Matrix* generated_obs) {
  require_nonempty(relabeled, "relabeled");
  require_nonempty(generated, "generated");
  // BCE through a sigmoid: dL/dlogit = (p - label) / n.
  const auto real = nn::forward(ctx.discriminator, input_of(ctx, relabeled, relabeled_obs));
  const auto fake = nn::forward(ctx.discriminator, input_of(ctx, generated, generated_obs));
  const Matrix real_grad = (real.output.array() - 1.0) / static_cast<double>(relabeled.cols());
  const Matrix fake_grad = fake.output.array() / static_cast<double>(generated.cols());
  auto g = nn::backward_from_logits(ctx.discriminator, real, real_grad).grads;
  g += nn::backward_from_logits(ctx.discriminator, fake, fake_grad).grads;
  return g;
}

DiscriminatorReport discriminator_update(AdversarialCtx& ctx, const Matrix& relabeled, const Matrix& generated,
                                         const Matrix* relabeled_obs, const Matrix* generated_obs) {
  require_nonempty(relabeled, "relabeled");
  require_nonempty(generated, "generated");
  DiscriminatorReport rep;
  const Vector pr = discriminate(ctx, relabeled, relabeled_obs);
  const Vector pf = discriminate(ctx, generated, generated_obs);
  rep.loss = -pr.array().log().mean() - (1.0 - pf.array()).log().mean();
  rep.mean_real = pr.mean();
  rep.mean_fake = pf.mean();
  const auto g = discriminator_grad(ctx, relabeled, generated, relabeled_obs, generated_obs);
  nn::adam_step(ctx.disc_opt, ctx.discriminator, g, ctx.disc_lr);
  return rep;
}

Matrix generator_action_grad(const AdversarialCtx& ctx, const Matrix& generated, const Matrix* obs) {
  require_nonempty(generated, "generated");
  const auto goal_dim = ctx.goal_bound.size();
  if (ctx.alpha_adv == 0.0) return Matrix::Zero(goal_dim, generated.cols());
  const auto cache = nn::forward(ctx.discriminator, input_of(ctx, generated, obs));
  // d/dz [-log(1 - sigmoid(z))] = sigmoid(z);  d/dz [log sigmoid(z)] = 1 - sigmoid(z)
  Matrix logit_grad = ctx.non_saturating ? Matrix(1.0 - cache.output.array()) : cache.output;
  const auto res = nn::backward_from_logits(ctx.discriminator, cache, logit_grad);
  const Matrix dg = res.input_grad.bottomRows(goal_dim);
  return ctx.alpha_adv * (ctx.goal_bound.cwiseInverse().asDiagonal() * dg);
}

double adversarial_term(const AdversarialCtx& ctx, const Matrix& generated, const Matrix* obs) {
  const Vector p = discriminate(ctx, generated, obs);
  return ctx.alpha_adv * (1.0 - p.array()).log().mean();
}

}  // namespace agile::adversarial
