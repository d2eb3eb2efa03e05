#include <cmath>
#include <random>

#include "agile/errors.hpp"
#include "agile/hrl/hrl.hpp"

namespace agile::hrl {
namespace {

Vec2 clip_box(const Vec2& g, const Vec2& bound) { return g.cwiseMax(-bound).cwiseMin(bound); }

// Appends the low observations for one transition and one candidate to `out`
// starting at column `col`.
void fill_rollout(const HighTransition& tr, const Vec2& candidate, const Vec2& goal_bound, Matrix& out, Eigen::Index col) {
  Vec2 g = candidate;
  const auto& seg = tr.segment;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    if (i > 0) g = envs::goal_transition(g, seg[i - 1].position, seg[i].position);
    out.col(col + static_cast<Eigen::Index>(i)) = low_observation(seg[i].low_base, g, goal_bound);
  }
}

double score_block(const HighTransition& tr, const Matrix& actions, Eigen::Index col) {
  double s = 0.0;
  for (std::size_t i = 0; i < tr.segment.size(); ++i) {
    s += -0.5 * (tr.segment[i].action - actions.col(col + static_cast<Eigen::Index>(i))).squaredNorm();
  }
  return s;
}

int argmax_first(const Vector& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace

double intrinsic_reward(const Vec2& s, const Vec2& g, const Vec2& s_next) { return -(s + g - s_next).norm(); }

double accumulate_high_reward(std::span<const double> env_rewards, double scale) {
  if (env_rewards.empty()) throw ContractError("accumulate_high_reward: empty reward list");
  double sum = 0.0;
  for (double r : env_rewards) sum += r;
  return scale * sum;
}

Vector low_observation(const Eigen::Vector3d& low_base, const Vec2& g, const Vec2& goal_bound) {
  Vector obs(kLowObsDim);
  obs.head<kLowBaseDim>() = low_base;
  obs.tail<kGoalDim>() = g.cwiseQuotient(goal_bound);
  return obs;
}

Eigen::Vector3d low_base_features(const envs::MazeSpec& spec, const envs::EnvState& state) {
  const Vector full = envs::observe(spec, state);
  return full.head<kLowBaseDim>();
}

LowPolicy policy_of(const nn::MlpParams& low_actor) {
  return [&low_actor](const Matrix& obs) { return nn::predict(low_actor, obs); };
}

Matrix relabel_candidates(const HighTransition& tr, const Vec2& goal_bound, const RelabelConfig& cfg, Rng& rng) {
  if (tr.segment.empty()) throw ContractError("relabel: empty segment");
  const int n = 2 + cfg.gaussian_candidates;
  Matrix c(kGoalDim, n);
  const Vec2 displacement = tr.end_position - tr.segment.front().position;
  c.col(0) = clip_box(tr.subgoal, goal_bound);
  c.col(1) = clip_box(displacement, goal_bound);
  for (int j = 0; j < cfg.gaussian_candidates; ++j) {
    Vec2 g;
    for (int d = 0; d < kGoalDim; ++d) {
      std::normal_distribution<double> noise(displacement(d), cfg.std_fraction * goal_bound(d));
      g(d) = noise(rng);
    }
    c.col(2 + j) = clip_box(g, goal_bound);
  }
  return c;
}

Vector relabel_scores(const LowPolicy& policy, const HighTransition& tr, const Matrix& candidates,
                      const Vec2& goal_bound) {
  if (tr.segment.empty()) throw ContractError("relabel: empty segment");
  const auto len = static_cast<Eigen::Index>(tr.segment.size());
  Matrix obs(kLowObsDim, len * candidates.cols());
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) fill_rollout(tr, candidates.col(j), goal_bound, obs, j * len);
  const Matrix actions = policy(obs);
  Vector scores(candidates.cols());
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) scores(j) = score_block(tr, actions, j * len);
  return scores;
}

RelabelResult relabel_subgoal(const LowPolicy& policy, const HighTransition& tr, const Vec2& goal_bound,
                              const RelabelConfig& cfg, Rng& rng) {
  RelabelResult r;
  r.candidates = relabel_candidates(tr, goal_bound, cfg, rng);
  r.scores = relabel_scores(policy, tr, r.candidates, goal_bound);
  r.chosen = argmax_first(r.scores);
  r.subgoal = r.candidates.col(r.chosen);
  return r;
}

Matrix relabel_batch(const LowPolicy& policy, std::span<const HighTransition* const> batch, const Vec2& goal_bound,
                     const RelabelConfig& cfg, Rng& rng) {
  std::vector<Matrix> cands;
  cands.reserve(batch.size());
  Eigen::Index total = 0;
  for (const HighTransition* tr : batch) {
    cands.push_back(relabel_candidates(*tr, goal_bound, cfg, rng));
    total += cands.back().cols() * static_cast<Eigen::Index>(tr->segment.size());
  }

  Matrix obs(kLowObsDim, total);
  Eigen::Index col = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto len = static_cast<Eigen::Index>(batch[b]->segment.size());
    for (Eigen::Index j = 0; j < cands[b].cols(); ++j, col += len) {
      fill_rollout(*batch[b], cands[b].col(j), goal_bound, obs, col);
    }
  }
  const Matrix actions = policy(obs);

  Matrix out(kGoalDim, static_cast<Eigen::Index>(batch.size()));
  col = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto len = static_cast<Eigen::Index>(batch[b]->segment.size());
    Vector scores(cands[b].cols());
    for (Eigen::Index j = 0; j < cands[b].cols(); ++j, col += len) scores(j) = score_block(*batch[b], actions, col);
    out.col(static_cast<Eigen::Index>(b)) = cands[b].col(argmax_first(scores));
  }
  return out;
}

}  // namespace agile::hrl
