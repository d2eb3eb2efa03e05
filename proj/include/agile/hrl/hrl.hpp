#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "agile/adversarial/discriminator.hpp"
#include "agile/envs/maze.hpp"
#include "agile/hrl/replay_buffer.hpp"
#include "agile/td3/td3.hpp"

namespace agile::hrl {

using envs::Vec2;
using nn::Matrix;
using nn::Vector;

// Low-level observation: (position, t / horizon) features followed by g / goal_bound.
constexpr int kLowBaseDim = 3;
constexpr int kGoalDim = 2;
constexpr int kLowObsDim = kLowBaseDim + kGoalDim;

struct LowTransition {
  Vector obs;
  Vec2 action;
  double reward = 0.0;
  Vector next_obs;
  bool done = false;
};

struct SegmentStep {
  Vec2 position;
  Eigen::Vector3d low_base;  // position/time features without the goal
  Vec2 action;
};

struct HighTransition {
  Vector obs;           // high-level observation at segment start
  Vec2 subgoal;         // as emitted
  double reward = 0.0;  // scaled sum of environment rewards over the segment
  Vector next_obs;      // high-level observation at segment end
  bool done = false;
  Vec2 end_position;    // agent position after the last segment step
  std::vector<SegmentStep> segment;
};

struct RelabelConfig {
  int gaussian_candidates = 8;
  double std_fraction = 0.5;  // per-axis std as a fraction of the subgoal bound
};

struct HrlConfig {
  int k = 10;
  Vec2 goal_bound = Vec2(10.0, 10.0);
  double reward_scale_high = 0.1;
  double reward_scale_low = 1.0;
  int batch_high = 64;
  int batch_low = 128;
  // The high-level part of hrl_update runs on every n-th call.
  int high_update_every = 1;
  RelabelConfig relabel;

  void validate() const;
};

// r^l = -|| s + g - s' ||_2
double intrinsic_reward(const Vec2& s, const Vec2& g, const Vec2& s_next);

// scale * sum(rewards); throws ContractError on an empty list.
double accumulate_high_reward(std::span<const double> env_rewards, double scale);

Vector low_observation(const Eigen::Vector3d& low_base, const Vec2& g, const Vec2& goal_bound);
Eigen::Vector3d low_base_features(const envs::MazeSpec& spec, const envs::EnvState& state);

// Deterministic low-level policy over a batch of low observations (kLowObsDim x n).
using LowPolicy = std::function<Matrix(const Matrix&)>;
LowPolicy policy_of(const nn::MlpParams& low_actor);

// Candidates as columns: original subgoal, segment displacement, then the
// Gaussian samples around the displacement; all clipped to the subgoal box.
Matrix relabel_candidates(const HighTransition& tr, const Vec2& goal_bound, const RelabelConfig& cfg, Rng& rng);

// Score of each candidate: sum_i -1/2 || a_i - pi_l(s_i, g~_i) ||^2, where g~
// is rolled forward along the stored states with goal_transition.
Vector relabel_scores(const LowPolicy& policy, const HighTransition& tr, const Matrix& candidates,
                      const Vec2& goal_bound);

struct RelabelResult {
  Vec2 subgoal;
  Matrix candidates;
  Vector scores;
  int chosen = 0;
};

RelabelResult relabel_subgoal(const LowPolicy& policy, const HighTransition& tr, const Vec2& goal_bound,
                              const RelabelConfig& cfg, Rng& rng);

// Relabels a batch with one batched policy evaluation. Returns goal_dim x n.
Matrix relabel_batch(const LowPolicy& policy, std::span<const HighTransition* const> batch, const Vec2& goal_bound,
                     const RelabelConfig& cfg, Rng& rng);

struct Buffers {
  ReplayBuffer<LowTransition> low;
  ReplayBuffer<HighTransition> high;

  explicit Buffers(std::size_t capacity) : low(capacity), high(capacity) {}
};

// Named random streams owned by one run.
struct Streams {
  Rng low_noise;
  Rng high_noise;
  Rng warmup;
  Rng relabel;
  Rng replay;
  Rng smoothing_low;
  Rng smoothing_high;

  static Streams from_seed(std::uint64_t seed);
};

// Everything one training run owns. `high` and `adversarial` are empty for flat TD3.
struct Learner {
  HrlConfig cfg;
  std::optional<td3::Td3Agent> high;
  td3::Td3Agent low;
  std::optional<adversarial::AdversarialCtx> adversarial;
  Buffers buffers;
  Streams streams;
  std::int64_t update_calls = 0;

  bool hierarchical() const { return high.has_value(); }
};

struct EpisodeOptions {
  bool explore = true;
  bool random_actions = false;  // uniform actions and subgoals (warmup)
  bool store = true;            // push transitions into the buffers
  // Called after every env step with (t, position, absolute subgoal target).
  std::function<void(int, const Vec2&, const Vec2&)> on_step;
};

struct EpisodeStats {
  double env_return = 0.0;
  bool success = false;
  int length = 0;
  int low_transitions = 0;
  int high_transitions = 0;
  int subgoals_emitted = 0;
  int goal_transitions = 0;
};

// One episode of the two-level loop: a new subgoal whenever t = 0 (mod k),
// goal_transition otherwise, one low-level action per step.
EpisodeStats collect_episode(Learner& learner, const envs::MazeSpec& spec, const envs::EnvState& start,
                             const EpisodeOptions& opts);

struct LossRecord {
  bool skipped = false;
  double critic_low = 0.0;
  std::optional<double> actor_low;
  bool high_updated = false;
  double critic_high = 0.0;
  std::optional<double> actor_high;
  std::optional<double> disc_loss;
  std::optional<double> adv_term;
  std::optional<double> disc_out_generated;
  // Instrumentation for tests.
  Matrix relabeled;         // subgoals fed to the high critic and to D as positives
  Matrix critic_actions;    // actions actually used in the high critic batch
  Matrix generated;         // subgoals fed to D as negatives
  Matrix generated_states;  // high observations they were generated from
};

// One low-level TD3 update and, on every high_update_every-th call, one
// relabeled high-level update with the adversarial gradient folded in.
LossRecord hrl_update(Learner& learner);

}  // namespace agile::hrl
