#include "agile/hrl/hrl.hpp"

#include <random>

#include "agile/errors.hpp"

namespace agile::hrl {
namespace {

Vec2 uniform_in_box(const Vec2& bound, Rng& rng) {
  Vec2 v;
  for (int d = 0; d < 2; ++d) v(d) = std::uniform_real_distribution<double>(-bound(d), bound(d))(rng);
  return v;
}

td3::Batch low_batch(const ReplayBuffer<LowTransition>& buf, const std::vector<std::size_t>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  const auto obs_dim = buf.raw(idx.front()).obs.size();
  td3::Batch b{Matrix(obs_dim, n), Matrix(2, n), Vector(n), Matrix(obs_dim, n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& tr = buf.raw(idx[i]);
    b.obs.col(i) = tr.obs;
    b.action.col(i) = tr.action;
    b.reward(i) = tr.reward;
    b.next_obs.col(i) = tr.next_obs;
    b.done(i) = tr.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace

void HrlConfig::validate() const {
  if (k < 1) throw ContractError("hrl: k must be >= 1");
  if ((goal_bound.array() <= 0.0).any()) throw ContractError("hrl: goal_bound must be positive");
  if (batch_high < 1 || batch_low < 1) throw ContractError("hrl: batch sizes must be positive");
  if (high_update_every < 1) throw ContractError("hrl: high_update_every must be >= 1");
  if (relabel.gaussian_candidates < 0 || !(relabel.std_fraction > 0.0)) {
    throw ContractError("hrl: invalid relabel candidate settings");
  }
}

Streams Streams::from_seed(std::uint64_t seed) {
  return Streams{substream(seed, "low.noise"),     substream(seed, "high.noise"),
                 substream(seed, "warmup"),        substream(seed, "relabel"),
                 substream(seed, "replay"),        substream(seed, "smoothing.low"),
                 substream(seed, "smoothing.high")};
}

EpisodeStats collect_episode(Learner& learner, const envs::MazeSpec& spec, const envs::EnvState& start,
                             const EpisodeOptions& opts) {
  const auto& cfg = learner.cfg;
  const bool hier = learner.hierarchical();
  auto& streams = learner.streams;
  const Vec2 action_bound = Vec2::Constant(spec.action_bound);

  auto emit_subgoal = [&](const envs::EnvState& s) -> Vec2 {
    if (opts.random_actions) return uniform_in_box(cfg.goal_bound, streams.warmup);
    return td3::select_action(*learner.high, envs::observe(spec, s), opts.explore, streams.high_noise);
  };

  EpisodeStats stats;
  envs::EnvState s = start;
  Vec2 g = Vec2::Zero();
  HighTransition segment;
  std::vector<double> segment_rewards;
  auto open_segment = [&](const envs::EnvState& at, const Vec2& subgoal) {
    segment = HighTransition{};
    segment.obs = envs::observe(spec, at);
    segment.subgoal = subgoal;
    segment_rewards.clear();
  };

  if (hier) {
    g = emit_subgoal(s);
    ++stats.subgoals_emitted;
    open_segment(s, g);
  }

  for (;;) {
    const Eigen::Vector3d base = low_base_features(spec, s);
    const Vector low_obs = hier ? low_observation(base, g, cfg.goal_bound) : envs::observe(spec, s);
    Vec2 a = opts.random_actions ? uniform_in_box(action_bound, streams.warmup)
                                 : Vec2(td3::select_action(learner.low, low_obs, opts.explore, streams.low_noise));
    if (opts.on_step) opts.on_step(s.t, s.position, hier ? Vec2(s.position + g) : s.target);

    const envs::StepResult r = envs::step(spec, s, a);
    const envs::EnvState& next = r.next_state;
    stats.env_return += r.reward;
    stats.length += 1;
    stats.success = stats.success || r.success;

    if (hier) {
      segment.segment.push_back({s.position, base, a});
      segment_rewards.push_back(r.reward);

      const bool boundary = next.t % cfg.k == 0;
      Vec2 g_next;
      if (boundary && !r.done) {
        g_next = emit_subgoal(next);
        ++stats.subgoals_emitted;
      } else {
        // At episode end the next goal only fills the masked next observation.
        g_next = envs::goal_transition(g, s.position, next.position);
        if (!boundary) ++stats.goal_transitions;
      }

      if (opts.store) {
        learner.buffers.low.push({low_obs, a, cfg.reward_scale_low * intrinsic_reward(s.position, g, next.position),
                                  low_observation(low_base_features(spec, next), g_next, cfg.goal_bound), r.done});
        ++stats.low_transitions;
      }
      if (boundary || r.done) {
        segment.reward = accumulate_high_reward(segment_rewards, cfg.reward_scale_high);
        segment.next_obs = envs::observe(spec, next);
        segment.done = r.done;
        segment.end_position = next.position;
        if (opts.store) {
          learner.buffers.high.push(std::move(segment));
          ++stats.high_transitions;
        }
        if (!r.done) open_segment(next, g_next);
      }
      g = g_next;
    } else if (opts.store) {
      learner.buffers.low.push({low_obs, a, cfg.reward_scale_low * r.reward, envs::observe(spec, next), r.done});
      ++stats.low_transitions;
    }

    s = next;
    if (r.done) break;
  }
  return stats;
}

LossRecord hrl_update(Learner& learner) {
  LossRecord rec;
  const auto& cfg = learner.cfg;
  auto& streams = learner.streams;
  if (learner.buffers.low.size() < static_cast<std::size_t>(cfg.batch_low)) {
    rec.skipped = true;
    return rec;
  }

  auto& low = learner.low;
  const auto low_idx = learner.buffers.low.sample_indices(cfg.batch_low, streams.replay);
  const td3::Batch lb = low_batch(learner.buffers.low, low_idx);
  rec.critic_low = td3::critic_update(low, lb, streams.smoothing_low).loss;
  if (++low.update_counter % low.cfg.policy_delay == 0) rec.actor_low = td3::actor_update(low, lb.obs);

  learner.update_calls += 1;
  if (!learner.hierarchical() || learner.update_calls % cfg.high_update_every != 0) return rec;
  if (learner.buffers.high.size() < static_cast<std::size_t>(cfg.batch_high)) return rec;

  auto& high = *learner.high;
  const auto high_idx = learner.buffers.high.sample_indices(cfg.batch_high, streams.replay);
  std::vector<const HighTransition*> picked;
  picked.reserve(high_idx.size());
  for (auto i : high_idx) picked.push_back(&learner.buffers.high.raw(i));

  const auto n = static_cast<Eigen::Index>(picked.size());
  const auto obs_dim = picked.front()->obs.size();
  td3::Batch hb{Matrix(obs_dim, n), Matrix(), Vector(n), Matrix(obs_dim, n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    hb.obs.col(i) = picked[i]->obs;
    hb.reward(i) = picked[i]->reward;
    hb.next_obs.col(i) = picked[i]->next_obs;
    hb.done(i) = picked[i]->done ? 1.0 : 0.0;
  }
  // The critic is trained on relabeled subgoals only.
  hb.action = relabel_batch(policy_of(low.actor), picked, cfg.goal_bound, cfg.relabel, streams.relabel);
  rec.relabeled = hb.action;
  rec.critic_actions = hb.action;
  rec.critic_high = td3::critic_update(high, hb, streams.smoothing_high).loss;
  rec.high_updated = true;

  if (++high.update_counter % high.cfg.policy_delay != 0) return rec;

  // The generator is the high-level actor itself.
  const Matrix generated = td3::act(high, hb.obs);
  rec.generated = generated;
  rec.generated_states = hb.obs;
  if (learner.adversarial) {
    auto& ctx = *learner.adversarial;
    const Matrix* obs = ctx.condition_on_state ? &hb.obs : nullptr;
    const auto drep = adversarial::discriminator_update(ctx, rec.relabeled, generated, obs, obs);
    rec.disc_loss = drep.loss;
    const Matrix extra = adversarial::generator_action_grad(ctx, generated, obs);
    rec.adv_term = adversarial::adversarial_term(ctx, generated, obs);
    rec.disc_out_generated = adversarial::discriminate(ctx, generated, obs).mean();
    rec.actor_high = td3::actor_update(high, hb.obs, &extra);
  } else {
    rec.actor_high = td3::actor_update(high, hb.obs);
  }
  return rec;
}

}  // namespace agile::hrl
