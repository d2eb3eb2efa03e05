#include "agile/envs/maze.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "agile/errors.hpp"
#include "agile/rng.hpp"

namespace agile::envs {
namespace {

constexpr int kMaxSampleTries = 100000;

bool inside_extent(const Rect& extent, const Vec2& p) { return extent.contains_closed(p); }

template <typename F>
void for_each_active_wall(const MazeSpec& spec, const EnvState& state, F&& f) {
  for (const auto& w : spec.walls) f(w);
  if (spec.gate && !state.gate_open) f(spec.gate->wall);
}

// A point is free if it is inside the extent and not inside any closed wall.
// Used for sampling, where touching a wall face is avoided.
bool free_for_sampling(const MazeSpec& spec, const EnvState& state, const Vec2& p) {
  if (!spec.extent.contains_open(p)) return false;
  bool ok = true;
  for_each_active_wall(spec, state, [&](const Rect& w) { ok = ok && !w.contains_closed(p); });
  return ok;
}

Vec2 sample_free(const MazeSpec& spec, const Rect& region, Rng& rng, const std::optional<Vec2>& avoid,
                 double avoid_radius) {
  EnvState closed;
  if (region.degenerate()) {
    Vec2 p(region.x_min, region.y_min);
    if (blocked(spec, closed, p)) throw SpecError(spec.name + ": fixed start point lies inside a wall");
    return p;
  }
  std::uniform_real_distribution<double> ux(region.x_min, region.x_max);
  std::uniform_real_distribution<double> uy(region.y_min, region.y_max);
  for (int i = 0; i < kMaxSampleTries; ++i) {
    Vec2 p(ux(rng), uy(rng));
    if (!free_for_sampling(spec, closed, p)) continue;
    if (avoid && (p - *avoid).norm() < avoid_radius) continue;
    return p;
  }
  throw SpecError(spec.name + ": could not sample a free point from region");
}

// Moves along one axis, stopping at the first wall face or extent edge crossed.
double slide(const MazeSpec& spec, const EnvState& state, const Vec2& from, int axis, double delta) {
  const int other = 1 - axis;
  double to = from(axis) + delta;
  const double lo = axis == 0 ? spec.extent.x_min : spec.extent.y_min;
  const double hi = axis == 0 ? spec.extent.x_max : spec.extent.y_max;
  to = std::clamp(to, lo, hi);
  for_each_active_wall(spec, state, [&](const Rect& w) {
    const double a_min = axis == 0 ? w.x_min : w.y_min;
    const double a_max = axis == 0 ? w.x_max : w.y_max;
    const double o_min = other == 0 ? w.x_min : w.y_min;
    const double o_max = other == 0 ? w.x_max : w.y_max;
    if (!(from(other) > o_min && from(other) < o_max)) return;
    if (delta > 0.0 && from(axis) <= a_min && to > a_min) to = a_min;
    if (delta < 0.0 && from(axis) >= a_max && to < a_max) to = a_max;
  });
  return to;
}

}  // namespace

bool Rect::contains_open(const Vec2& p) const {
  return p.x() > x_min && p.x() < x_max && p.y() > y_min && p.y() < y_max;
}

bool Rect::contains_closed(const Vec2& p) const {
  return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
}

void MazeSpec::validate() const {
  auto fail = [&](const std::string& what) { throw SpecError(name + ": " + what); };
  if (extent.degenerate()) fail("extent has zero area");
  if (!(success_radius > 0.0)) fail("success_radius must be positive");
  if (horizon <= 0) fail("horizon must be positive");
  if (!(action_bound > 0.0)) fail("action_bound must be positive");
  if (!target.allFinite() || !inside_extent(extent, target)) fail("target lies outside the extent");
  EnvState closed;
  if (blocked(*this, closed, target) && !(gate && gate->wall.contains_open(target))) fail("target lies inside a wall");
  for (const Rect* r : {&start, eval_start ? &*eval_start : &start}) {
    if (r->x_max < r->x_min || r->y_max < r->y_min) fail("start region is inverted");
    if (!extent.contains_closed({r->x_min, r->y_min}) || !extent.contains_closed({r->x_max, r->y_max})) {
      fail("start region lies outside the extent");
    }
    if (r->degenerate() && blocked(*this, closed, {r->x_min, r->y_min})) fail("fixed start lies inside a wall");
  }
}

bool blocked(const MazeSpec& spec, const EnvState& state, const Vec2& p) {
  if (!inside_extent(spec.extent, p)) return true;
  bool hit = false;
  for_each_active_wall(spec, state, [&](const Rect& w) { hit = hit || w.contains_open(p); });
  return hit;
}

EnvState reset(const MazeSpec& spec, std::uint64_t seed, ResetMode mode) {
  spec.validate();
  Rng rng = substream(seed, "env.reset");
  EnvState s;
  if (mode == ResetMode::Train && spec.sample_train_target) {
    s.target = sample_free(spec, spec.extent, rng, std::nullopt, 0.0);
  } else {
    s.target = spec.target;
  }
  const Rect& region = (mode == ResetMode::Eval && spec.eval_start) ? *spec.eval_start : spec.start;
  // Random starts never begin inside the success region.
  s.position = sample_free(spec, region, rng, s.target, spec.success_radius);
  s.t = 0;
  s.gate_open = false;
  return s;
}

double reward_at(const MazeSpec& spec, const Vec2& position, const Vec2& target) {
  const double d = (position - target).norm();
  if (spec.reward_mode == RewardMode::Dense) return -spec.dense_reward_scale * d;
  return d < spec.success_radius ? 1.0 : 0.0;
}

StepResult step(const MazeSpec& spec, const EnvState& state, const Vec2& action) {
  if (!action.allFinite()) throw NumericError(spec.name + ": non-finite action");
  const Vec2 a = action.cwiseMax(-spec.action_bound).cwiseMin(spec.action_bound);

  StepResult r;
  r.next_state = state;
  Vec2 p = state.position;
  p.x() = slide(spec, state, p, 0, a.x());
  p.y() = slide(spec, state, p, 1, a.y());
  r.next_state.position = p;
  r.next_state.t = state.t + 1;
  if (spec.gate && !state.gate_open && spec.gate->trigger.contains_closed(p)) r.next_state.gate_open = true;

  r.reward = reward_at(spec, p, state.target);
  r.success = (p - state.target).norm() < spec.success_radius;
  r.done = r.success || r.next_state.t >= spec.horizon;
  return r;
}

Eigen::VectorXd observe(const MazeSpec& spec, const EnvState& state) {
  const Vec2 center((spec.extent.x_min + spec.extent.x_max) / 2.0, (spec.extent.y_min + spec.extent.y_max) / 2.0);
  const Vec2 half((spec.extent.x_max - spec.extent.x_min) / 2.0, (spec.extent.y_max - spec.extent.y_min) / 2.0);
  Eigen::VectorXd obs(kObservationDim);
  obs.head<2>() = (state.position - center).cwiseQuotient(half);
  obs(2) = static_cast<double>(state.t) / spec.horizon;
  obs.tail<2>() = (state.target - center).cwiseQuotient(half);
  return obs;
}

Vec2 goal_transition(const Vec2& g_prev, const Vec2& s_prev, const Vec2& s_cur) {
  if (!g_prev.allFinite() || !s_prev.allFinite() || !s_cur.allFinite()) {
    throw NumericError("goal_transition: non-finite input");
  }
  return s_prev + g_prev - s_cur;
}

}  // namespace agile::envs
