#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace agile::envs {

using Vec2 = Eigen::Vector2d;

// Axis-aligned rectangle (x_min, y_min, x_max, y_max) in world units.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains_open(const Vec2& p) const;    // strictly inside
  bool contains_closed(const Vec2& p) const;  // inside or on the boundary
  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool degenerate() const { return area() <= 0.0; }
};

enum class RewardMode { Dense, Sparse };

// A wall segment that disappears once the agent enters `trigger`.
struct Gate {
  Rect wall;
  Rect trigger;
};

struct MazeSpec {
  std::string name;
  Rect extent;
  std::vector<Rect> walls;
  Rect start;                      // zero-area rectangle means a fixed start point
  std::optional<Rect> eval_start;  // defaults to `start`
  Vec2 target = Vec2::Zero();      // evaluation target
  bool sample_train_target = false;
  double success_radius = 1.0;
  int horizon = 500;
  RewardMode reward_mode = RewardMode::Dense;
  double action_bound = 1.0;
  double dense_reward_scale = 0.1;
  std::optional<Gate> gate;

  // Throws SpecError on an inconsistent layout.
  void validate() const;
};

struct EnvState {
  Vec2 position = Vec2::Zero();
  int t = 0;
  Vec2 target = Vec2::Zero();
  bool gate_open = false;
};

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  bool done = false;
  bool success = false;
};

enum class ResetMode { Train, Eval };

// True if `p` lies outside the extent or strictly inside a closed wall.
bool blocked(const MazeSpec& spec, const EnvState& state, const Vec2& p);

EnvState reset(const MazeSpec& spec, std::uint64_t seed, ResetMode mode = ResetMode::Eval);

StepResult step(const MazeSpec& spec, const EnvState& state, const Vec2& action);

double reward_at(const MazeSpec& spec, const Vec2& position, const Vec2& target);

// Policy-facing features: position and target normalised by the extent to
// roughly [-1, 1], and t / horizon.
Eigen::VectorXd observe(const MazeSpec& spec, const EnvState& state);
constexpr int kObservationDim = 5;

// g_t = s_{t-1} + g_{t-1} - s_t: keeps the absolute subgoal target fixed while the agent moves.
Vec2 goal_transition(const Vec2& g_prev, const Vec2& s_prev, const Vec2& s_cur);

}  // namespace agile::envs
