#include "agile/envs/catalog.hpp"

#include "agile/errors.hpp"

namespace agile::envs {

std::vector<Rect> walls_from_grid(const std::vector<std::string>& rows, double cell, const Vec2& origin) {
  std::vector<Rect> walls;
  const int n = static_cast<int>(rows.size());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < static_cast<int>(rows[r].size()); ++c) {
      if (rows[r][c] != '#') continue;
      const Vec2 center = origin + Vec2(c * cell, (n - 1 - r) * cell);
      walls.push_back({center.x() - cell / 2, center.y() - cell / 2, center.x() + cell / 2, center.y() + cell / 2});
    }
  }
  return walls;
}

MazeSpec make_maze(const std::string& name) {
  MazeSpec m;
  m.name = name;
  m.horizon = 500;
  m.action_bound = 1.0;
  if (name == "empty_room") {
    m.extent = {-4, -4, 20, 20};
    m.start = {0, 0, 0, 0};
    m.target = {0, 16};
    m.sample_train_target = true;
    m.success_radius = 5.0;
    m.reward_mode = RewardMode::Dense;
  } else if (name == "dense_maze") {
    // 3x3 cells of 8 units: corridor along the bottom, right and top.
    m.extent = {-4, -4, 20, 20};
    m.walls = walls_from_grid({"...", "##.", "..."}, 8.0, {0, 0});
    m.start = m.extent;
    m.eval_start = Rect{0, 0, 0, 0};
    m.target = {0, 16};
    m.sample_train_target = true;
    m.success_radius = 5.0;
    m.reward_mode = RewardMode::Dense;
  } else if (name == "sparse_maze") {
    m.extent = {-4, -4, 16, 16};
    m.walls = {{-4, 3, 10, 7}};
    m.start = m.extent;
    m.target = {2, 9};
    m.success_radius = 1.0;
    m.reward_mode = RewardMode::Sparse;
  } else if (name == "gated_maze") {
    // Free cells: start (0,0), left (-8,0), left-middle (-8,8), gate (0,8),
    // right-middle (8,8), goal chamber (0,16).
    m.extent = {-12, -4, 12, 20};
    m.walls = walls_from_grid({"#.#", "...", "..#"}, 8.0, {-8, 0});
    m.gate = Gate{{-4, 4, 4, 12}, {-12, 4, -8, 12}};
    m.start = {0, 0, 0, 0};
    m.target = {0, 19};
    m.success_radius = 5.0;
    m.reward_mode = RewardMode::Dense;
  } else {
    throw SpecError("unknown maze '" + name + "'");
  }
  m.validate();
  return m;
}

std::vector<std::string> maze_names() { return {"empty_room", "dense_maze", "sparse_maze", "gated_maze"}; }

}  // namespace agile::envs
