#pragma once

#include <string>
#include <vector>

#include "agile/envs/maze.hpp"

namespace agile::envs {

// Built-in point-mass tasks:
//   empty_room   24x24 open room, dense reward, sampled training targets
//   dense_maze   24x24 '⊃' maze, dense reward, evaluation target (0, 16)
//   sparse_maze  20x20 '⊃' maze, +1 only within radius 1 of (2, 9)
//   gated_maze   push-style maze: the direct route is closed by a gate that
//                opens only after the agent detours to the left chamber
MazeSpec make_maze(const std::string& name);
std::vector<std::string> maze_names();

// Turns a cell grid into wall rectangles. Rows are listed top (highest y)
// first; '#' is a wall cell, anything else is free. Cell (row, col) has its
// centre at origin + (col * cell, (rows - 1 - row) * cell).
std::vector<Rect> walls_from_grid(const std::vector<std::string>& rows, double cell, const Vec2& origin);

}  // namespace agile::envs
