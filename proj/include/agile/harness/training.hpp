#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "agile/harness/config.hpp"
#include "agile/hrl/hrl.hpp"

namespace agile::harness {

struct MetricsRow {
  std::int64_t env_step = 0;
  std::int64_t episodes = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double mean_length = 0.0;
  // Means over the updates since the previous row; NaN when none happened.
  double actor_loss_h = 0.0;
  double critic_loss_h = 0.0;
  double actor_loss_l = 0.0;
  double critic_loss_l = 0.0;
  double disc_loss = 0.0;
  double adv_term = 0.0;
  double disc_out_generated = 0.0;
  double wall_clock_s = 0.0;
};

struct SubgoalTraceRow {
  int episode = 0;
  int t = 0;
  double x = 0.0;
  double y = 0.0;
  double goal_x_abs = 0.0;
  double goal_y_abs = 0.0;
};

// Fixed metrics CSV header, in column order.
const std::vector<std::string>& metrics_columns();
const std::vector<std::string>& trace_columns();

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

// Builds agents, buffers and streams for `cfg`; deterministic in cfg.seed.
hrl::Learner make_learner(const Config& cfg, const envs::MazeSpec& spec);

struct EvalResult {
  double success_rate = 0.0;
  double mean_return = 0.0;
  double mean_length = 0.0;
};

// Noise-free rollouts from evaluation resets. Episode i resets with a seed
// derived from (seed, i), so every call with the same seed sees the same starts.
EvalResult evaluate(hrl::Learner& learner, const envs::MazeSpec& spec, int episodes, std::uint64_t seed,
                    std::vector<SubgoalTraceRow>* trace = nullptr);

struct RunOutputs {
  std::filesystem::path metrics;
  std::filesystem::path trace;
  std::filesystem::path checkpoint;
  bool diverged = false;
  std::string error;
  std::vector<MetricsRow> rows;
};

// Warmup with uniform random actions, then alternate episodes of collection
// with one hrl_update per collected step. Writes metrics.csv, trace.csv and
// checkpoint.json into `out_dir`.
RunOutputs run_training(const Config& cfg, const std::filesystem::path& out_dir);

// Area under the success-rate curve over env steps (trapezoid), normalised by
// the step span so the result lies in [0, 1].
double learning_curve_auc(const std::vector<MetricsRow>& rows);

}  // namespace agile::harness
