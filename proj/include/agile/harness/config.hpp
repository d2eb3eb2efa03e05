#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "agile/envs/maze.hpp"

namespace agile::harness {

enum class Algorithm { AGILE, HIRO_LIKE, FLAT_TD3 };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// Experiment parameters. Fields missing from a config file keep these defaults.
struct Config {
  std::string env = "dense_maze";
  nlohmann::json env_overrides = nlohmann::json::object();
  Algorithm algorithm = Algorithm::AGILE;

  int k = 10;
  double alpha_adv = 1e-3;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  double lr_disc = 2e-4;
  int batch_high = 64;
  int batch_low = 128;
  std::int64_t buffer_capacity = 200000;
  double reward_scale_high = 0.1;
  double reward_scale_low = 1.0;
  std::int64_t warmup_steps = 2500;
  std::int64_t total_steps = 100000;
  std::int64_t eval_every = 5000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;

  std::vector<int> hidden{300, 300};
  std::vector<int> disc_hidden{64, 16};
  double disc_leaky_slope = 0.2;
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double smoothing_noise_std = 0.2;
  double smoothing_clip = 0.5;
  double exploration_noise_std = 0.1;
  bool high_target_smoothing = true;

  double goal_bound = 10.0;
  int relabel_candidates = 8;
  double relabel_std_fraction = 0.5;
  int high_update_every = 1;
  bool non_saturating = false;
  bool disc_condition_on_state = false;
  bool log_wall_clock = false;

  // alpha_adv actually used by the run (0 for the HIRO-like baseline).
  double effective_alpha() const { return algorithm == Algorithm::AGILE ? alpha_adv : 0.0; }
  bool hierarchical() const { return algorithm != Algorithm::FLAT_TD3; }

  // Throws ConfigError naming the offending key.
  void validate() const;
};

nlohmann::json to_json(const Config& cfg);

// Merges `patch` into the defaults. Unknown keys and type mismatches raise
// ConfigError with the key name.
Config config_from_json(const nlohmann::json& patch);

// Applies "key=value" overrides; values are read as JSON when possible and as
// bare strings otherwise. Dotted keys address env_overrides (env_overrides.horizon=100).
Config apply_overrides(const Config& base, const std::vector<std::string>& overrides);

// Loads a JSON config file and applies overrides last. Throws ConfigError;
// nothing is returned on failure.
Config parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

// The named maze with env_overrides applied.
envs::MazeSpec make_env_spec(const Config& cfg);

}  // namespace agile::harness
