#include "agile/harness/config.hpp"

#include <cmath>
#include <fstream>

#include "agile/envs/catalog.hpp"
#include "agile/errors.hpp"

namespace agile::harness {

using nlohmann::json;

namespace {

bool type_compatible(const json& def, const json& val) {
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_number()) return val.is_number();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) {
    if (!val.is_array()) return false;
    for (const auto& e : val)
      if (!e.is_number_integer()) return false;
    return true;
  }
  if (def.is_object()) return val.is_object();
  return false;
}

envs::Rect rect_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(key, "expected [x_min, y_min, x_max, y_max]");
  for (const auto& v : j)
    if (!v.is_number()) throw ConfigError(key, "rectangle entries must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

envs::Vec2 point_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(key, "expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T number_field(const json& j, const std::string& key) {
  if constexpr (std::is_same_v<T, int>) {
    if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw ConfigError(key, "expected a boolean");
  } else {
    if (!j.is_number()) throw ConfigError(key, "expected a number");
  }
  return j.get<T>();
}

void apply_env_overrides(envs::MazeSpec& spec, const json& ov) {
  for (auto it = ov.begin(); it != ov.end(); ++it) {
    const std::string key = "env_overrides." + it.key();
    const json& v = it.value();
    const std::string& k = it.key();
    if (k == "horizon") {
      spec.horizon = number_field<int>(v, key);
    } else if (k == "success_radius") {
      spec.success_radius = number_field<double>(v, key);
    } else if (k == "action_bound") {
      spec.action_bound = number_field<double>(v, key);
    } else if (k == "dense_reward_scale") {
      spec.dense_reward_scale = number_field<double>(v, key);
    } else if (k == "sample_train_target") {
      spec.sample_train_target = number_field<bool>(v, key);
    } else if (k == "extent") {
      spec.extent = rect_from(v, key);
    } else if (k == "start") {
      spec.start = rect_from(v, key);
    } else if (k == "eval_start") {
      spec.eval_start = rect_from(v, key);
    } else if (k == "target") {
      spec.target = point_from(v, key);
    } else if (k == "walls") {
      if (!v.is_array()) throw ConfigError(key, "expected a list of rectangles");
      spec.walls.clear();
      for (const auto& w : v) spec.walls.push_back(rect_from(w, key));
    } else if (k == "reward_mode") {
      if (!v.is_string()) throw ConfigError(key, "expected \"dense\" or \"sparse\"");
      const auto s = v.get<std::string>();
      if (s == "dense") {
        spec.reward_mode = envs::RewardMode::Dense;
      } else if (s == "sparse") {
        spec.reward_mode = envs::RewardMode::Sparse;
      } else {
        throw ConfigError(key, "expected \"dense\" or \"sparse\"");
      }
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::AGILE:
      return "AGILE";
    case Algorithm::HIRO_LIKE:
      return "HIRO_LIKE";
    case Algorithm::FLAT_TD3:
      return "FLAT_TD3";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "AGILE") return Algorithm::AGILE;
  if (s == "HIRO_LIKE") return Algorithm::HIRO_LIKE;
  if (s == "FLAT_TD3") return Algorithm::FLAT_TD3;
  throw ConfigError("algorithm", "expected AGILE, HIRO_LIKE or FLAT_TD3, got '" + s + "'");
}

json to_json(const Config& c) {
  return json{{"env", c.env},
              {"env_overrides", c.env_overrides},
              {"algorithm", to_string(c.algorithm)},
              {"k", c.k},
              {"alpha_adv", c.alpha_adv},
              {"lr_actor", c.lr_actor},
              {"lr_critic", c.lr_critic},
              {"lr_disc", c.lr_disc},
              {"batch_high", c.batch_high},
              {"batch_low", c.batch_low},
              {"buffer_capacity", c.buffer_capacity},
              {"reward_scale_high", c.reward_scale_high},
              {"reward_scale_low", c.reward_scale_low},
              {"warmup_steps", c.warmup_steps},
              {"total_steps", c.total_steps},
              {"eval_every", c.eval_every},
              {"eval_episodes", c.eval_episodes},
              {"seed", c.seed},
              {"hidden", c.hidden},
              {"disc_hidden", c.disc_hidden},
              {"disc_leaky_slope", c.disc_leaky_slope},
              {"gamma", c.gamma},
              {"tau", c.tau},
              {"policy_delay", c.policy_delay},
              {"smoothing_noise_std", c.smoothing_noise_std},
              {"smoothing_clip", c.smoothing_clip},
              {"exploration_noise_std", c.exploration_noise_std},
              {"high_target_smoothing", c.high_target_smoothing},
              {"goal_bound", c.goal_bound},
              {"relabel_candidates", c.relabel_candidates},
              {"relabel_std_fraction", c.relabel_std_fraction},
              {"high_update_every", c.high_update_every},
              {"non_saturating", c.non_saturating},
              {"disc_condition_on_state", c.disc_condition_on_state},
              {"log_wall_clock", c.log_wall_clock}};
}

Config config_from_json(const json& patch) {
  if (!patch.is_object()) throw ConfigError("", "config must be a JSON object");
  json merged = to_json(Config{});
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (!merged.contains(it.key())) throw ConfigError(it.key(), "unknown key");
    if (!type_compatible(merged[it.key()], it.value())) {
      throw ConfigError(it.key(), "type mismatch (expected " + std::string(merged[it.key()].type_name()) + ", got " +
                                      it.value().type_name() + ")");
    }
    merged[it.key()] = it.value();
  }

  Config c;
  c.env = merged["env"].get<std::string>();
  c.env_overrides = merged["env_overrides"];
  c.algorithm = algorithm_from_string(merged["algorithm"].get<std::string>());
  c.k = merged["k"].get<int>();
  c.alpha_adv = merged["alpha_adv"].get<double>();
  c.lr_actor = merged["lr_actor"].get<double>();
  c.lr_critic = merged["lr_critic"].get<double>();
  c.lr_disc = merged["lr_disc"].get<double>();
  c.batch_high = merged["batch_high"].get<int>();
  c.batch_low = merged["batch_low"].get<int>();
  c.buffer_capacity = merged["buffer_capacity"].get<std::int64_t>();
  c.reward_scale_high = merged["reward_scale_high"].get<double>();
  c.reward_scale_low = merged["reward_scale_low"].get<double>();
  c.warmup_steps = merged["warmup_steps"].get<std::int64_t>();
  c.total_steps = merged["total_steps"].get<std::int64_t>();
  c.eval_every = merged["eval_every"].get<std::int64_t>();
  c.eval_episodes = merged["eval_episodes"].get<int>();
  if (merged["seed"].is_number_integer() && merged["seed"].get<std::int64_t>() < 0 && !merged["seed"].is_number_unsigned()) {
    throw ConfigError("seed", "must be non-negative");
  }
  c.seed = merged["seed"].get<std::uint64_t>();
  c.hidden = merged["hidden"].get<std::vector<int>>();
  c.disc_hidden = merged["disc_hidden"].get<std::vector<int>>();
  c.disc_leaky_slope = merged["disc_leaky_slope"].get<double>();
  c.gamma = merged["gamma"].get<double>();
  c.tau = merged["tau"].get<double>();
  c.policy_delay = merged["policy_delay"].get<int>();
  c.smoothing_noise_std = merged["smoothing_noise_std"].get<double>();
  c.smoothing_clip = merged["smoothing_clip"].get<double>();
  c.exploration_noise_std = merged["exploration_noise_std"].get<double>();
  c.high_target_smoothing = merged["high_target_smoothing"].get<bool>();
  c.goal_bound = merged["goal_bound"].get<double>();
  c.relabel_candidates = merged["relabel_candidates"].get<int>();
  c.relabel_std_fraction = merged["relabel_std_fraction"].get<double>();
  c.high_update_every = merged["high_update_every"].get<int>();
  c.non_saturating = merged["non_saturating"].get<bool>();
  c.disc_condition_on_state = merged["disc_condition_on_state"].get<bool>();
  c.log_wall_clock = merged["log_wall_clock"].get<bool>();
  c.validate();
  return c;
}

void Config::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  };
  positive(lr_actor, "lr_actor");
  positive(lr_critic, "lr_critic");
  positive(lr_disc, "lr_disc");
  positive(tau, "tau");
  positive(goal_bound, "goal_bound");
  positive(relabel_std_fraction, "relabel_std_fraction");
  positive(reward_scale_high, "reward_scale_high");
  positive(reward_scale_low, "reward_scale_low");
  if (tau > 1.0) throw ConfigError("tau", "must be <= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma", "must lie in [0, 1)");
  if (k < 1) throw ConfigError("k", "must be >= 1");
  if (!(alpha_adv >= 0.0) || !std::isfinite(alpha_adv)) throw ConfigError("alpha_adv", "must be finite and >= 0");
  if (batch_high < 1) throw ConfigError("batch_high", "must be >= 1");
  if (batch_low < 1) throw ConfigError("batch_low", "must be >= 1");
  if (buffer_capacity < 1) throw ConfigError("buffer_capacity", "must be >= 1");
  if (batch_high > buffer_capacity) throw ConfigError("batch_high", "exceeds buffer_capacity");
  if (batch_low > buffer_capacity) throw ConfigError("batch_low", "exceeds buffer_capacity");
  if (warmup_steps < 0) throw ConfigError("warmup_steps", "must be >= 0");
  if (total_steps < warmup_steps) throw ConfigError("total_steps", "must be >= warmup_steps");
  if (eval_every < 1) throw ConfigError("eval_every", "must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval_episodes", "must be >= 1");
  if (policy_delay < 1) throw ConfigError("policy_delay", "must be >= 1");
  if (high_update_every < 1) throw ConfigError("high_update_every", "must be >= 1");
  if (relabel_candidates < 0) throw ConfigError("relabel_candidates", "must be >= 0");
  if (smoothing_noise_std < 0.0) throw ConfigError("smoothing_noise_std", "must be >= 0");
  if (smoothing_clip < 0.0) throw ConfigError("smoothing_clip", "must be >= 0");
  if (exploration_noise_std < 0.0) throw ConfigError("exploration_noise_std", "must be >= 0");
  if (hidden.empty()) throw ConfigError("hidden", "needs at least one layer");
  if (disc_hidden.empty()) throw ConfigError("disc_hidden", "needs at least one layer");
  for (int w : hidden)
    if (w < 1) throw ConfigError("hidden", "widths must be >= 1");
  for (int w : disc_hidden)
    if (w < 1) throw ConfigError("disc_hidden", "widths must be >= 1");
  make_env_spec(*this);
}

Config apply_overrides(const Config& base, const std::vector<std::string>& overrides) {
  json j = to_json(base);
  json patch = json::object();
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(ov, "override must have the form key=value");
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      const std::string head = key.substr(0, dot);
      if (head != "env_overrides") throw ConfigError(key, "unknown key");
      if (!patch.contains("env_overrides")) patch["env_overrides"] = j["env_overrides"];
      patch["env_overrides"][key.substr(dot + 1)] = value;
    } else {
      patch[key] = value;
    }
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (!j.contains(it.key())) throw ConfigError(it.key(), "unknown key");
    j[it.key()] = it.value();
  }
  return config_from_json(j);
}

Config parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("", "config file '" + path + "' is not valid JSON");
  return apply_overrides(config_from_json(j), overrides);
}

envs::MazeSpec make_env_spec(const Config& cfg) {
  envs::MazeSpec spec;
  try {
    spec = envs::make_maze(cfg.env);
  } catch (const SpecError& e) {
    throw ConfigError("env", e.what());
  }
  apply_env_overrides(spec, cfg.env_overrides);
  try {
    spec.validate();
  } catch (const SpecError& e) {
    throw ConfigError("env_overrides", e.what());
  }
  return spec;
}

}  // namespace agile::harness
