#include "agile/harness/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "agile/errors.hpp"
#include "agile/harness/checkpoint.hpp"

namespace agile::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct RunningMean {
  double sum = 0.0;
  std::int64_t n = 0;

  void add(double v) {
    if (!std::isfinite(v)) throw NumericError("non-finite training loss");
    sum += v;
    ++n;
  }
  void add(const std::optional<double>& v) {
    if (v) add(*v);
  }
  double value() const { return n == 0 ? kNaN : sum / static_cast<double>(n); }
};

struct LossMeans {
  RunningMean actor_h, critic_h, actor_l, critic_l, disc, adv, disc_out;

  void add(const hrl::LossRecord& r) {
    if (r.skipped) return;
    critic_l.add(r.critic_low);
    actor_l.add(r.actor_low);
    if (r.high_updated) critic_h.add(r.critic_high);
    actor_h.add(r.actor_high);
    disc.add(r.disc_loss);
    adv.add(r.adv_term);
    disc_out.add(r.disc_out_generated);
  }
};

void write_trace(const std::filesystem::path& path, const std::vector<SubgoalTraceRow>& rows) {
  std::ofstream out(path);
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.episode << ',' << r.t << ',' << fmt_double(r.x) << ',' << fmt_double(r.y) << ','
        << fmt_double(r.goal_x_abs) << ',' << fmt_double(r.goal_y_abs) << '\n';
  }
}

double parse_field(const std::string& s) {
  if (s == "nan") return kNaN;
  return std::stod(s);
}

}  // namespace

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols{"env_step",     "episodes",      "success_rate", "mean_return",
                                             "mean_length",  "actor_loss_h",  "critic_loss_h", "actor_loss_l",
                                             "critic_loss_l", "disc_loss",    "adv_term",     "disc_out_generated",
                                             "wall_clock_s"};
  return cols;
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"episode", "t", "x", "y", "goal_x_abs", "goal_y_abs"};
  return cols;
}

void write_metrics_header(std::ostream& out) {
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_metrics_row(std::ostream& out, const MetricsRow& r) {
  out << r.env_step << ',' << r.episodes << ',' << fmt_double(r.success_rate) << ',' << fmt_double(r.mean_return)
      << ',' << fmt_double(r.mean_length) << ',' << fmt_double(r.actor_loss_h) << ',' << fmt_double(r.critic_loss_h)
      << ',' << fmt_double(r.actor_loss_l) << ',' << fmt_double(r.critic_loss_l) << ',' << fmt_double(r.disc_loss)
      << ',' << fmt_double(r.adv_term) << ',' << fmt_double(r.disc_out_generated) << ','
      << fmt_double(r.wall_clock_s) << '\n';
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != metrics_columns().size()) throw std::runtime_error("malformed metrics row in " + path.string());
    MetricsRow r;
    r.env_step = std::stoll(f[0]);
    r.episodes = std::stoll(f[1]);
    r.success_rate = parse_field(f[2]);
    r.mean_return = parse_field(f[3]);
    r.mean_length = parse_field(f[4]);
    r.actor_loss_h = parse_field(f[5]);
    r.critic_loss_h = parse_field(f[6]);
    r.actor_loss_l = parse_field(f[7]);
    r.critic_loss_l = parse_field(f[8]);
    r.disc_loss = parse_field(f[9]);
    r.adv_term = parse_field(f[10]);
    r.disc_out_generated = parse_field(f[11]);
    r.wall_clock_s = parse_field(f[12]);
    rows.push_back(r);
  }
  return rows;
}

hrl::Learner make_learner(const Config& cfg, const envs::MazeSpec& spec) {
  Rng init = substream(cfg.seed, "init");

  td3::Td3Config tc;
  tc.gamma = cfg.gamma;
  tc.tau = cfg.tau;
  tc.policy_delay = cfg.policy_delay;
  tc.smoothing_noise_std = cfg.smoothing_noise_std;
  tc.smoothing_clip = cfg.smoothing_clip;
  tc.exploration_noise_std = cfg.exploration_noise_std;
  tc.actor_lr = cfg.lr_actor;
  tc.critic_lr = cfg.lr_critic;
  tc.hidden = cfg.hidden;

  hrl::HrlConfig hc;
  hc.k = cfg.k;
  hc.goal_bound = envs::Vec2::Constant(cfg.goal_bound);
  hc.reward_scale_high = cfg.reward_scale_high;
  hc.reward_scale_low = cfg.reward_scale_low;
  hc.batch_high = cfg.batch_high;
  hc.batch_low = cfg.batch_low;
  hc.high_update_every = cfg.high_update_every;
  hc.relabel = {cfg.relabel_candidates, cfg.relabel_std_fraction};
  hc.validate();

  const int obs_dim = cfg.hierarchical() ? hrl::kLowObsDim : envs::kObservationDim;
  auto low = td3::make_agent(obs_dim, nn::Vector::Constant(2, spec.action_bound), tc, init);

  std::optional<td3::Td3Agent> high;
  std::optional<adversarial::AdversarialCtx> adv;
  if (cfg.hierarchical()) {
    td3::Td3Config htc = tc;
    htc.target_smoothing = cfg.high_target_smoothing;
    high = td3::make_agent(envs::kObservationDim, hc.goal_bound, htc, init);

    adversarial::AdversarialConfig ac;
    ac.alpha_adv = cfg.effective_alpha();
    ac.disc_lr = cfg.lr_disc;
    ac.hidden = cfg.disc_hidden;
    ac.leaky_slope = cfg.disc_leaky_slope;
    ac.non_saturating = cfg.non_saturating;
    ac.condition_on_state = cfg.disc_condition_on_state;
    adv = adversarial::make_context(ac, hc.goal_bound, envs::kObservationDim, init);
  }
  return hrl::Learner{hc,
                      std::move(high),
                      std::move(low),
                      std::move(adv),
                      hrl::Buffers(static_cast<std::size_t>(cfg.buffer_capacity)),
                      hrl::Streams::from_seed(cfg.seed)};
}

EvalResult evaluate(hrl::Learner& learner, const envs::MazeSpec& spec, int episodes, std::uint64_t seed,
                    std::vector<SubgoalTraceRow>* trace) {
  if (episodes < 1) throw ContractError("evaluate: episodes must be >= 1");
  EvalResult res;
  int successes = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    Rng seeds = substream(seed, "eval.episode." + std::to_string(ep));
    const auto start = envs::reset(spec, seeds(), envs::ResetMode::Eval);
    hrl::EpisodeOptions opts;
    opts.explore = false;
    opts.store = false;
    if (trace) {
      opts.on_step = [trace, ep](int t, const envs::Vec2& p, const envs::Vec2& goal) {
        trace->push_back({ep, t, p.x(), p.y(), goal.x(), goal.y()});
      };
    }
    const auto stats = hrl::collect_episode(learner, spec, start, opts);
    successes += stats.success ? 1 : 0;
    res.mean_return += stats.env_return;
    res.mean_length += stats.length;
  }
  res.success_rate = static_cast<double>(successes) / episodes;
  res.mean_return /= episodes;
  res.mean_length /= episodes;
  return res;
}

RunOutputs run_training(const Config& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const auto spec = make_env_spec(cfg);
  auto learner = make_learner(cfg, spec);

  RunOutputs out;
  out.metrics = out_dir / "metrics.csv";
  out.trace = out_dir / "trace.csv";
  out.checkpoint = out_dir / "checkpoint.json";

  std::ofstream metrics(out.metrics);
  if (!metrics) throw std::runtime_error("cannot write '" + out.metrics.string() + "'");
  write_metrics_header(metrics);

  Rng episode_seeds = substream(cfg.seed, "env.episodes");
  const std::uint64_t eval_seed = substream(cfg.seed, "eval")();
  const auto t0 = std::chrono::steady_clock::now();

  std::int64_t env_step = 0;
  std::int64_t episodes = 0;
  LossMeans losses;

  auto emit_row = [&]() {
    const auto ev = evaluate(learner, spec, cfg.eval_episodes, eval_seed);
    MetricsRow row;
    row.env_step = env_step;
    row.episodes = episodes;
    row.success_rate = ev.success_rate;
    row.mean_return = ev.mean_return;
    row.mean_length = ev.mean_length;
    row.actor_loss_h = losses.actor_h.value();
    row.critic_loss_h = losses.critic_h.value();
    row.actor_loss_l = losses.actor_l.value();
    row.critic_loss_l = losses.critic_l.value();
    row.disc_loss = losses.disc.value();
    row.adv_term = losses.adv.value();
    row.disc_out_generated = losses.disc_out.value();
    row.wall_clock_s =
        cfg.log_wall_clock ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() : 0.0;
    write_metrics_row(metrics, row);
    metrics.flush();
    out.rows.push_back(row);
    losses = LossMeans{};
    save_checkpoint(out.checkpoint, cfg, learner);
  };

  try {
    emit_row();
    std::int64_t next_eval = cfg.eval_every;
    while (env_step < cfg.total_steps) {
      const auto start = envs::reset(spec, episode_seeds(), envs::ResetMode::Train);
      hrl::EpisodeOptions opts;
      opts.explore = true;
      opts.random_actions = env_step < cfg.warmup_steps;
      const auto stats = hrl::collect_episode(learner, spec, start, opts);
      const std::int64_t begin = env_step;
      env_step += stats.length;
      episodes += 1;

      const std::int64_t updates = std::min(env_step, cfg.total_steps) - std::max(begin, cfg.warmup_steps);
      for (std::int64_t i = 0; i < updates; ++i) losses.add(hrl::hrl_update(learner));

      if (env_step >= next_eval) {
        emit_row();
        while (next_eval <= env_step) next_eval += cfg.eval_every;
      }
    }
    if (out.rows.back().env_step < env_step) emit_row();
  } catch (const NumericError& e) {
    out.diverged = true;
    out.error = e.what();
    MetricsRow err;
    err.env_step = env_step;
    err.episodes = episodes;
    err.success_rate = err.mean_return = err.mean_length = kNaN;
    err.actor_loss_h = err.critic_loss_h = err.actor_loss_l = err.critic_loss_l = kNaN;
    err.disc_loss = err.adv_term = err.disc_out_generated = kNaN;
    write_metrics_row(metrics, err);
    return out;
  }

  std::vector<SubgoalTraceRow> trace;
  evaluate(learner, spec, cfg.eval_episodes, eval_seed, &trace);
  write_trace(out.trace, trace);
  return out;
}

double learning_curve_auc(const std::vector<MetricsRow>& rows) {
  if (rows.size() < 2) return rows.empty() ? 0.0 : rows.front().success_rate;
  double area = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dx = static_cast<double>(rows[i].env_step - rows[i - 1].env_step);
    area += 0.5 * dx * (rows[i].success_rate + rows[i - 1].success_rate);
  }
  const double span = static_cast<double>(rows.back().env_step - rows.front().env_step);
  return span > 0.0 ? area / span : rows.back().success_rate;
}

}  // namespace agile::harness
