// Command-line front end: train, eval and sweep.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "agile/errors.hpp"
#include "agile/harness/checkpoint.hpp"
#include "agile/harness/sweep.hpp"
#include "agile/harness/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

template <typename T>
std::vector<T> split_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw agile::ConfigError(what, "cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw agile::ConfigError(what, "list is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace agile::harness;

  CLI::App app{"Adversarially guided subgoal generation for two-level goal-conditioned TD3"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "runs/train";
  auto* train = app.add_subcommand("train", "Train one agent and write metrics.csv, trace.csv, checkpoint.json");
  train->add_option("--config", config_path, "JSON config file")->required();
  train->add_option("--set", overrides, "key=value override (repeatable)");
  train->add_option("--out", out_dir, "Output directory");

  std::string checkpoint;
  int episodes = 10;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with noise-free policies");
  eval->add_option("--checkpoint", checkpoint, "checkpoint.json written by train")->required();
  eval->add_option("--episodes", episodes, "Evaluation episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "Seed for evaluation resets");

  std::string alphas_arg, seeds_arg;
  std::string sweep_dir = "runs/sweep";
  unsigned jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run an alpha_adv x seed grid and summarise final success rates");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--alphas", alphas_arg, "Comma-separated alpha_adv values")->required();
  sweep->add_option("--seeds", seeds_arg, "Comma-separated seeds")->required();
  sweep->add_option("--set", overrides, "key=value override (repeatable)");
  sweep->add_option("--out", sweep_dir, "Output directory");
  sweep->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const Config cfg = parse_config(config_path, overrides);
      const auto res = run_training(cfg, out_dir);
      std::cout << "metrics: " << res.metrics.string() << "\ntrace: " << res.trace.string()
                << "\ncheckpoint: " << res.checkpoint.string() << '\n';
      if (res.diverged) {
        std::cerr << "numeric divergence: " << res.error << '\n';
        return kExitDiverged;
      }
      const auto& last = res.rows.back();
      std::cout << "final success_rate " << last.success_rate << " after " << last.env_step << " steps\n";
      return kExitOk;
    }
    if (*eval) {
      auto ck = load_checkpoint(checkpoint);
      const auto spec = make_env_spec(ck.cfg);
      const auto r = evaluate(ck.learner, spec, episodes, eval_seed);
      std::cout << "success_rate,mean_return,mean_length\n"
                << r.success_rate << ',' << r.mean_return << ',' << r.mean_length << '\n';
      return kExitOk;
    }
    if (*sweep) {
      const Config cfg = parse_config(config_path, overrides);
      const auto alphas = split_list<double>(alphas_arg, "alphas");
      const auto seeds = split_list<std::uint64_t>(seeds_arg, "seeds");
      const auto res = run_sweep(cfg, alphas, seeds, sweep_dir, jobs);
      for (const auto& r : res.runs) {
        if (r.failed) std::cerr << "run alpha=" << r.alpha << " seed=" << r.seed << " failed: " << r.error << '\n';
      }
      std::cout << "summary: " << res.summary_path.string() << '\n';
      return kExitOk;
    }
  } catch (const agile::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const agile::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitDiverged;
  }
  return kExitOk;
}
