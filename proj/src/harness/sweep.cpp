#include "agile/harness/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "agile/errors.hpp"
#include "agile/harness/training.hpp"

namespace agile::harness {
namespace {

std::string alpha_tag(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ConfidenceInterval confidence_interval_95(const std::vector<double>& samples) {
  ConfidenceInterval ci;
  const auto n = samples.size();
  if (n == 0) {
    ci.mean = ci.half_width = std::numeric_limits<double>::quiet_NaN();
    return ci;
  }
  double sum = 0.0;
  for (double s : samples) sum += s;
  ci.mean = sum / static_cast<double>(n);
  if (n < 2) {
    ci.half_width = std::numeric_limits<double>::quiet_NaN();
    return ci;
  }
  double ss = 0.0;
  for (double s : samples) ss += (s - ci.mean) * (s - ci.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  ci.half_width = t * sd / std::sqrt(static_cast<double>(n));
  return ci;
}

std::vector<SweepSummaryRow> summarize(const std::vector<SweepRun>& runs) {
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_alpha;
  std::map<double, SweepSummaryRow> rows;
  for (const auto& r : runs) {
    auto& row = rows[r.alpha];
    row.alpha = r.alpha;
    row.runs += 1;
    if (r.failed) {
      row.failed += 1;
      continue;
    }
    by_alpha[r.alpha].first.push_back(r.final_success);
    by_alpha[r.alpha].second.push_back(r.auc);
  }
  std::vector<SweepSummaryRow> out;
  for (auto& [alpha, row] : rows) {
    row.final_success = confidence_interval_95(by_alpha[alpha].first);
    row.auc = confidence_interval_95(by_alpha[alpha].second);
    out.push_back(row);
  }
  return out;
}

void write_summary(const std::filesystem::path& path, const std::vector<SweepSummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "alpha,runs,failed,final_success_mean,final_success_ci95_low,final_success_ci95_high,"
         "auc_mean,auc_ci95_low,auc_ci95_high\n";
  for (const auto& r : rows) {
    out << fmt(r.alpha) << ',' << r.runs << ',' << r.failed << ',' << fmt(r.final_success.mean) << ','
        << fmt(r.final_success.low()) << ',' << fmt(r.final_success.high()) << ',' << fmt(r.auc.mean) << ','
        << fmt(r.auc.low()) << ',' << fmt(r.auc.high()) << '\n';
  }
}

SweepResult run_sweep(const Config& base, const std::vector<double>& alphas, const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir, unsigned jobs) {
  if (alphas.empty() || seeds.empty()) throw ContractError("sweep: alpha and seed lists must be non-empty");
  std::filesystem::create_directories(out_dir);

  SweepResult result;
  for (double a : alphas) {
    for (auto s : seeds) {
      SweepRun run;
      run.alpha = a;
      run.seed = s;
      run.metrics = out_dir / ("alpha_" + alpha_tag(a)) / ("seed_" + std::to_string(s)) / "metrics.csv";
      result.runs.push_back(run);
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < result.runs.size(); i = next++) {
      auto& run = result.runs[i];
      try {
        Config cfg = base;
        cfg.alpha_adv = run.alpha;
        cfg.seed = run.seed;
        const auto outputs = run_training(cfg, run.metrics.parent_path());
        if (outputs.diverged) {
          run.failed = true;
          run.error = outputs.error;
          continue;
        }
        run.final_success = outputs.rows.back().success_rate;
        run.auc = learning_curve_auc(outputs.rows);
      } catch (const std::exception& e) {
        run.failed = true;
        run.error = e.what();
      }
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(result.runs.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  result.summary = summarize(result.runs);
  result.summary_path = out_dir / "summary.csv";
  write_summary(result.summary_path, result.summary);
  return result;
}

}  // namespace agile::harness
