#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "agile/harness/config.hpp"

namespace agile::harness {

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;  // NaN with fewer than two samples
  double low() const { return mean - half_width; }
  double high() const { return mean + half_width; }
};

// Student-t 95% interval of the mean.
ConfidenceInterval confidence_interval_95(const std::vector<double>& samples);

struct SweepRun {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path metrics;
  bool failed = false;
  std::string error;
  double final_success = 0.0;
  double auc = 0.0;
};

struct SweepSummaryRow {
  double alpha = 0.0;
  int runs = 0;
  int failed = 0;
  ConfidenceInterval final_success;
  ConfidenceInterval auc;
};

// Aggregates finished runs per alpha, in ascending alpha order. Failed runs
// are counted but excluded from the statistics.
std::vector<SweepSummaryRow> summarize(const std::vector<SweepRun>& runs);

void write_summary(const std::filesystem::path& path, const std::vector<SweepSummaryRow>& rows);

struct SweepResult {
  std::vector<SweepRun> runs;
  std::vector<SweepSummaryRow> summary;
  std::filesystem::path summary_path;
};

// Runs the (alpha x seed) cross product, each into
// out_dir/alpha_<a>/seed_<s>/, on up to `jobs` threads. A failing run is
// recorded and the sweep continues.
SweepResult run_sweep(const Config& base, const std::vector<double>& alphas, const std::vector<std::uint64_t>& seeds,
                      const std::filesystem::path& out_dir, unsigned jobs = 0);

}  // namespace agile::harness
