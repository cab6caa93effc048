#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idks/data.hpp"
#include "idks/stream.hpp"

namespace idks {

// Mann-Whitney rank statistic with midrank tie handling:
// P(score_pos > score_neg) + 0.5 * P(tie). Labels are {0,1} with 1 = anomaly
// and scores oriented so that higher = more anomalous. Throws MetricError
// unless both classes are present.
double roc_auc(std::span<const double> anomaly_scores, std::span<const std::int8_t> labels);

// AUC over a score-record stream, ranking by negated normal score.
double records_auc(std::span<const ScoreRecord> records);

struct AucPoint {
  std::uint64_t center = 0;  // stream index T
  double auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// Instantaneous accuracy: AUC over the closed evaluation interval
// [T - omega, T + omega] for centers advancing by stride. Intervals lacking
// either class emit no point. Records must be sorted by stream index.
std::vector<AucPoint> sliding_auc(std::span<const ScoreRecord> records, std::size_t omega,
                                  std::size_t stride);

// Survival function of the chi-square distribution (p-value of a
// goodness-of-fit statistic at the given degrees of freedom).
double chi_square_p_value(double chi_square, std::size_t dof);

struct UniformityResult {
  double chi_square = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
  bool pass = false;  // p_value > 0.001
  std::uint64_t n_subsets = 0;
  std::uint64_t trials = 0;
  std::size_t min_count = 0;
  std::size_t max_count = 0;
};

// Empirical check that after `slides` incremental updates a partitioning's
// sample set is uniform over all C(omega, psi) subsets of the live window:
// chi-square goodness of fit over `trials` independent single-partitioning
// runs. Requires C(omega, psi) <= 10^4 and trials >= 100 * C(omega, psi).
// With ReplacementPolicy::kNewestOnly this is the negative control and must
// fail decisively.
UniformityResult uniformity_test(std::size_t omega, std::uint32_t psi, std::size_t step,
                                 std::size_t slides, std::uint64_t trials, std::uint64_t seed,
                                 ReplacementPolicy policy = ReplacementPolicy::kUniform);

struct BenchRow {
  Mode mode = Mode::kIncremental;
  std::size_t omega = 0;
  std::size_t step = 0;
  std::uint32_t psi = 0;
  std::uint32_t t = 0;
  std::uint64_t seed = 0;
  bool is_median = false;  // per-config median over the repeats
  double mean_update_s = 0.0;
  double median_update_s = 0.0;
  double total_s = 0.0;
  double auc = 0.0;
};

// Runs every config `repeats` times with derived seeds (serially; this is the
// timing instrument) and appends one median row per config. Warm-up (initial
// window build) is excluded from per-update statistics.
std::vector<BenchRow> bench_runtime(const std::vector<StreamConfig>& grid,
                                    const LabeledDataset& source, std::size_t repeats,
                                    std::uint64_t base_seed);

struct SweepRow {
  std::uint32_t psi = 0;
  double auc = 0.0;
  double total_s = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::uint32_t argmax_psi = 0;  // highest AUC, ties to the smallest psi
};

// Full stream run per candidate psi; reports AUC and wall time per value.
SweepResult psi_sweep(const LabeledDataset& source, StreamConfig base,
                      std::span<const std::uint32_t> psis);

std::uint32_t sweep_argmax(std::span<const SweepRow> rows);

struct EquivalenceReport {
  bool pass = false;
  std::size_t updates_checked = 0;
  std::size_t assignment_mismatches = 0;
  std::size_t count_mismatches = 0;
  double max_score_rel_err = 0.0;
  std::string detail;  // first mismatch, when any
};

// Runs the incremental updater over the stream and, after every update,
// rebuilds a model from scratch on the same window with the sample sets
// pinned to the incremental model's current sets. Assignments and counts must
// match exactly and window-instance scores within score_rtol.
EquivalenceReport verify_incremental_equivalence(const LabeledDataset& source,
                                                 const StreamConfig& cfg,
                                                 double score_rtol = 1e-12);

}  // namespace idks
