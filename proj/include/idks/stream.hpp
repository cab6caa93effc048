#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idks/data.hpp"
#include "idks/model.hpp"

namespace idks {

enum class Mode { kIncremental, kRetrain, kOffline };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& name);  // "idks" | "retrain" | "offline"

struct StreamConfig {
  std::size_t omega = 2048;
  std::size_t step = 100;
  std::uint32_t psi = 4;
  std::uint32_t t = 100;
  std::uint64_t seed = 0;
  Mode mode = Mode::kIncremental;
  std::size_t retrain_every = 1;  // retrain cadence in slides (retrain mode)
  ReplacementPolicy policy = ReplacementPolicy::kUniform;

  void validate() const;  // throws ParameterError naming the violated constraint
};

struct ScoreRecord {
  std::uint64_t stream_index = 0;
  double normal_score = 0.0;
  std::int8_t label = -1;  // -1 = unlabeled
  std::uint32_t scored_at_step = 0;
};

struct RunMetrics {
  std::size_t n_instances = 0;
  std::size_t n_updates = 0;
  double init_seconds = 0.0;
  double total_seconds = 0.0;
  double update_mean_s = 0.0;
  double update_p50_s = 0.0;
  double update_p90_s = 0.0;
  double update_max_s = 0.0;
  double replaced_mean = 0.0;
  std::uint64_t replaced_total = 0;
  double affected_mean = 0.0;
  std::string warning;  // empty when none
};

struct RunResult {
  std::vector<ScoreRecord> records;
  RunMetrics metrics;
};

// One window slide: replaces expired samples with uniform draws from the
// arrived batch (full radius refresh), recomputes the assignment column of
// every partitioning whose sample set changed, computes arrived-row
// assignments for the rest, and settles the count ledger. The arrived view's
// start index must equal window_start + window size. Identical, given the
// same final sample sets, to a from-scratch rebuild on the new window.
UpdateStats update_incremental(Model& m, const PointsView& arrived, Rng& rng,
                               ReplacementPolicy policy = ReplacementPolicy::kUniform);

// Baseline: discards the model and rebuilds it from scratch on the slid window.
void update_retrain(Model& m, const PointsView& arrived, Rng& rng);

// Scores each instance exactly once: the first omega against the initial
// model (scored_at_step 0), every later batch against the just-updated model.
// Streams shorter than omega fall back to offline detection with a warning.
RunResult run_stream(const LabeledDataset& source, const StreamConfig& cfg);

// Static-batch detector: one model over the full dataset, every instance
// scored against it.
std::vector<ScoreRecord> offline_detect(const LabeledDataset& data, std::uint32_t psi,
                                        std::uint32_t t, Rng& rng);

}  // namespace idks
