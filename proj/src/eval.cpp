#include "idks/eval.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "idks/errors.hpp"

namespace idks {

namespace {

using Clock = std::chrono::steady_clock;

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double roc_auc(std::span<const double> anomaly_scores, std::span<const std::int8_t> labels) {
  if (anomaly_scores.size() != labels.size())
    throw ParameterError("roc_auc: scores and labels differ in length");
  const std::size_t n = labels.size();
  std::size_t n_pos = 0;
  for (std::int8_t l : labels) {
    if (l != 0 && l != 1) throw ParameterError("roc_auc: labels must be 0 or 1");
    n_pos += l;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw MetricError("roc_auc: undefined on single-class input");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return anomaly_scores[a] < anomaly_scores[b];
  });

  // midranks over tie groups; rank sum of the positive class
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && anomaly_scores[order[j]] == anomaly_scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += midrank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double records_auc(std::span<const ScoreRecord> records) {
  std::vector<double> scores;
  std::vector<std::int8_t> labels;
  scores.reserve(records.size());
  labels.reserve(records.size());
  for (const ScoreRecord& r : records) {
    if (r.label < 0) throw MetricError("records_auc: unlabeled record");
    scores.push_back(-r.normal_score);  // anomaly score = negated normal score
    labels.push_back(r.label);
  }
  return roc_auc(scores, labels);
}

std::vector<AucPoint> sliding_auc(std::span<const ScoreRecord> records, std::size_t omega,
                                  std::size_t stride) {
  if (stride == 0) throw ParameterError("sliding_auc: stride must be positive");
  if (records.empty()) return {};
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].stream_index <= records[i - 1].stream_index)
      throw ParameterError("sliding_auc: records must be sorted by stream index");

  std::vector<AucPoint> out;
  std::vector<double> scores;
  std::vector<std::int8_t> labels;
  const std::uint64_t lo_index = records.front().stream_index;
  const std::uint64_t hi_index = records.back().stream_index;
  if (hi_index - lo_index + 1 != records.size())
    throw ParameterError("sliding_auc: records must cover a dense stream index range");
  if (hi_index - lo_index < 2 * omega) return {};

  for (std::uint64_t center = lo_index + omega; center + omega <= hi_index; center += stride) {
    scores.clear();
    labels.clear();
    // records are dense in stream index for normal runs; locate by offset
    const std::size_t first = static_cast<std::size_t>(center - omega - lo_index);
    const std::size_t last = static_cast<std::size_t>(center + omega - lo_index);
    std::size_t n_pos = 0;
    for (std::size_t i = first; i <= last; ++i) {
      const ScoreRecord& r = records[i];
      if (r.label < 0) throw MetricError("sliding_auc: unlabeled record");
      scores.push_back(-r.normal_score);
      labels.push_back(r.label);
      n_pos += r.label;
    }
    if (n_pos == 0 || n_pos == scores.size()) continue;  // interval lacks a class
    out.push_back({center, roc_auc(scores, labels), n_pos, scores.size() - n_pos});
  }
  return out;
}

double chi_square_p_value(double chi_square, std::size_t dof) {
  if (dof == 0) throw ParameterError("chi_square_p_value: dof must be >= 1");
  if (chi_square <= 0.0) return 1.0;
  return gsl_cdf_chisq_Q(chi_square, static_cast<double>(dof));
}

namespace {

// Exact for results up to 10^15, saturating beyond (enough to reject
// enumerations over the cap without overflowing).
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr std::uint64_t kSaturate = 1000000000000000ULL;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kSaturate) return kSaturate;
  }
  return static_cast<std::uint64_t>(r);
}

// Combinatorial rank of a sorted position set (colex order).
std::uint64_t subset_rank(std::span<const std::uint64_t> sorted_positions) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < sorted_positions.size(); ++i)
    rank += binomial(sorted_positions[i], static_cast<std::uint64_t>(i) + 1);
  return rank;
}

}  // namespace

UniformityResult uniformity_test(std::size_t omega, std::uint32_t psi, std::size_t step,
                                 std::size_t slides, std::uint64_t trials, std::uint64_t seed,
                                 ReplacementPolicy policy) {
  if (psi < 2 || static_cast<std::size_t>(psi) >= omega)
    throw ParameterError("uniformity_test: need 2 <= psi < omega");
  if (step < 1 || step > omega) throw ParameterError("uniformity_test: need 1 <= step <= omega");
  const std::uint64_t n_subsets = binomial(omega, psi);
  if (n_subsets > 10000)
    throw ParameterError("uniformity_test: C(omega, psi) = " + std::to_string(n_subsets) +
                         " exceeds the enumeration cap of 10000");
  if (trials < 100 * n_subsets)
    throw ParameterError("uniformity_test: need trials >= 100 * C(omega, psi) = " +
                         std::to_string(100 * n_subsets) + " (got " + std::to_string(trials) +
                         ")");

  const std::size_t stream_len = omega + slides * step;
  std::vector<std::uint64_t> histogram(n_subsets, 0);
  std::vector<double> stream(stream_len);
  std::vector<std::uint64_t> positions(psi);

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Rng rng(split_seed(seed, trial));
    for (double& x : stream) x = rng.uniform01();  // 1-D; values are immaterial here

    const PointsView window0{stream.data(), omega, 1, 0};
    Model m = Model::init(window0, psi, 1, rng);
    for (std::size_t s = 0; s < slides; ++s) {
      const PointsView arrived{stream.data() + omega + s * step, step, 1, omega + s * step};
      update_incremental(m, arrived, rng, policy);
    }

    const Partitioning& p = m.ensemble().front();
    for (std::size_t i = 0; i < psi; ++i)
      positions[i] = p.source_index(i) - m.window_start();
    std::sort(positions.begin(), positions.end());
    ++histogram[subset_rank(positions)];
  }

  const double expected = static_cast<double>(trials) / static_cast<double>(n_subsets);
  double chi2 = 0.0;
  for (std::uint64_t obs : histogram) {
    const double diff = static_cast<double>(obs) - expected;
    chi2 += diff * diff / expected;
  }

  UniformityResult res;
  res.chi_square = chi2;
  res.dof = static_cast<std::size_t>(n_subsets - 1);
  res.p_value = chi_square_p_value(chi2, res.dof);
  res.pass = res.p_value > 0.001;
  res.n_subsets = n_subsets;
  res.trials = trials;
  res.min_count = static_cast<std::size_t>(*std::min_element(histogram.begin(), histogram.end()));
  res.max_count = static_cast<std::size_t>(*std::max_element(histogram.begin(), histogram.end()));
  return res;
}

std::vector<BenchRow> bench_runtime(const std::vector<StreamConfig>& grid,
                                    const LabeledDataset& source, std::size_t repeats,
                                    std::uint64_t base_seed) {
  if (grid.empty()) throw ParameterError("bench: empty config grid");
  if (repeats == 0) throw ParameterError("bench: repeats must be >= 1");

  // repeats are interleaved across configs so that slow phases of the host
  // machine spread over the whole grid instead of biasing one config's median
  std::vector<std::vector<BenchRow>> per_config(grid.size());
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    for (std::size_t c = 0; c < grid.size(); ++c) {
      StreamConfig cfg = grid[c];
      cfg.seed = split_seed(base_seed, c * repeats + rep);
      const RunResult run = run_stream(source, cfg);
      per_config[c].push_back({cfg.mode, cfg.omega, cfg.step, cfg.psi, cfg.t, cfg.seed, false,
                               run.metrics.update_mean_s, run.metrics.update_p50_s,
                               run.metrics.total_seconds, records_auc(run.records)});
    }
  }

  std::vector<BenchRow> rows;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    std::vector<double> means, medians, totals, aucs;
    for (const BenchRow& r : per_config[c]) {
      rows.push_back(r);
      means.push_back(r.mean_update_s);
      medians.push_back(r.median_update_s);
      totals.push_back(r.total_s);
      aucs.push_back(r.auc);
    }
    rows.push_back({grid[c].mode, grid[c].omega, grid[c].step, grid[c].psi, grid[c].t, 0, true,
                    median_of(means), median_of(medians), median_of(totals), median_of(aucs)});
  }
  return rows;
}

std::uint32_t sweep_argmax(std::span<const SweepRow> rows) {
  if (rows.empty()) throw ParameterError("sweep: no rows");
  std::uint32_t best_psi = rows.front().psi;
  double best_auc = rows.front().auc;
  for (const SweepRow& r : rows) {
    if (r.auc > best_auc || (r.auc == best_auc && r.psi < best_psi)) {
      best_auc = r.auc;
      best_psi = r.psi;
    }
  }
  return best_psi;
}

SweepResult psi_sweep(const LabeledDataset& source, StreamConfig base,
                      std::span<const std::uint32_t> psis) {
  if (psis.empty()) throw ParameterError("sweep: empty psi list");
  SweepResult res;
  for (std::uint32_t psi : psis) {
    StreamConfig cfg = base;
    cfg.psi = psi;
    const auto t0 = Clock::now();
    const RunResult run = run_stream(source, cfg);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    res.rows.push_back({psi, records_auc(run.records), secs});
  }
  res.argmax_psi = sweep_argmax(res.rows);
  return res;
}

EquivalenceReport verify_incremental_equivalence(const LabeledDataset& source,
                                                 const StreamConfig& cfg, double score_rtol) {
  cfg.validate();
  if (source.size() < cfg.omega)
    throw ParameterError("equivalence check: stream shorter than omega");

  EquivalenceReport rep;
  rep.pass = true;
  Rng rng(cfg.seed);
  Model model = Model::init(source.view(0, cfg.omega), cfg.psi, cfg.t, rng);

  std::size_t pos = cfg.omega;
  while (pos < source.size()) {
    const std::size_t l = std::min(cfg.step, source.size() - pos);
    update_incremental(model, source.view(pos, l), rng, cfg.policy);
    pos += l;
    ++rep.updates_checked;

    // pin the incremental model's sample sets and rebuild from scratch
    std::vector<std::vector<std::uint64_t>> sources;
    sources.reserve(model.t());
    for (const Partitioning& p : model.ensemble())
      sources.emplace_back(p.source_indices().begin(), p.source_indices().end());

    const std::vector<double> window = model.window_copy();
    const PointsView view{window.data(), model.window_size(), model.dim(), model.window_start()};
    const Model rebuilt = Model::init_pinned(view, sources);

    for (std::size_t r = 0; r < model.window_size(); ++r)
      for (std::uint32_t j = 0; j < model.t(); ++j)
        if (model.assignment(r, j) != rebuilt.assignment(r, j)) ++rep.assignment_mismatches;
    for (std::size_t i = 0; i < model.counts().size(); ++i)
      if (model.counts()[i] != rebuilt.counts()[i]) ++rep.count_mismatches;

    for (std::size_t r = 0; r < model.window_size(); ++r) {
      const double a = model.score_row(r);
      const double b = rebuilt.score_row(r);
      const double denom = std::max({std::abs(a), std::abs(b), 1e-300});
      rep.max_score_rel_err = std::max(rep.max_score_rel_err, std::abs(a - b) / denom);
    }

    if ((rep.assignment_mismatches || rep.count_mismatches ||
         rep.max_score_rel_err > score_rtol) &&
        rep.pass) {
      rep.pass = false;
      rep.detail = "first mismatch after update " + std::to_string(rep.updates_checked) +
                   " (window_start " + std::to_string(model.window_start()) + ")";
    }
  }
  rep.pass = rep.pass && rep.assignment_mismatches == 0 && rep.count_mismatches == 0 &&
             rep.max_score_rel_err <= score_rtol;
  return rep;
}

}  // namespace idks
