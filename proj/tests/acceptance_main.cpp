// Acceptance suite: every criterion below pins its parameters and tolerances
// in code and prints one [PASS]/[FAIL] line. Exit code = number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "idks/eval.hpp"
#include "idks/io.hpp"

using namespace idks;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  int id;
  const char* name;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Criterion> g_results;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
  g_results.push_back({id, name, pass, detail, seconds});
  std::printf("[%s] criterion %d (%s): %s  [%.1fs]\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str(), seconds);
  std::fflush(stdout);
}

LabeledDataset two_cluster(std::size_t n, std::uint64_t seed) {
  TwoClusterSpec spec;
  spec.n = n;
  spec.seed = seed;
  return gen_two_cluster(spec);
}

// ---------------------------------------------------------------------------
// 1. deterministic oracle equivalence: incremental vs pinned from-scratch
//    rebuild after every update (assignments and counts exact, scores to
//    relative 1e-12), 10k stream, omega=512, l=50, psi=4, t=20, under 2 min.
void criterion_1() {
  const auto t0 = Clock::now();
  const LabeledDataset ds = two_cluster(10000, 101);
  StreamConfig cfg;
  cfg.omega = 512;
  cfg.step = 50;
  cfg.psi = 4;
  cfg.t = 20;
  cfg.seed = 11;
  const EquivalenceReport rep = verify_incremental_equivalence(ds, cfg, 1e-12);
  const double secs = elapsed_s(t0);
  const bool pass = rep.pass && secs < 120.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "updates=%zu assignment_mismatches=%zu count_mismatches=%zu "
                "max_score_rel_err=%.3g",
                rep.updates_checked, rep.assignment_mismatches, rep.count_mismatches,
                rep.max_score_rel_err);
  report(1, "oracle equivalence", pass, buf, secs);
}

// ---------------------------------------------------------------------------
// 2. sampling-distribution uniformity: chi-square over all C(6,2)=15 subsets
//    after 3 slides, 150k trials, p > 0.001; newest-only sabotage p < 1e-6.
void criterion_2() {
  const auto t0 = Clock::now();
  const UniformityResult uni = uniformity_test(6, 2, 2, 3, 150000, 202);
  const UniformityResult bad =
      uniformity_test(6, 2, 2, 3, 150000, 203, ReplacementPolicy::kNewestOnly);
  const double secs = elapsed_s(t0);
  const bool pass = uni.pass && !bad.pass && bad.p_value < 1e-6 && secs < 300.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "chi2=%.2f p=%.4f (dof=%zu); sabotage chi2=%.0f p=%.3g",
                uni.chi_square, uni.p_value, uni.dof, bad.chi_square, bad.p_value);
  report(2, "sampling uniformity", pass, buf, secs);
}

// ---------------------------------------------------------------------------
// 3. running-sum conservation over >= 1000 random update sequences.
void criterion_3() {
  const auto t0 = Clock::now();
  Rng meta(303);
  std::size_t sequences = 0, updates = 0, violations = 0;
  while (sequences < 1000) {
    const std::size_t omega = 8 + meta.below(57);                                  // [8, 64]
    const std::uint32_t psi = 2 + static_cast<std::uint32_t>(meta.below(omega / 2 - 1));
    const std::size_t l = 1 + meta.below(omega);                                   // [1, omega]
    const std::uint32_t t = 1 + static_cast<std::uint32_t>(meta.below(8));         // [1, 8]
    const std::size_t slides = 1 + meta.below(8);

    LabeledDataset ds;
    ds.d = 2;
    const std::size_t n = omega + slides * l;
    ds.xs.resize(n * 2);
    ds.labels.assign(n, 0);
    Rng data_rng(meta.next_bits());
    for (double& v : ds.xs) v = data_rng.uniform(-4.0, 4.0);

    Rng rng(meta.next_bits());
    Model m = Model::init(ds.view(0, omega), psi, t, rng);
    for (std::size_t s = 0; s < slides; ++s) {
      update_incremental(m, ds.view(omega + s * l, l), rng);
      ++updates;
      const auto fresh = m.recount();
      if (!std::equal(fresh.begin(), fresh.end(), m.counts().begin(), m.counts().end()))
        ++violations;
    }
    ++sequences;
  }
  const double secs = elapsed_s(t0);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "sequences=%zu updates=%zu violations=%zu", sequences, updates,
                violations);
  report(3, "running-sum conservation", violations == 0, buf, secs);
}

// ---------------------------------------------------------------------------
// 4. roc_auc equals the exhaustive pos/neg pair statistic on 10k random
//    inputs of length <= 200, to 1e-12.
void criterion_4() {
  const auto t0 = Clock::now();
  Rng rng(404);
  std::size_t tested = 0;
  double max_err = 0.0;
  while (tested < 10000) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> scores(n);
    std::vector<std::int8_t> labels(n);
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = rng.below(2) ? static_cast<double>(rng.below(10))  // tie-heavy
                               : rng.uniform(-1.0, 1.0);
      labels[i] = static_cast<std::int8_t>(rng.below(2));
      n_pos += labels[i];
    }
    if (n_pos == 0 || n_pos == n) continue;

    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != 1) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] != 0) continue;
        ++pairs;
        if (scores[i] > scores[j])
          wins += 1.0;
        else if (scores[i] == scores[j])
          wins += 0.5;
      }
    }
    const double brute = wins / static_cast<double>(pairs);
    max_err = std::max(max_err, std::abs(roc_auc(scores, labels) - brute));
    ++tested;
  }
  const double secs = elapsed_s(t0);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "inputs=%zu max_abs_err=%.3g", tested, max_err);
  report(4, "AUC pair-statistic oracle", max_err <= 1e-12, buf, secs);
}

// ---------------------------------------------------------------------------
// 5. runtime scaling at l=100, psi=4, t=100: idks-mode median per-update <= 2x
//    across omega in {1024..8192}; retrain grows >= 4x; >= 5x speedup at 2048.
void criterion_5() {
  const auto t0 = Clock::now();
  const LabeledDataset ds = two_cluster(24576, 505);
  const std::vector<std::size_t> omegas{1024, 2048, 4096, 8192};

  std::vector<StreamConfig> grid;
  for (const Mode mode : {Mode::kIncremental, Mode::kRetrain})
    for (const std::size_t omega : omegas) {
      StreamConfig cfg;
      cfg.omega = omega;
      cfg.step = 100;
      cfg.psi = 4;
      cfg.t = 100;
      cfg.mode = mode;
      grid.push_back(cfg);
    }

  const auto rows = bench_runtime(grid, ds, 5, 506);

  auto median_for = [&](Mode mode, std::size_t omega) {
    for (const BenchRow& r : rows)
      if (r.is_median && r.mode == mode && r.omega == omega) return r.median_update_s;
    return -1.0;
  };

  double idks_min = 1e30, idks_max = 0.0;
  for (const std::size_t omega : omegas) {
    const double v = median_for(Mode::kIncremental, omega);
    idks_min = std::min(idks_min, v);
    idks_max = std::max(idks_max, v);
  }
  const double idks_spread = idks_max / idks_min;
  const double retrain_growth =
      median_for(Mode::kRetrain, 8192) / median_for(Mode::kRetrain, 1024);
  const double speedup_2048 =
      median_for(Mode::kRetrain, 2048) / median_for(Mode::kIncremental, 2048);

  const double secs = elapsed_s(t0);
  const bool pass =
      idks_spread <= 2.0 && retrain_growth >= 4.0 && speedup_2048 >= 5.0 && secs < 900.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "idks spread=%.2fx (<=2), retrain growth=%.2fx (>=4), speedup@2048=%.2fx (>=5)",
                idks_spread, retrain_growth, speedup_2048);
  report(5, "runtime scaling", pass, buf, secs);
}

// ---------------------------------------------------------------------------
// criteria 6 and 7 share one 100k gradual-drift stream
struct DriftRuns {
  LabeledDataset ds;
  std::vector<ScoreRecord> best_records;
  std::uint32_t best_psi = 0;
  double best_auc = 0.0;
  double retrain_auc = 0.0;
};

DriftRuns g_drift;

void criterion_6() {
  const auto t0 = Clock::now();
  g_drift.ds = two_cluster(100000, 606);

  StreamConfig cfg;
  cfg.omega = 2048;
  cfg.step = 100;
  cfg.t = 100;
  cfg.seed = 607;

  for (const std::uint32_t psi : {2u, 4u, 8u}) {
    StreamConfig c = cfg;
    c.psi = psi;
    RunResult run = run_stream(g_drift.ds, c);
    const double auc = records_auc(run.records);
    if (auc > g_drift.best_auc) {
      g_drift.best_auc = auc;
      g_drift.best_psi = psi;
      g_drift.best_records = std::move(run.records);
    }
  }

  StreamConfig retrain = cfg;
  retrain.psi = g_drift.best_psi;
  retrain.mode = Mode::kRetrain;
  const RunResult rr = run_stream(g_drift.ds, retrain);
  g_drift.retrain_auc = records_auc(rr.records);

  const double gap = std::abs(g_drift.best_auc - g_drift.retrain_auc);
  const double secs = elapsed_s(t0);
  const bool pass = g_drift.best_auc >= 0.93 && gap <= 0.03;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "best psi=%u auc=%.4f (>=0.93), retrain auc=%.4f, |gap|=%.4f (<=0.03)",
                g_drift.best_psi, g_drift.best_auc, g_drift.retrain_auc, gap);
  report(6, "drift-stream accuracy", pass, buf, secs);
}

void criterion_7() {
  const auto t0 = Clock::now();
  const std::size_t omega = 2048;
  const auto points = sliding_auc(g_drift.best_records, omega, 100);

  double min_auc = 1.0;
  std::size_t considered = 0;
  for (const AucPoint& p : points) {
    if (p.center < 2 * omega) continue;  // interval must be past the warm-up window
    min_auc = std::min(min_auc, p.auc);
    ++considered;
  }
  const double secs = elapsed_s(t0);
  const bool pass = considered > 0 && min_auc >= 0.85 && secs < 300.0;
  char buf[192];
  std::snprintf(buf, sizeof(buf), "points=%zu min sliding auc=%.4f (>=0.85)", considered, min_auc);
  report(7, "drift tracking", pass, buf, secs);
}

// ---------------------------------------------------------------------------
// 8. psi sweep over {2,...,64}: argmax <= 8 in at least 4 of 5 seeds.
void criterion_8() {
  const auto t0 = Clock::now();
  const std::vector<std::uint32_t> psis{2, 4, 8, 16, 32, 64};
  StreamConfig base;
  base.omega = 2048;
  base.step = 100;
  base.t = 100;

  int small_argmax = 0;
  std::string argmaxes;
  for (int s = 0; s < 5; ++s) {
    base.seed = 808 + static_cast<std::uint64_t>(s);
    const SweepResult res = psi_sweep(g_drift.ds, base, psis);
    if (res.argmax_psi <= 8) ++small_argmax;
    argmaxes += (s ? "," : "") + std::to_string(res.argmax_psi);
  }
  const double secs = elapsed_s(t0);
  const bool pass = small_argmax >= 4;
  char buf[192];
  std::snprintf(buf, sizeof(buf), "argmax per seed = {%s}; psi<=8 in %d/5 seeds (>=4)",
                argmaxes.c_str(), small_argmax);
  report(8, "psi concentration", pass, buf, secs);
}

}  // namespace

int main() {
  std::printf("idks acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();

  int failures = 0;
  for (const Criterion& c : g_results) failures += c.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
              g_results.size());
  return failures;
}
