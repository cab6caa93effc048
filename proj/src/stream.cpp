#include "idks/stream.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>

#include "idks/errors.hpp"

namespace idks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kIncremental: return "idks";
    case Mode::kRetrain: return "retrain";
    case Mode::kOffline: return "offline";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  if (name == "idks") return Mode::kIncremental;
  if (name == "retrain") return Mode::kRetrain;
  if (name == "offline") return Mode::kOffline;
  throw ParameterError("unknown mode '" + name + "' (expected idks, retrain or offline)");
}

void StreamConfig::validate() const {
  if (!(psi >= 2 && static_cast<std::size_t>(psi) < omega))
    throw ParameterError("config: psi must satisfy 2 <= psi < omega (got psi=" +
                         std::to_string(psi) + ", omega=" + std::to_string(omega) + ")");
  if (!(step >= 1 && step <= omega))
    throw ParameterError("config: step must satisfy 1 <= step <= omega (got step=" +
                         std::to_string(step) + ", omega=" + std::to_string(omega) + ")");
  if (t < 1) throw ParameterError("config: t must be >= 1");
  if (retrain_every < 1) throw ParameterError("config: retrain cadence must be >= 1");
}

UpdateStats update_incremental(Model& m, const PointsView& arrived, Rng& rng,
                               ReplacementPolicy policy) {
  const auto t0 = Clock::now();
  const std::size_t l = arrived.n;
  if (l == 0 || l > m.omega_) throw StateError("update: arrived batch size out of range");
  if (arrived.d != m.d_) throw StateError("update: arrived batch dimension mismatch");
  if (arrived.start != m.window_start_ + m.omega_)
    throw StateError("update: arrived batch is not contiguous with the window");

  const std::size_t omega = m.omega_;
  const std::uint64_t departed_end = m.window_start_ + l;

  // physical rows being recycled (oldest l rows, in departure order)
  m.phys_scratch_.resize(l);
  for (std::size_t i = 0; i < l; ++i) m.phys_scratch_[i] = m.phys(i);

  // settle departures in the ledger before the rows are overwritten
  for (std::uint32_t j = 0; j < m.t_; ++j) {
    std::int32_t* col = m.entries_.data() + static_cast<std::size_t>(j) * omega;
    std::uint32_t* cnt = m.counts_.data() + static_cast<std::size_t>(j) * m.psi_;
    for (std::size_t i = 0; i < l; ++i) {
      std::int32_t& e = col[m.phys_scratch_[i]];
      if (e >= 0) --cnt[e];
      e = kUnassigned;
    }
  }

  // admit the arrived rows into the ring
  for (std::size_t i = 0; i < l; ++i) {
    const double* src = arrived.data + i * m.d_;
    std::copy(src, src + m.d_, m.points_.begin() + m.phys_scratch_[i] * m.d_);
  }
  m.base_ = (m.base_ + l) % omega;
  m.window_start_ += l;

  UpdateStats stats;
  for (std::uint32_t j = 0; j < m.t_; ++j) {
    Partitioning& p = m.parts_[j];

    // expired slots: samples generated from the departed batch
    m.expired_scratch_.clear();
    for (std::size_t s = 0; s < p.psi(); ++s)
      if (p.source_index(s) < departed_end)
        m.expired_scratch_.push_back(static_cast<std::uint32_t>(s));

    const std::size_t k = m.expired_scratch_.size();
    if (k > 0) {
      assert(k <= std::min<std::size_t>(p.psi(), l));
      if (policy == ReplacementPolicy::kUniform) {
        rng.sample_positions(l, k, m.draw_scratch_);
      } else {  // kNewestOnly: deterministic bias toward the freshest arrivals
        m.draw_scratch_.clear();
        for (std::size_t i = l - k; i < l; ++i) m.draw_scratch_.push_back(i);
      }
      p.replace_slots(m.expired_scratch_, arrived, m.draw_scratch_);
      m.reassign_column(j);
      stats.replaced_samples += static_cast<std::uint32_t>(k);
      ++stats.affected_partitionings;
    } else {
      // untouched partitioning: only the arrived rows need assignments
      std::int32_t* col = m.entries_.data() + static_cast<std::size_t>(j) * omega;
      std::uint32_t* cnt = m.counts_.data() + static_cast<std::size_t>(j) * m.psi_;
      for (std::size_t i = 0; i < l; ++i) {
        const std::int32_t a = p.assign(arrived.data + i * m.d_);
        col[m.phys_scratch_[i]] = a;
        if (a >= 0) ++cnt[a];
      }
    }
  }

#ifndef NDEBUG
  // sample legality: sources distinct and inside the live window
  for (const Partitioning& p : m.parts_) {
    for (std::size_t a = 0; a < p.psi(); ++a) {
      assert(p.source_index(a) >= m.window_start_);
      assert(p.source_index(a) < m.window_start_ + omega);
      for (std::size_t b = a + 1; b < p.psi(); ++b)
        assert(p.source_index(a) != p.source_index(b));
    }
  }
#endif

  stats.seconds = seconds_since(t0);
  return stats;
}

void update_retrain(Model& m, const PointsView& arrived, Rng& rng) {
  const std::size_t l = arrived.n;
  if (l == 0 || l > m.window_size()) throw StateError("update: arrived batch size out of range");
  if (arrived.d != m.dim()) throw StateError("update: arrived batch dimension mismatch");
  if (arrived.start != m.window_start() + m.window_size())
    throw StateError("update: arrived batch is not contiguous with the window");

  const std::size_t omega = m.window_size();
  const std::size_t keep = omega - l;
  std::vector<double> next(omega * m.dim());
  for (std::size_t r = 0; r < keep; ++r) {
    const auto pt = m.window_point(r + l);
    std::copy(pt.begin(), pt.end(), next.begin() + r * m.dim());
  }
  std::copy(arrived.data, arrived.data + l * m.dim(), next.begin() + keep * m.dim());

  const PointsView window{next.data(), omega, m.dim(), m.window_start() + l};
  m = Model::init(window, m.psi(), m.t(), rng);
}

std::vector<ScoreRecord> offline_detect(const LabeledDataset& data, std::uint32_t psi,
                                        std::uint32_t t, Rng& rng) {
  if (data.size() < psi || psi < 2)
    throw ParameterError("offline: need dataset size >= psi >= 2 (got psi=" +
                         std::to_string(psi) + ", n=" + std::to_string(data.size()) + ")");
  const Model m = Model::init(data.view_all(), psi, t, rng);
  std::vector<ScoreRecord> records(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    records[i] = {i, m.score_row(i), data.label(i), 0};
  return records;
}

RunResult run_stream(const LabeledDataset& source, const StreamConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const std::size_t n = source.size();
  RunResult out;
  out.metrics.n_instances = n;

  if (cfg.mode == Mode::kOffline || n < cfg.omega) {
    if (n < cfg.omega && cfg.mode != Mode::kOffline)
      out.metrics.warning = "stream length " + std::to_string(n) + " is shorter than omega " +
                            std::to_string(cfg.omega) + "; fell back to offline mode";
    Rng rng(cfg.seed);
    const auto ti = Clock::now();
    out.records = offline_detect(source, cfg.psi, cfg.t, rng);
    out.metrics.init_seconds = seconds_since(ti);
    out.metrics.total_seconds = seconds_since(t0);
    return out;
  }

  Rng rng(cfg.seed);
  out.records.reserve(n);

  const auto ti = Clock::now();
  Model model = Model::init(source.view(0, cfg.omega), cfg.psi, cfg.t, rng);
  out.metrics.init_seconds = seconds_since(ti);

  for (std::size_t r = 0; r < cfg.omega; ++r)
    out.records.push_back({r, model.score_row(r), source.label(r), 0});

  std::vector<double> update_times;
  std::uint64_t affected_total = 0;
  std::uint32_t step_no = 0;
  std::size_t pos = cfg.omega;
  while (pos < n) {
    ++step_no;
    const std::size_t l = std::min(cfg.step, n - pos);
    const PointsView arrived = source.view(pos, l);

    bool model_fresh = true;
    if (cfg.mode == Mode::kIncremental) {
      const UpdateStats st = update_incremental(model, arrived, rng, cfg.policy);
      update_times.push_back(st.seconds);
      out.metrics.replaced_total += st.replaced_samples;
      affected_total += st.affected_partitionings;
    } else {  // retrain
      if (step_no % cfg.retrain_every == 0) {
        const auto tu = Clock::now();
        if (cfg.retrain_every == 1) {
          update_retrain(model, arrived, rng);
        } else {
          // skipped slides left the model behind; rebuild on the live window
          model = Model::init(source.view(pos + l - cfg.omega, cfg.omega), cfg.psi, cfg.t, rng);
        }
        update_times.push_back(seconds_since(tu));
        out.metrics.replaced_total += static_cast<std::uint64_t>(cfg.psi) * cfg.t;
        affected_total += cfg.t;
      } else {
        model_fresh = false;  // stale model keeps scoring until the next retrain
      }
    }

    if (model_fresh) {
      for (std::size_t i = 0; i < l; ++i)
        out.records.push_back(
            {pos + i, model.score_row(cfg.omega - l + i), source.label(pos + i), step_no});
    } else {
      for (std::size_t i = 0; i < l; ++i)
        out.records.push_back(
            {pos + i, model.score(arrived.point(i)), source.label(pos + i), step_no});
    }
    pos += l;
  }

  out.metrics.n_updates = update_times.size();
  if (!update_times.empty()) {
    double sum = 0.0;
    for (double v : update_times) sum += v;
    out.metrics.update_mean_s = sum / static_cast<double>(update_times.size());
    out.metrics.update_p50_s = percentile(update_times, 0.50);
    out.metrics.update_p90_s = percentile(update_times, 0.90);
    out.metrics.update_max_s = *std::max_element(update_times.begin(), update_times.end());
    out.metrics.replaced_mean =
        static_cast<double>(out.metrics.replaced_total) / static_cast<double>(update_times.size());
    out.metrics.affected_mean =
        static_cast<double>(affected_total) / static_cast<double>(update_times.size());
  }
  out.metrics.total_seconds = seconds_since(t0);
  return out;
}

}  // namespace idks
