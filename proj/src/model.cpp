#include "idks/model.hpp"

#include <algorithm>
#include <string>

#include "idks/errors.hpp"

namespace idks {

Model Model::init(const PointsView& window, std::uint32_t psi, std::uint32_t t, Rng& rng) {
  if (t < 1) throw ParameterError("init_model: t must be >= 1");
  if (window.n == 0) throw ParameterError("init_model: empty window");
  Model m;
  m.d_ = window.d;
  m.omega_ = window.n;
  m.psi_ = psi;
  m.t_ = t;
  m.window_start_ = window.start;
  m.parts_.reserve(t);
  for (std::uint32_t j = 0; j < t; ++j) m.parts_.push_back(build_partitioning(window, psi, rng));
  m.populate(window);
  return m;
}

Model Model::init_pinned(const PointsView& window,
                         const std::vector<std::vector<std::uint64_t>>& sources) {
  if (sources.empty()) throw ParameterError("init_model: t must be >= 1");
  Model m;
  m.d_ = window.d;
  m.omega_ = window.n;
  m.psi_ = static_cast<std::uint32_t>(sources.front().size());
  m.t_ = static_cast<std::uint32_t>(sources.size());
  m.window_start_ = window.start;
  m.parts_.reserve(sources.size());
  std::vector<std::uint64_t> positions;
  for (const auto& src_list : sources) {
    if (src_list.size() != m.psi_)
      throw ParameterError("init_pinned: inconsistent psi across partitionings");
    positions.clear();
    for (std::uint64_t s : src_list) {
      if (s < window.start || s >= window.start + window.n)
        throw ParameterError("init_pinned: sample stream index outside window");
      positions.push_back(s - window.start);
    }
    m.parts_.push_back(Partitioning::from_positions(window, positions));
  }
  m.populate(window);
  return m;
}

void Model::populate(const PointsView& window) {
  points_.assign(window.data, window.data + omega_ * d_);
  base_ = 0;
  entries_.assign(static_cast<std::size_t>(t_) * omega_, kUnassigned);
  counts_.assign(static_cast<std::size_t>(t_) * psi_, 0);
  for (std::uint32_t j = 0; j < t_; ++j) {
    const Partitioning& p = parts_[j];
    std::int32_t* col = entries_.data() + static_cast<std::size_t>(j) * omega_;
    std::uint32_t* cnt = counts_.data() + static_cast<std::size_t>(j) * psi_;
    for (std::size_t r = 0; r < omega_; ++r) {
      const std::int32_t a = p.assign(points_.data() + r * d_);
      col[r] = a;
      if (a >= 0) ++cnt[a];
    }
  }
}

double Model::score(std::span<const double> x) const {
  if (x.size() != d_) throw ParameterError("score: point dimension mismatch");
  std::uint64_t total = 0;
  for (std::uint32_t j = 0; j < t_; ++j) {
    const std::int32_t a = parts_[j].assign(x.data());
    if (a >= 0) total += counts_[static_cast<std::size_t>(j) * psi_ + a];
  }
  return static_cast<double>(total) / (static_cast<double>(t_) * static_cast<double>(omega_));
}

double Model::score_row(std::size_t row) const {
  const std::size_t p = phys(row);
  std::uint64_t total = 0;
  for (std::uint32_t j = 0; j < t_; ++j) {
    const std::int32_t a = entries_[static_cast<std::size_t>(j) * omega_ + p];
    if (a >= 0) total += counts_[static_cast<std::size_t>(j) * psi_ + a];
  }
  return static_cast<double>(total) / (static_cast<double>(t_) * static_cast<double>(omega_));
}

std::vector<double> Model::window_copy() const {
  std::vector<double> out(omega_ * d_);
  for (std::size_t r = 0; r < omega_; ++r) {
    const double* src = points_.data() + phys(r) * d_;
    std::copy(src, src + d_, out.begin() + r * d_);
  }
  return out;
}

std::vector<std::uint32_t> Model::recount() const {
  std::vector<std::uint32_t> fresh(static_cast<std::size_t>(t_) * psi_, 0);
  for (std::uint32_t j = 0; j < t_; ++j) {
    const std::int32_t* col = entries_.data() + static_cast<std::size_t>(j) * omega_;
    std::uint32_t* cnt = fresh.data() + static_cast<std::size_t>(j) * psi_;
    for (std::size_t r = 0; r < omega_; ++r)
      if (col[r] >= 0) ++cnt[col[r]];
  }
  return fresh;
}

void Model::reassign_column(std::size_t j) {
  const Partitioning& p = parts_[j];
  std::int32_t* col = entries_.data() + j * omega_;
  std::uint32_t* cnt = counts_.data() + j * psi_;
  for (std::size_t r = 0; r < omega_; ++r) {
    const std::int32_t a = p.assign(points_.data() + r * d_);
    const std::int32_t old = col[r];
    if (old != a) {
      if (old >= 0) --cnt[old];
      if (a >= 0) ++cnt[a];
      col[r] = a;
    }
  }
}

bool equivalent(const Model& a, const Model& b) {
  if (a.d_ != b.d_ || a.omega_ != b.omega_ || a.psi_ != b.psi_ || a.t_ != b.t_ ||
      a.window_start_ != b.window_start_)
    return false;
  if (a.parts_ != b.parts_ || a.counts_ != b.counts_) return false;
  for (std::size_t r = 0; r < a.omega_; ++r) {
    const double* pa = a.points_.data() + a.phys(r) * a.d_;
    const double* pb = b.points_.data() + b.phys(r) * b.d_;
    if (!std::equal(pa, pa + a.d_, pb)) return false;
    for (std::uint32_t j = 0; j < a.t_; ++j)
      if (a.assignment(r, j) != b.assignment(r, j)) return false;
  }
  return true;
}

double idk_similarity(const PointsView& x, const PointsView& y,
                      const PartitionEnsemble& ensemble) {
  if (x.n == 0 || y.n == 0) throw ParameterError("idk_similarity: empty point set");
  if (ensemble.empty()) throw ParameterError("idk_similarity: empty ensemble");
  if (x.d != ensemble.front().dim() || y.d != ensemble.front().dim())
    throw ParameterError("idk_similarity: dimension mismatch");

  const std::size_t psi = ensemble.front().psi();
  std::vector<std::uint64_t> cx(psi), cy(psi);
  std::uint64_t dot = 0;
  for (const Partitioning& p : ensemble) {
    std::fill(cx.begin(), cx.end(), 0);
    std::fill(cy.begin(), cy.end(), 0);
    for (std::size_t r = 0; r < x.n; ++r) {
      const std::int32_t a = p.assign(x.data + r * x.d);
      if (a >= 0) ++cx[a];
    }
    for (std::size_t r = 0; r < y.n; ++r) {
      const std::int32_t a = p.assign(y.data + r * y.d);
      if (a >= 0) ++cy[a];
    }
    for (std::size_t k = 0; k < psi; ++k) dot += cx[k] * cy[k];
  }
  return static_cast<double>(dot) /
         (static_cast<double>(ensemble.size()) * static_cast<double>(x.n) *
          static_cast<double>(y.n));
}

}  // namespace idks
