#include "idks/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "idks/errors.hpp"

namespace idks {
namespace {

// radii_sq[i] = min over j != i of squared distance between points i and j.
// Single shared routine so that every build/replace path produces bit-identical
// radii for the same slot contents.
std::vector<double> compute_radii_sq(const double* pts, std::size_t psi, std::size_t dim) {
  std::vector<double> r(psi, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < psi; ++i) {
    const double* a = pts + i * dim;
    for (std::size_t j = i + 1; j < psi; ++j) {
      const double* b = pts + j * dim;
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      r[i] = std::min(r[i], s);
      r[j] = std::min(r[j], s);
    }
  }
  return r;
}

}  // namespace

Partitioning Partitioning::from_positions(const PointsView& window,
                                          std::span<const std::uint64_t> positions) {
  const std::size_t psi = positions.size();
  if (psi < 2) throw ParameterError("partitioning needs at least 2 samples (psi >= 2)");
  if (psi > window.n) throw ParameterError("psi exceeds window size");

  Partitioning p;
  p.dim_ = window.d;
  p.centers_.resize(psi * window.d);
  p.sources_.resize(psi);
  for (std::size_t i = 0; i < psi; ++i) {
    const std::uint64_t pos = positions[i];
    if (pos >= window.n) throw ParameterError("sample position out of window range");
    for (std::size_t j = 0; j < i; ++j)
      if (positions[j] == pos) throw ParameterError("duplicate sample position");
    const double* src = window.data + pos * window.d;
    std::copy(src, src + window.d, p.centers_.begin() + i * window.d);
    p.sources_[i] = window.start + pos;
  }
  p.radii_sq_ = compute_radii_sq(p.centers_.data(), psi, p.dim_);
  return p;
}

Partitioning Partitioning::from_raw(std::size_t dim, std::vector<double> centers,
                                    std::vector<double> radii_sq,
                                    std::vector<std::uint64_t> sources) {
  Partitioning p;
  p.dim_ = dim;
  p.centers_ = std::move(centers);
  p.radii_sq_ = std::move(radii_sq);
  p.sources_ = std::move(sources);
  return p;
}

double Partitioning::radius(std::size_t slot) const { return std::sqrt(radii_sq_[slot]); }

SampleSlot Partitioning::slot(std::size_t i) const {
  SampleSlot s;
  s.point.assign(center_data(i), center_data(i) + dim_);
  s.source_index = sources_[i];
  s.radius = radius(i);
  return s;
}

void Partitioning::replace_slots(std::span<const std::uint32_t> expired_slots,
                                 const PointsView& pool,
                                 std::span<const std::uint64_t> pool_positions) {
  const std::size_t m = expired_slots.size();
  if (m != pool_positions.size())
    throw ParameterError("replace_slots: expired/replacement size mismatch");
  if (m == 0) return;
  if (pool.d != dim_) throw ParameterError("replace_slots: dimension mismatch");

  // validate before committing anything
  for (std::size_t k = 0; k < m; ++k) {
    if (expired_slots[k] >= psi()) throw ParameterError("replace_slots: slot index out of range");
    if (k > 0 && expired_slots[k] <= expired_slots[k - 1])
      throw ParameterError("replace_slots: expired slots must be ascending and distinct");
    if (pool_positions[k] >= pool.n)
      throw ParameterError("replace_slots: replacement position out of pool");
  }
  for (std::size_t k = 0; k < m; ++k) {
    const std::uint64_t src = pool.start + pool_positions[k];
    for (std::size_t k2 = k + 1; k2 < m; ++k2)
      if (pool.start + pool_positions[k2] == src)
        throw ParameterError("replace_slots: duplicate replacement source index");
    for (std::size_t i = 0; i < psi(); ++i) {
      bool i_expires = false;
      for (std::size_t k2 = 0; k2 < m; ++k2) i_expires |= (expired_slots[k2] == i);
      if (!i_expires && sources_[i] == src)
        throw ParameterError("replace_slots: replacement source collides with surviving slot");
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    const std::uint32_t slot = expired_slots[k];
    const std::uint64_t pos = pool_positions[k];
    const double* src = pool.data + pos * dim_;
    std::copy(src, src + dim_, centers_.begin() + slot * dim_);
    sources_[slot] = pool.start + pos;
  }
  radii_sq_ = compute_radii_sq(centers_.data(), psi(), dim_);
}

Partitioning build_partitioning(const PointsView& window, std::uint32_t psi, Rng& rng) {
  if (window.n == 0) throw ParameterError("build_partitioning: empty window");
  if (psi < 2)
    throw ParameterError("build_partitioning: psi must satisfy 2 <= psi <= window size (got psi=" +
                         std::to_string(psi) + ")");
  if (psi > window.n)
    throw ParameterError("build_partitioning: psi=" + std::to_string(psi) +
                         " exceeds window size " + std::to_string(window.n));
  std::vector<std::uint64_t> positions;
  rng.sample_positions(window.n, psi, positions);
  return Partitioning::from_positions(window, positions);
}

std::vector<double> compute_radii(const PointsView& points) {
  if (points.n < 2) throw ParameterError("compute_radii: need at least 2 points");
  std::vector<double> r = compute_radii_sq(points.data, points.n, points.d);
  for (double& v : r) v = std::sqrt(v);
  return r;
}

std::int32_t assign_slot(std::span<const double> x, const Partitioning& p) {
  if (x.size() != p.dim()) throw ParameterError("assign: point dimension mismatch");
  return p.assign(x.data());
}

}  // namespace idks
