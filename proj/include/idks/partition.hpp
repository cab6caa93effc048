#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "idks/rng.hpp"

namespace idks {

// Slot index of an instance that falls in no hypersphere.
inline constexpr std::int32_t kUnassigned = -1;

// Read-only view over n points of dimension d in row-major storage.
// Row r carries stream index start + r.
struct PointsView {
  const double* data = nullptr;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t start = 0;

  std::span<const double> point(std::size_t r) const { return {data + r * d, d}; }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

// One sample point of a partitioning, exposed for inspection.
struct SampleSlot {
  std::vector<double> point;
  std::uint64_t source_index = 0;
  double radius = 0.0;
};

// One hypersphere partitioning: psi sample points, each carrying a ball whose
// radius is the distance to its nearest co-sample. Squared radii are the
// canonical stored form; ball membership is strict (< radius), so a
// zero-radius ball matches nothing.
class Partitioning {
 public:
  Partitioning() = default;

  // Builds from the window rows at the given positions (slot order = given
  // order). Positions must be distinct and in range; at least 2 required.
  static Partitioning from_positions(const PointsView& window,
                                     std::span<const std::uint64_t> positions);

  // Used by snapshot load; trusts the caller's radii.
  static Partitioning from_raw(std::size_t dim, std::vector<double> centers,
                               std::vector<double> radii_sq,
                               std::vector<std::uint64_t> sources);

  std::size_t psi() const { return sources_.size(); }
  std::size_t dim() const { return dim_; }

  const double* center_data(std::size_t slot) const { return centers_.data() + slot * dim_; }
  std::span<const double> center(std::size_t slot) const { return {center_data(slot), dim_}; }
  double radius_sq(std::size_t slot) const { return radii_sq_[slot]; }
  double radius(std::size_t slot) const;
  std::uint64_t source_index(std::size_t slot) const { return sources_[slot]; }
  std::span<const std::uint64_t> source_indices() const { return sources_; }
  std::span<const double> radii_sq() const { return radii_sq_; }
  SampleSlot slot(std::size_t i) const;

  // Overwrites the listed slots (ascending slot order) with the pool points at
  // pool_positions (pairing k-th expired slot with k-th position), then
  // refreshes the radii of every slot.
  void replace_slots(std::span<const std::uint32_t> expired_slots, const PointsView& pool,
                     std::span<const std::uint64_t> pool_positions);

  // Nearest sample wins (ties to the lowest slot index); the instance is
  // assigned only if it lies strictly inside the winner's ball.
  std::int32_t assign(const double* x) const {
    const std::size_t m = sources_.size();
    const double* c = centers_.data();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    if (dim_ == 2) {  // dominant case in the benchmarks; keep the loop unrolled
      const double x0 = x[0], x1 = x[1];
      for (std::size_t i = 0; i < m; ++i, c += 2) {
        const double d0 = x0 - c[0], d1 = x1 - c[1];
        const double s = d0 * d0 + d1 * d1;
        if (s < best) {
          best = s;
          best_i = i;
        }
      }
    } else {
      for (std::size_t i = 0; i < m; ++i, c += dim_) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
          const double diff = x[k] - c[k];
          s += diff * diff;
        }
        if (s < best) {
          best = s;
          best_i = i;
        }
      }
    }
    return best < radii_sq_[best_i] ? static_cast<std::int32_t>(best_i) : kUnassigned;
  }

  bool operator==(const Partitioning&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> centers_;         // psi * dim
  std::vector<double> radii_sq_;        // psi
  std::vector<std::uint64_t> sources_;  // stream indices, pairwise distinct
};

using PartitionEnsemble = std::vector<Partitioning>;

// Draws psi window positions uniformly without replacement and builds the
// partitioning. Requires 2 <= psi <= window size.
Partitioning build_partitioning(const PointsView& window, std::uint32_t psi, Rng& rng);

// Nearest-co-sample Euclidean distance per point. Requires >= 2 points.
std::vector<double> compute_radii(const PointsView& points);

// Free-function form of Partitioning::assign with dimension checking.
std::int32_t assign_slot(std::span<const double> x, const Partitioning& p);

}  // namespace idks
