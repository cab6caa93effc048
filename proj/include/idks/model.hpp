#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "idks/partition.hpp"
#include "idks/rng.hpp"

namespace idks {

enum class ReplacementPolicy {
  kUniform,     // uniform without replacement from the arrived batch
  kNewestOnly,  // deliberately broken: always the newest arrivals (negative control)
};

struct UpdateStats {
  std::uint32_t replaced_samples = 0;
  std::uint32_t affected_partitionings = 0;
  double seconds = 0.0;
};

// The detector model over one data window: t hypersphere partitionings, the
// per-instance assignment matrix (compact feature map, one optional slot per
// partitioning) and the integer running sum of feature vectors. The window and
// the assignment matrix are ring buffers so that sliding never moves memory;
// the matrix is stored column-major (per partitioning) so both full-column
// reassignments and batch row edits touch contiguous ranges.
class Model {
 public:
  Model() = default;

  // Builds t independent partitionings on the window and populates
  // assignments and counts for every row. Requires window size >= psi >= 2,
  // t >= 1.
  static Model init(const PointsView& window, std::uint32_t psi, std::uint32_t t, Rng& rng);

  // Same, but with every partitioning's sample rows pinned (slot order = list
  // order). sources[j] holds partitioning j's sample stream indices, which
  // must lie inside the window.
  static Model init_pinned(const PointsView& window,
                           const std::vector<std::vector<std::uint64_t>>& sources);

  std::size_t dim() const { return d_; }
  std::size_t window_size() const { return omega_; }
  std::uint32_t psi() const { return psi_; }
  std::uint32_t t() const { return t_; }
  std::uint64_t window_start() const { return window_start_; }
  const PartitionEnsemble& ensemble() const { return parts_; }

  // Normal score of an arbitrary point: (1/t) * sum_j counts[j][assign_j] / omega.
  // Integer sum, single division; in [0, 1].
  double score(std::span<const double> x) const;

  // Normal score of a live window row via the stored assignment matrix;
  // agrees exactly with score() on that row's point.
  double score_row(std::size_t row) const;

  // logical accessors (row 0 = oldest window instance)
  std::span<const double> window_point(std::size_t row) const {
    return {points_.data() + phys(row) * d_, d_};
  }
  std::int32_t assignment(std::size_t row, std::size_t j) const {
    return entries_[j * omega_ + phys(row)];
  }
  std::uint32_t count(std::size_t j, std::size_t slot) const { return counts_[j * psi_ + slot]; }
  std::span<const std::uint32_t> counts() const { return counts_; }

  // Window contents in logical order (oldest first), flat row-major.
  std::vector<double> window_copy() const;

  // Recomputes the count table from the assignment matrix; equality with
  // counts() is the running-sum consistency check.
  std::vector<std::uint32_t> recount() const;

  // Full recomputation of one partitioning's assignment column plus count
  // deltas; used when the partitioning's sample set changed.
  void reassign_column(std::size_t j);

  // Logical-content equality (ring rotation does not matter).
  friend bool equivalent(const Model& a, const Model& b);

  friend UpdateStats update_incremental(Model& m, const PointsView& arrived, Rng& rng,
                                        ReplacementPolicy policy);
  friend class Snapshot;

 private:
  std::size_t phys(std::size_t row) const {
    const std::size_t p = base_ + row;
    return p < omega_ ? p : p - omega_;
  }
  void populate(const PointsView& window);

  std::size_t d_ = 0;
  std::size_t omega_ = 0;
  std::uint32_t psi_ = 0;
  std::uint32_t t_ = 0;
  std::uint64_t window_start_ = 0;
  std::size_t base_ = 0;                 // physical row of the oldest instance
  std::vector<double> points_;           // omega * d, ring by row
  PartitionEnsemble parts_;              // t partitionings
  std::vector<std::int32_t> entries_;    // t * omega, column-major, ring rows
  std::vector<std::uint32_t> counts_;    // t * psi

  // scratch for updates (no steady-state allocation)
  std::vector<std::uint32_t> expired_scratch_;
  std::vector<std::uint64_t> draw_scratch_;
  std::vector<std::size_t> phys_scratch_;
};

// Distributional similarity of two point sets under the ensemble:
// (1/t) <mean feature map of X, mean feature map of Y>, in [0, 1].
double idk_similarity(const PointsView& x, const PointsView& y, const PartitionEnsemble& ensemble);

}  // namespace idks
