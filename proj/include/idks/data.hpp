#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idks/partition.hpp"
#include "idks/rng.hpp"

namespace idks {

// Ordered labeled instances in flat row-major storage. Label 1 = anomaly.
struct LabeledDataset {
  std::string name;
  std::size_t d = 0;
  std::vector<double> xs;           // size() * d
  std::vector<std::int8_t> labels;  // 0 or 1

  std::size_t size() const { return labels.size(); }
  std::span<const double> point(std::size_t i) const { return {xs.data() + i * d, d}; }
  std::int8_t label(std::size_t i) const { return labels[i]; }

  // View over rows [pos, pos + count); row stream indices start at pos.
  PointsView view(std::size_t pos, std::size_t count) const {
    return {xs.data() + pos * d, count, d, pos};
  }
  PointsView view_all() const { return view(0, size()); }
};

enum class Normalize { kNone, kMinMaxFirstWindow };

struct CsvOptions {
  bool has_header = true;
  // label column by name (requires header) or by index; empty name and
  // negative index = last column.
  std::string label_name;
  int label_index = -1;
  Normalize normalize = Normalize::kNone;
  std::size_t first_window = 2048;  // fit range for min-max normalization
};

// Loads features-plus-label CSV in file order. Feature cells must parse to
// finite reals and the label to 0/1; violations raise IngestError naming the
// 1-based row and column. Min-max normalization, when requested, is fitted on
// the first first_window rows and applied to all rows (constant-range
// features map to 0).
LabeledDataset load_csv(const std::string& path, const CsvOptions& opts = {});

void write_csv(const LabeledDataset& ds, const std::string& path);

// Uniform random permutation of rows (Fisher-Yates), point-label pairs intact.
LabeledDataset shuffle_dataset(const LabeledDataset& ds, std::uint64_t seed);

// Synthetic gradual-drift stream: two Gaussian clusters whose centers travel
// along smooth paths over the stream, plus uniform box anomalies.
std::array<double, 2> two_cluster_default_center_a(double u);
std::array<double, 2> two_cluster_default_center_b(double u);

struct TwoClusterSpec {
  std::size_t n = 0;
  double anomaly_rate = 0.05;
  double cluster_sigma = 0.9;
  std::array<double, 2> bounds_lo{0.0, 0.0};
  std::array<double, 2> bounds_hi{20.0, 20.0};
  std::uint64_t seed = 0;
  // cluster centers at normalized stream time u in [0, 1); empty = defaults above
  std::function<std::array<double, 2>(double)> center_a;
  std::function<std::array<double, 2>(double)> center_b;

  // throws ParameterError unless 0 < anomaly_rate < 0.5 and both paths,
  // inflated by 3 * cluster_sigma, stay inside the bounds
  void validate() const;
};

LabeledDataset gen_two_cluster(const TwoClusterSpec& spec);

}  // namespace idks
