#include "idks/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "idks/errors.hpp"

namespace idks {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  double v = 0.0;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw IngestError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                      ": cannot parse '" + cell + "' as a real number");
  if (!std::isfinite(v))
    throw IngestError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                      ": non-finite value '" + cell + "'");
  return v;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");

  std::string line;
  std::size_t row = 0;
  std::size_t n_cols = 0;
  std::size_t label_col = 0;
  bool label_resolved = false;

  if (opts.has_header) {
    if (!std::getline(in, line)) throw IngestError("'" + path + "': empty file");
    ++row;
    const auto header = split_csv_line(line);
    n_cols = header.size();
    if (!opts.label_name.empty()) {
      bool found = false;
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == opts.label_name) {
          label_col = c;
          found = true;
          break;
        }
      }
      if (!found)
        throw IngestError("'" + path + "': no column named '" + opts.label_name + "' in header");
      label_resolved = true;
    }
  } else if (!opts.label_name.empty()) {
    throw ParameterError("load_csv: label column by name requires a header");
  }

  LabeledDataset ds;
  ds.name = path;

  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (n_cols == 0) n_cols = cells.size();
    if (cells.size() != n_cols)
      throw IngestError("row " + std::to_string(row) + ": expected " + std::to_string(n_cols) +
                        " cells, got " + std::to_string(cells.size()));
    if (!label_resolved) {
      if (opts.label_index >= 0) {
        if (static_cast<std::size_t>(opts.label_index) >= n_cols)
          throw ParameterError("load_csv: label column index out of range");
        label_col = static_cast<std::size_t>(opts.label_index);
      } else {
        label_col = n_cols - 1;
      }
      label_resolved = true;
    }
    if (n_cols < 2)
      throw IngestError("row " + std::to_string(row) + ": need at least one feature column");
    if (ds.d == 0) ds.d = n_cols - 1;

    for (std::size_t c = 0; c < n_cols; ++c) {
      const double v = parse_cell(cells[c], row, c + 1);
      if (c == label_col) {
        if (v != 0.0 && v != 1.0)
          throw IngestError("row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                            ": label must be 0 or 1, got '" + cells[c] + "'");
        ds.labels.push_back(static_cast<std::int8_t>(v));
      } else {
        ds.xs.push_back(v);
      }
    }
  }
  if (ds.size() == 0) throw IngestError("'" + path + "': no data rows");

  if (opts.normalize == Normalize::kMinMaxFirstWindow) {
    const std::size_t fit_rows = std::min(opts.first_window, ds.size());
    std::vector<double> lo(ds.d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(ds.d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < fit_rows; ++i)
      for (std::size_t k = 0; k < ds.d; ++k) {
        lo[k] = std::min(lo[k], ds.xs[i * ds.d + k]);
        hi[k] = std::max(hi[k], ds.xs[i * ds.d + k]);
      }
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t k = 0; k < ds.d; ++k) {
        double& v = ds.xs[i * ds.d + k];
        v = hi[k] > lo[k] ? (v - lo[k]) / (hi[k] - lo[k]) : 0.0;
      }
  }
  return ds;
}

void write_csv(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot open '" + path + "' for writing");
  for (std::size_t k = 0; k < ds.d; ++k) out << "f" << k << ",";
  out << "label\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t k = 0; k < ds.d; ++k) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), ds.xs[i * ds.d + k]);
      out.write(buf, res.ptr - buf);
      out.put(',');
    }
    out << int(ds.labels[i]) << '\n';
  }
  if (!out) throw IngestError("write failure on '" + path + "'");
}

LabeledDataset shuffle_dataset(const LabeledDataset& ds, std::uint64_t seed) {
  if (ds.size() == 0) throw ParameterError("shuffle_dataset: empty dataset");
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle_indices(order);

  LabeledDataset out;
  out.name = ds.name;
  out.d = ds.d;
  out.xs.resize(ds.xs.size());
  out.labels.resize(ds.labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double* src = ds.xs.data() + order[i] * ds.d;
    std::copy(src, src + ds.d, out.xs.begin() + i * ds.d);
    out.labels[i] = ds.labels[order[i]];
  }
  return out;
}

// Default drift: the two centers sit on opposite sides of a midpoint that
// sweeps across the box with a slow vertical swing, while the pair revolves
// around it. Per-instance motion is tiny (gradual drift), but over one window
// the pair turns far enough that a model stuck on stale samples loses
// accuracy, which is the regime this stream is meant to exercise.
std::array<double, 2> two_cluster_default_center_a(double u) {
  const double mx = 4.0 + 12.0 * u;
  const double my = 10.0 + 5.0 * std::sin(6.0 * M_PI * u);
  const double th = 64.0 * M_PI * u;
  return {mx + 1.2 * std::cos(th), my + 1.2 * std::sin(th)};
}

std::array<double, 2> two_cluster_default_center_b(double u) {
  const double mx = 4.0 + 12.0 * u;
  const double my = 10.0 + 5.0 * std::sin(6.0 * M_PI * u);
  const double th = 64.0 * M_PI * u;
  return {mx - 1.2 * std::cos(th), my - 1.2 * std::sin(th)};
}

void TwoClusterSpec::validate() const {
  if (n == 0) throw ParameterError("two-cluster: n must be positive");
  if (!(anomaly_rate >= 0.0 && anomaly_rate < 0.5))
    throw ParameterError("two-cluster: anomaly_rate must lie in [0, 0.5)");
  if (!(cluster_sigma > 0.0)) throw ParameterError("two-cluster: cluster_sigma must be positive");
  for (int k = 0; k < 2; ++k)
    if (!(bounds_lo[k] < bounds_hi[k]))
      throw ParameterError("two-cluster: bounds box is empty");

  const auto ca = center_a ? center_a : two_cluster_default_center_a;
  const auto cb = center_b ? center_b : two_cluster_default_center_b;
  const double margin = 3.0 * cluster_sigma;
  // grid fine enough that fast paths cannot slip an excursion between samples
  for (int i = 0; i <= 20000; ++i) {
    const double u = i / 20000.0;
    for (const auto& c : {ca(u), cb(u)}) {
      for (int k = 0; k < 2; ++k) {
        if (c[k] - margin < bounds_lo[k] || c[k] + margin > bounds_hi[k])
          throw ParameterError(
              "two-cluster: drift path inflated by 3*cluster_sigma leaves the bounds box");
      }
    }
  }
}

LabeledDataset gen_two_cluster(const TwoClusterSpec& spec) {
  spec.validate();
  const auto ca = spec.center_a ? spec.center_a : two_cluster_default_center_a;
  const auto cb = spec.center_b ? spec.center_b : two_cluster_default_center_b;

  LabeledDataset ds;
  ds.name = "two-cluster";
  ds.d = 2;
  ds.xs.reserve(spec.n * 2);
  ds.labels.reserve(spec.n);

  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(spec.n);
    if (rng.uniform01() < spec.anomaly_rate) {
      for (int k = 0; k < 2; ++k)
        ds.xs.push_back(rng.uniform(spec.bounds_lo[k], spec.bounds_hi[k]));
      ds.labels.push_back(1);
    } else {
      const auto c = rng.below(2) == 0 ? ca(u) : cb(u);
      for (int k = 0; k < 2; ++k) ds.xs.push_back(rng.normal(c[k], spec.cluster_sigma));
      ds.labels.push_back(0);
    }
  }
  return ds;
}

}  // namespace idks
