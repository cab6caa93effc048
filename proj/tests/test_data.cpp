#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "idks/data.hpp"
#include "idks/eval.hpp"

using namespace idks;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "idks_test_tmp_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_csv: two rows, headerless, label last") {
  TempFile f("0.0,0.0,0\n1.0,1.0,1\n");
  CsvOptions opts;
  opts.has_header = false;
  const auto ds = load_csv(f.path, opts);
  CHECK(ds.size() == 2);
  CHECK(ds.d == 2);
  CHECK(ds.point(0)[0] == 0.0);
  CHECK(ds.point(1)[1] == 1.0);
  CHECK(ds.label(0) == 0);
  CHECK(ds.label(1) == 1);
}

TEST_CASE("load_csv: label column by header name") {
  TempFile f("y,a,b\n1,0.5,2.5\n0,1.5,3.5\n");
  CsvOptions opts;
  opts.label_name = "y";
  const auto ds = load_csv(f.path, opts);
  CHECK(ds.d == 2);
  CHECK(ds.label(0) == 1);
  CHECK(ds.point(0)[0] == 0.5);
  CHECK(ds.point(1)[1] == 3.5);
}

TEST_CASE("load_csv: min-max normalization fitted on the first window") {
  TempFile f("f,label\n0,0\n4,0\n2,1\n8,0\n");
  CsvOptions opts;
  opts.normalize = Normalize::kMinMaxFirstWindow;
  opts.first_window = 2;  // fit on values {0, 4}
  const auto ds = load_csv(f.path, opts);
  CHECK(ds.point(0)[0] == 0.0);
  CHECK(ds.point(1)[0] == 1.0);
  CHECK(ds.point(2)[0] == 0.5);
  CHECK(ds.point(3)[0] == 2.0);  // applied globally, beyond the fit range
}

TEST_CASE("load_csv: min-max maps constant features to zero") {
  TempFile f("a,b,label\n3,1,0\n3,2,1\n");
  CsvOptions opts;
  opts.normalize = Normalize::kMinMaxFirstWindow;
  const auto ds = load_csv(f.path, opts);
  CHECK(ds.point(0)[0] == 0.0);
  CHECK(ds.point(1)[0] == 0.0);
}

TEST_CASE("load_csv: NaN cell is rejected with row and column") {
  TempFile f("a,label\n1.0,0\nnan,1\n");
  CHECK_THROWS_WITH_AS(load_csv(f.path), "row 3, column 1: non-finite value 'nan'", IngestError);
}

TEST_CASE("load_csv: unparseable and non-binary cells are rejected") {
  {
    TempFile f("a,label\nfoo,0\n");
    CHECK_THROWS_AS(load_csv(f.path), IngestError);
  }
  {
    TempFile f("a,label\n1.0,2\n");
    CHECK_THROWS_AS(load_csv(f.path), IngestError);
  }
  CHECK_THROWS_AS(load_csv("does_not_exist.csv"), IngestError);
}

TEST_CASE("write_csv round-trips through load_csv") {
  TwoClusterSpec spec;
  spec.n = 500;
  spec.seed = 4;
  const auto ds = gen_two_cluster(spec);

  TempFile f("");
  write_csv(ds, f.path);
  const auto loaded = load_csv(f.path);
  REQUIRE(loaded.size() == ds.size());
  CHECK(loaded.d == ds.d);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(loaded.label(i) == ds.label(i));
    for (std::size_t k = 0; k < ds.d; ++k)
      CHECK(loaded.point(i)[k] == ds.point(i)[k]);  // shortest round-trip formatting
  }
}

TEST_CASE("shuffle_dataset: deterministic, multiset-preserving") {
  TwoClusterSpec spec;
  spec.n = 200;
  spec.seed = 8;
  const auto ds = gen_two_cluster(spec);
  const auto a = shuffle_dataset(ds, 5);
  const auto b = shuffle_dataset(ds, 5);
  CHECK(a.xs == b.xs);
  CHECK(a.labels == b.labels);

  auto key = [](const LabeledDataset& d) {
    std::multiset<std::pair<double, int>> s;
    for (std::size_t i = 0; i < d.size(); ++i) s.insert({d.point(i)[0], d.label(i)});
    return s;
  };
  CHECK(key(a) == key(ds));
  CHECK(shuffle_dataset(ds, 6).xs != a.xs);
}

TEST_CASE("shuffle_dataset: all 6 orders of a 3-row dataset are equally likely") {
  LabeledDataset ds;
  ds.d = 1;
  ds.xs = {1.0, 2.0, 3.0};
  ds.labels = {0, 0, 1};

  std::map<std::string, int> counts;
  const int trials = 60000;
  for (int i = 0; i < trials; ++i) {
    const auto s = shuffle_dataset(ds, 1000 + i);
    std::string k;
    for (std::size_t r = 0; r < 3; ++r) k += std::to_string(int(s.point(r)[0]));
    ++counts[k];
  }
  REQUIRE(counts.size() == 6);
  double chi2 = 0.0;
  const double expected = trials / 6.0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi_square_p_value(chi2, 5) > 0.001);
}

TEST_CASE("gen_two_cluster: zero anomaly rate gives an all-normal stream") {
  TwoClusterSpec bad;
  bad.n = 10;
  bad.anomaly_rate = 0.5;
  CHECK_THROWS_AS(gen_two_cluster(bad), ParameterError);

  TwoClusterSpec spec;
  spec.n = 20000;
  spec.anomaly_rate = 0.0;
  spec.seed = 2;
  const auto ds = gen_two_cluster(spec);
  std::size_t anomalies = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) anomalies += ds.label(i);
  CHECK(anomalies == 0);

  // every normal point lies within 6 sigma of one of the drifting centers
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(ds.size());
    bool near = false;
    for (const auto& c : {two_cluster_default_center_a(u), two_cluster_default_center_b(u)}) {
      const double dx = ds.point(i)[0] - c[0], dy = ds.point(i)[1] - c[1];
      near |= std::sqrt(dx * dx + dy * dy) <= 6.0 * spec.cluster_sigma;
    }
    CHECK(near);
  }
}

TEST_CASE("gen_two_cluster: anomaly count is binomial around rate * n") {
  TwoClusterSpec spec;
  spec.n = 1000000;
  spec.anomaly_rate = 0.05;
  spec.seed = 3;
  const auto ds = gen_two_cluster(spec);
  std::size_t anomalies = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) anomalies += ds.label(i);
  const double mean = 0.05 * 1e6;
  const double sigma3 = 3.0 * std::sqrt(1e6 * 0.05 * 0.95);
  CHECK(std::abs(static_cast<double>(anomalies) - mean) <= sigma3);
}

TEST_CASE("gen_two_cluster: frozen centers give a stationary mixture around the midpoint") {
  TwoClusterSpec spec;
  spec.n = 100000;
  spec.seed = 9;
  spec.center_a = [](double) { return std::array<double, 2>{8.0, 10.0}; };
  spec.center_b = [](double) { return std::array<double, 2>{12.0, 10.0}; };
  const auto ds = gen_two_cluster(spec);

  double sx = 0.0, sy = 0.0;
  std::size_t n0 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.label(i) != 0) continue;
    sx += ds.point(i)[0];
    sy += ds.point(i)[1];
    ++n0;
  }
  const double mx = sx / n0, my = sy / n0;
  // per-coordinate mixture stddev: sqrt(sigma^2 + separation^2/4) = sqrt(0.25 + 4)
  const double se_x = 3.0 * std::sqrt(0.25 + 4.0) / std::sqrt(static_cast<double>(n0));
  const double se_y = 3.0 * std::sqrt(0.25) / std::sqrt(static_cast<double>(n0));
  CHECK(std::abs(mx - 10.0) <= se_x);
  CHECK(std::abs(my - 10.0) <= se_y);
}

TEST_CASE("gen_two_cluster: bounds must contain the inflated drift paths") {
  TwoClusterSpec spec;
  spec.n = 10;
  spec.bounds_hi = {20.0, 15.0};  // upper arc reaches y=17, violates
  CHECK_THROWS_AS(gen_two_cluster(spec), ParameterError);
}

TEST_CASE("gen_two_cluster: deterministic under seed, stream order preserved") {
  TwoClusterSpec spec;
  spec.n = 2000;
  spec.seed = 12;
  const auto a = gen_two_cluster(spec);
  const auto b = gen_two_cluster(spec);
  CHECK(a.xs == b.xs);
  CHECK(a.labels == b.labels);
}
