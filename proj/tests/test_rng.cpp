#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "idks/eval.hpp"
#include "idks/rng.hpp"

using namespace idks;

TEST_CASE("below is exactly bounded and deterministic") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t n = 1 + (i % 17);
    const std::uint64_t v = a.below(n);
    CHECK(v < n);
    CHECK(v == b.below(n));
  }
  CHECK_THROWS_AS(a.below(0), ParameterError);
}

TEST_CASE("below(n) is uniform (chi-square over n=7)") {
  Rng rng(7);
  std::vector<std::uint64_t> counts(7, 0);
  const int trials = 70000;
  for (int i = 0; i < trials; ++i) ++counts[rng.below(7)];
  double chi2 = 0.0;
  const double expected = trials / 7.0;
  for (auto c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi_square_p_value(chi2, 6) > 0.001);
}

TEST_CASE("sample_positions draws ascending distinct positions") {
  Rng rng(3);
  std::vector<std::uint64_t> out;
  for (int rep = 0; rep < 200; ++rep) {
    rng.sample_positions(20, 5, out);
    REQUIRE(out.size() == 5);
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1] < out[i]);
    CHECK(out.back() < 20);
  }
  rng.sample_positions(4, 4, out);
  CHECK(out == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(rng.sample_positions(3, 4, out), ParameterError);
}

TEST_CASE("sample_positions is uniform over subsets") {
  // C(5, 2) = 10 subsets
  Rng rng(11);
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> counts;
  std::vector<std::uint64_t> out;
  const int trials = 50000;
  for (int i = 0; i < trials; ++i) {
    rng.sample_positions(5, 2, out);
    ++counts[{out[0], out[1]}];
  }
  REQUIRE(counts.size() == 10);
  double chi2 = 0.0;
  const double expected = trials / 10.0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi_square_p_value(chi2, 9) > 0.001);
}

TEST_CASE("normal draws have the requested moments") {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(3.0, 2.0);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.02));
  CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("split_seed decorrelates streams") {
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 0) != split_seed(2, 0));
  CHECK(split_seed(1, 5) == split_seed(1, 5));
}
