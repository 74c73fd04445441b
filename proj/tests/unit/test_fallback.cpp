#include "screentrex/error.hpp"
#include "screentrex/fallback.hpp"
#include "screentrex/screen.hpp"
#include "screentrex/simbench.hpp"
#include "support/test_data.hpp"

#include <doctest.h>

#include <algorithm>

using namespace strex;

namespace {

StandardizedDataset sim(std::size_t n, std::size_t p, std::size_t p1, double snr, std::uint64_t seed,
                        std::vector<std::size_t>* support = nullptr) {
  SimSpec s;
  s.n = n;
  s.p = p;
  s.p1 = p1;
  s.snr = snr;
  s.seed = seed;
  auto truth = simulate(s);
  if (support) *support = truth.support;
  return standardize(truth.dataset);
}

}  // namespace

TEST_SUITE("fallback") {

TEST_CASE("budget") {
  CHECK(fallback_t_max(0.1, 1000) == 10);
  CHECK(fallback_t_max(0.1, 20) == 2);
  CHECK(fallback_t_max(0.1, 100) == 5);
  CHECK(fallback_t_max(1.0, 5) == 3);
}

TEST_CASE("deflated occurrences by hand") {
  // p = 3, L = 3, K = 2. T = 1: variable 0 in both sets, nothing else.
  // Expected nulls (3 - 1) / 3 among 1 fresh inclusion -> keep 1/3.
  // T = 2: variable 1 joins one set: fresh 0.5, expected nulls (3 - 1.5) / 2 = 0.75
  // -> keep is negative, clamped contribution.
  const std::vector<std::vector<std::size_t>> counts{{2, 0, 0}, {2, 1, 0}};
  const auto d = deflated_occurrences(counts, 2, 3);
  REQUIRE(d.size() == 2);
  CHECK(d[0](0) == doctest::Approx(1.0 / 3.0));
  CHECK(d[0](1) == 0.0);
  CHECK(d[1](0) == doctest::Approx(1.0 / 3.0));
  CHECK(d[1](1) == 0.0);
  const std::vector<std::size_t> sel{0};
  CHECK(fallback_fdr_estimate(d[0], sel) == doctest::Approx(2.0 / 3.0));
  CHECK(fallback_fdr_estimate(d[0], std::vector<std::size_t>{}) == 0.0);
}

TEST_CASE("votes are monotone in T") {
  const auto s = sim(80, 60, 4, 2.0, 3);
  const auto res = calibrate_trex(s, 0.2, ExperimentPlan::screen(s.p(), 11));
  REQUIRE(res.counts_by_t.size() == fallback_t_max(0.2, 60));
  for (std::size_t t = 1; t < res.counts_by_t.size(); ++t)
    for (std::size_t j = 0; j < s.p(); ++j) CHECK(res.counts_by_t[t][j] >= res.counts_by_t[t - 1][j]);
}

TEST_CASE("alpha = 1 contains the ordinary screen selection") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = sim(80, 60, 4, 1.0, seed);
    const auto plan = ExperimentPlan::screen(s.p(), seed);
    const auto ordinary = select_ordinary(aggregate(run_experiments(s, plan)));
    const auto res = calibrate_trex(s, 1.0, plan);
    CHECK(res.feasible);
    for (std::size_t j : ordinary.selected)
      CHECK(std::binary_search(res.selected.begin(), res.selected.end(), j));
  }
}

TEST_CASE("result invariants and alpha monotonicity") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto s = sim(100, 80, 5, 2.0, seed * 3);
    const auto plan = ExperimentPlan::screen(s.p(), seed);
    std::size_t prev = s.p() + 1;
    for (double alpha : {0.5, 0.2, 0.1, 0.05}) {
      const auto res = calibrate_trex(s, alpha, plan);
      if (!res.selected.empty()) CHECK(res.fdr_estimate <= alpha);
      if (!res.feasible) {
        CHECK(res.selected.empty());
        prev = 0;
        continue;
      }
      const auto& counts = res.counts_by_t[res.t_star - 1];
      for (std::size_t j = 0; j < s.p(); ++j) {
        const bool in = std::binary_search(res.selected.begin(), res.selected.end(), j);
        CHECK(in == (static_cast<double>(counts[j]) / 20.0 > res.v_star));
      }
      // A smaller target never enlarges the selection.
      CHECK(res.selected.size() <= prev);
      prev = res.selected.size();
    }
  }
}

TEST_CASE("pure noise: discoveries are rare at alpha = 0.1") {
  // Every discovery is false, so mean FDP = P(any selection).
  double fdp = 0.0, fdp2 = 0.0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const auto s = sim(40, 30, 0, 1.0, 1000 + rep);
    const auto res = calibrate_trex(s, 0.1, ExperimentPlan::screen(s.p(), rep));
    const double v = res.selected.empty() ? 0.0 : 1.0;
    fdp += v;
    fdp2 += v * v;
  }
  const double mean = fdp / reps;
  const double se = std::sqrt((fdp2 / reps - mean * mean) * reps / (reps - 1.0)) / std::sqrt(double(reps));
  CHECK(mean <= 0.1 + 2.0 * se);
}

TEST_CASE("argument errors") {
  const auto s = sim(30, 10, 2, 1.0, 1);
  CHECK_THROWS_AS(calibrate_trex(s, 0.0, ExperimentPlan::screen(10, 1)), Error);
  CHECK_THROWS_AS(calibrate_trex(s, 0.1, ExperimentPlan{20, 5, 1, 1}), Error);
}

}  // TEST_SUITE
