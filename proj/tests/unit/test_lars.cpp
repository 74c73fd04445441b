#include "screentrex/error.hpp"
#include "screentrex/lars.hpp"
#include "support/reference_lars.hpp"
#include "support/test_data.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace strex;

namespace {

// Zero-mean, unit-norm, mutually orthogonal columns in R^4.
Eigen::MatrixXd hadamard3() {
  Eigen::MatrixXd h(4, 3);
  h << 1, 1, 1,
       1, -1, -1,
       -1, 1, -1,
       -1, -1, 1;
  return h / 2.0;
}

}  // namespace

TEST_SUITE("lars") {

TEST_CASE("orthogonal design enters in order of |x'y|") {
  const Eigen::MatrixXd x = hadamard3();
  const Eigen::VectorXd y = 2.0 * x.col(0) + 3.0 * x.col(1) - 1.0 * x.col(2);
  // Oracle: sort columns by |x_j' y| descending.
  const Eigen::VectorXd xty = x.transpose() * y;
  std::vector<std::size_t> expected(3);
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  std::stable_sort(expected.begin(), expected.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(xty(a)) > std::abs(xty(b)); });
  const PathResult r = lars_path(x, y, PathConfig{10, 3, 0});
  CHECK(r.entry_order == expected);
  CHECK(r.entry_order.front() == 1);
  CHECK_FALSE(r.terminated_early);
  // Full least squares on an orthonormal design recovers the coefficients.
  CHECK(r.coefficients(0) == doctest::Approx(2.0));
  CHECK(r.coefficients(1) == doctest::Approx(3.0));
  CHECK(r.coefficients(2) == doctest::Approx(-1.0));
}

TEST_CASE("dummy entering first terminates with a nonzero dummy coefficient") {
  const Eigen::MatrixXd x = hadamard3();
  // Column 2 is the dummy and is the most correlated with y.
  const Eigen::VectorXd y = 0.5 * x.col(0) + 0.2 * x.col(1) + 3.0 * x.col(2);
  const PathResult r = lars_path(x, y, PathConfig{1, 2, 0});
  REQUIRE(r.entry_order == std::vector<std::size_t>{2});
  CHECK(r.dummies_included == 1);
  CHECK(r.terminated_early);
  CHECK(r.coefficients(2) != 0.0);
  CHECK(r.coefficients(0) == 0.0);
  CHECK(r.coefficients(1) == 0.0);
}

TEST_CASE("exact fit exhausts the path and reproduces least squares") {
  Eigen::MatrixXd x = testdata::gaussian(5, 2, 11);
  standardize_columns(x);
  const Eigen::VectorXd y = x.col(0);
  const PathResult r = lars_path(x, y, PathConfig{100, 2, 0});
  CHECK_FALSE(r.terminated_early);
  // Oracle: closed-form least squares on the active columns.
  Eigen::MatrixXd xa(5, static_cast<Eigen::Index>(r.entry_order.size()));
  for (std::size_t k = 0; k < r.entry_order.size(); ++k)
    xa.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(r.entry_order[k]));
  const Eigen::VectorXd ls = xa.colPivHouseholderQr().solve(y);
  for (std::size_t k = 0; k < r.entry_order.size(); ++k)
    CHECK(std::abs(r.coefficients(static_cast<Eigen::Index>(r.entry_order[k])) - ls(static_cast<Eigen::Index>(k))) <= 1e-8);
  CHECK(std::abs(r.coefficients(0) - 1.0) <= 1e-8);
}

TEST_CASE("first knot correlations equal x'y") {
  const auto pr = testdata::random_problem(8, 5, 3);
  const LarsPath path(pr.x, pr.y, PathConfig{5, 5, 0});
  const Eigen::VectorXd c = knot_correlations(path);
  CHECK((c - pr.x.transpose() * pr.y).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("equal-correlation property at every knot") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto pr = testdata::random_problem(30, 12, seed);
    LarsPath path(pr.x, pr.y, PathConfig{100, 12, 0});
    std::size_t prev_active = path.active().size();
    while (!path.finished()) {
      path.step();
      // Monotone: variables are never dropped.
      CHECK(path.active().size() >= prev_active);
      prev_active = path.active().size();
      const Eigen::VectorXd c = knot_correlations(path);
      const double cmax = c.cwiseAbs().maxCoeff();
      std::set<std::size_t> act(path.active().begin(), path.active().end());
      if (path.finished()) break;
      for (std::size_t j : act) CHECK(std::abs(std::abs(c(static_cast<Eigen::Index>(j))) - cmax) <= 1e-8);
    }
  }
}

TEST_CASE("full-rank square exhaustion leaves zero correlations") {
  // n - 1 = m after centering: the exhausted path interpolates.
  const auto pr = testdata::random_problem(7, 6, 5);
  LarsPath path(pr.x, pr.y, PathConfig{100, 6, 0});
  while (!path.finished()) path.step();
  CHECK(path.active().size() == 6);
  CHECK(knot_correlations(path).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("agreement with textbook reference on small instances") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    strex::CounterRng pick(seed * 31);
    const std::size_t n = 4 + pick.below(5);          // 4..8
    const std::size_t m = 2 + pick.below(5);          // 2..6
    const std::size_t dummy_start = 1 + pick.below(m);
    const std::size_t t_stop = 1 + pick.below(2);
    const auto pr = testdata::random_problem(n, m, seed);
    const PathResult got = lars_path(pr.x, pr.y, PathConfig{t_stop, dummy_start, 0});
    const auto ref = oracle::reference_lars(pr.x, pr.y, t_stop, dummy_start);
    CHECK(got.entry_order == ref.order);
    CHECK(got.terminated_early == ref.quota);
    CHECK((got.coefficients - ref.beta).cwiseAbs().maxCoeff() <= 1e-8);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("path result invariants") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto pr = testdata::random_problem(20, 16, seed);
    const std::size_t t_stop = 1 + seed % 3;
    const PathResult r = lars_path(pr.x, pr.y, PathConfig{t_stop, 8, 0});
    std::set<std::size_t> uniq(r.entry_order.begin(), r.entry_order.end());
    CHECK(uniq.size() == r.entry_order.size());
    const auto dummies = std::count_if(r.entry_order.begin(), r.entry_order.end(),
                                       [](std::size_t j) { return j >= 8; });
    CHECK(static_cast<std::size_t>(dummies) == r.dummies_included);
    CHECK(r.dummies_included <= t_stop);
    for (Eigen::Index j = 0; j < r.coefficients.size(); ++j)
      if (!uniq.count(static_cast<std::size_t>(j))) CHECK(r.coefficients(j) == 0.0);
    if (r.terminated_early) CHECK(r.coefficients(static_cast<Eigen::Index>(r.entry_order.back())) != 0.0);
  }
}

TEST_CASE("deterministic") {
  const auto pr = testdata::random_problem(40, 30, 9);
  const PathResult a = lars_path(pr.x, pr.y, PathConfig{2, 15, 0});
  const PathResult b = lars_path(pr.x, pr.y, PathConfig{2, 15, 0});
  CHECK(a.entry_order == b.entry_order);
  CHECK(a.coefficients == b.coefficients);
}

TEST_CASE("ties go to the lowest column index") {
  Eigen::MatrixXd x(4, 3);
  x.col(0) = hadamard3().col(0);
  x.col(1) = hadamard3().col(1);
  x.col(2) = hadamard3().col(2);
  const Eigen::VectorXd y = x.col(0) + x.col(1) + 0.5 * x.col(2);
  const PathResult r = lars_path(x, y, PathConfig{5, 3, 0});
  CHECK(r.entry_order.front() == 0);
}

TEST_CASE("contract errors") {
  Eigen::MatrixXd raw = testdata::gaussian(6, 3, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
  y(0) = 1;
  y(1) = -1;
  try {
    lars_path(raw, y, PathConfig{1, 3, 0});
    FAIL("expected contract error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotStandardized);
  }

  Eigen::MatrixXd dup = testdata::gaussian(6, 2, 2);
  standardize_columns(dup);
  CHECK_THROWS_AS(lars_path(dup, dup.col(0), PathConfig{0, 2, 0}), Error);
}

TEST_CASE("duplicated column never joins its twin") {
  // A duplicate moves in lockstep with its active copy and is never a candidate.
  Eigen::MatrixXd base = testdata::gaussian(8, 3, 4);
  standardize_columns(base);
  Eigen::MatrixXd x(8, 4);
  x << base, base.col(0);
  const Eigen::VectorXd y = 2.0 * x.col(0) + 0.5 * x.col(1) - 0.25 * x.col(2);
  const PathResult r = lars_path(x, y, PathConfig{10, 4, 0});
  CHECK(std::count(r.entry_order.begin(), r.entry_order.end(), 3u) == 0);
  CHECK(r.coefficients(3) == 0.0);
}

TEST_CASE("wide design with copied columns runs to its quota") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Eigen::MatrixXd base = testdata::gaussian(40, 30, seed);
    standardize_columns(base);
    Eigen::MatrixXd x(40, 60);
    x << base, base;  // the second half copies the first
    const Eigen::VectorXd y = x.col(3) - 0.7 * x.col(11) + 0.3 * testdata::gaussian(40, 1, seed + 99).col(0);
    Eigen::VectorXd yc = y.array() - y.mean();
    PathResult r;
    CHECK_NOTHROW(r = lars_path(x, yc, PathConfig{5, 30, 0}));
    for (std::size_t j : r.entry_order)
      CHECK(std::count(r.entry_order.begin(), r.entry_order.end(), (j + 30) % 60) == 0);
  }
}

}  // TEST_SUITE
