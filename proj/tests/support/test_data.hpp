#pragma once

#include "screentrex/core_data.hpp"
#include "screentrex/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace testdata {

inline Eigen::MatrixXd gaussian(std::size_t n, std::size_t m, std::uint64_t seed) {
  strex::CounterRng rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.normal();
  return x;
}

// Standardized design and centered response y = X b + noise.
struct Problem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

inline Problem random_problem(std::size_t n, std::size_t m, std::uint64_t seed, double noise = 0.5) {
  Problem pr;
  pr.x = gaussian(n, m, seed);
  strex::standardize_columns(pr.x);
  strex::CounterRng rng(seed ^ 0xabcdefULL);
  Eigen::VectorXd b(pr.x.cols());
  for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = rng.normal();
  pr.y = pr.x * b;
  for (Eigen::Index i = 0; i < pr.y.size(); ++i) pr.y(i) += noise * rng.normal();
  pr.y.array() -= pr.y.mean();
  return pr;
}

}  // namespace testdata
