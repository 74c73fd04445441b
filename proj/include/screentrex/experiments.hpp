#pragma once

#include "screentrex/core_data.hpp"
#include "screentrex/lars.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace strex {

struct ExperimentPlan {
  std::size_t k = 20;  // random experiments
  std::size_t l = 1;   // dummies per experiment
  std::size_t t = 1;   // dummy inclusions before termination
  std::uint64_t master_seed = 0;

  // The screening configuration: T = 1, L = p.
  static ExperimentPlan screen(std::size_t p, std::uint64_t seed, std::size_t k = 20) {
    return ExperimentPlan{k, p, 1, seed};
  }
  void validate() const;
};

struct ExperimentOutcome {
  std::vector<std::size_t> candidate_set;  // original indices, ascending
  Eigen::VectorXd orig_coefs;
  Eigen::VectorXd dummy_coefs;
  double included_dummy_coef = 0.0;  // coefficient of the last dummy to enter
  bool terminated_early = false;
  std::vector<std::size_t> entry_order;  // extended column indices
};

struct AggregateVotes {
  Eigen::VectorXd phi;                    // relative occurrences
  std::vector<std::size_t> counts;        // phi * k as integers
  Eigen::VectorXd avg_coefs;
  std::vector<double> dummy_pool;         // one per terminated experiment
  std::size_t k = 0;
  bool reduced_pool = false;              // some experiment had no dummy

  std::size_t p() const noexcept { return counts.size(); }
};

// i.i.d. N(0,1) entries, column-major fill from a counter-based stream.
Eigen::MatrixXd generate_dummies(std::size_t n, std::size_t l, std::uint64_t seed);

// Seed of the k-th experiment (0-based) under `master_seed`.
std::uint64_t experiment_seed(std::uint64_t master_seed, std::size_t k);

// [x_std | standardized dummies drawn from `seed`].
Eigen::MatrixXd extended_design(const StandardizedDataset& d, std::size_t l, std::uint64_t seed);

// One random experiment on an already extended design.
ExperimentOutcome run_experiment(const Eigen::MatrixXd& x_ext, const Eigen::VectorXd& y_c,
                                 std::size_t p, std::size_t t_stop);

// Outcomes are returned in experiment order and do not depend on `threads`.
std::vector<ExperimentOutcome> run_experiments(const StandardizedDataset& d,
                                               const ExperimentPlan& plan,
                                               std::size_t threads = 1);

AggregateVotes aggregate(std::span<const ExperimentOutcome> outcomes);

}  // namespace strex
