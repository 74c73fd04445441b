#pragma once

#include "screentrex/core_data.hpp"
#include "screentrex/experiments.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace strex {

struct CalibrationResult {
  std::vector<std::size_t> selected;
  double v_star = 0.5;
  std::size_t t_star = 1;
  double fdr_estimate = 0.0;
  bool feasible = false;
  std::vector<Eigen::VectorXd> votes_by_t;  // phi for T = 1..t_max
  std::vector<std::vector<std::size_t>> counts_by_t;
};

// Voting levels 0.50, 0.55, ..., 0.95 expressed as numerator over 20.
inline constexpr std::size_t kVoteGridSize = 10;
inline double vote_level(std::size_t i) noexcept { return static_cast<double>(10 + i) / 20.0; }

std::size_t fallback_t_max(double alpha, std::size_t p);

// Relative occurrences deflated step by step: the share of originals entering
// between consecutive dummies that is expected to be null (remaining
// originals over remaining dummies) is removed. Element t covers T = t + 1.
std::vector<Eigen::VectorXd> deflated_occurrences(
    const std::vector<std::vector<std::size_t>>& counts_by_t, std::size_t k, std::size_t l);

// sum over selected of (1 - deflated occurrence), divided by |selected|.
double fallback_fdr_estimate(const Eigen::VectorXd& deflated, std::span<const std::size_t> selected);

// Sweeps T = 1..t_max and the voting grid; picks the largest selection whose
// estimate stays at or below alpha. Dummy matrices are drawn once per
// experiment and reused for every T.
CalibrationResult calibrate_trex(const StandardizedDataset& d, double alpha,
                                 const ExperimentPlan& plan, std::size_t threads = 1);

}  // namespace strex
