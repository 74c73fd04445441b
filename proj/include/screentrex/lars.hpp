#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace strex {

struct PathConfig {
  std::size_t t_stop = 1;       // dummy inclusions that trigger termination
  std::size_t dummy_start = 0;  // first dummy column of the extended matrix
  std::size_t max_steps = 0;    // 0 = no cap beyond path exhaustion
};

struct PathResult {
  std::vector<std::size_t> entry_order;
  Eigen::VectorXd coefficients;  // over all extended columns, at the last knot
  std::size_t dummies_included = 0;
  bool terminated_early = false;  // dummy quota reached before exhaustion
  std::size_t steps = 0;
};

// Forward LARS path (no lasso drops). Once the t_stop-th dummy has entered,
// the path is advanced one more step so that the dummy carries a nonzero
// coefficient, and then stops. Ties in correlation or step length go to the
// lowest column index.
class LarsPath {
 public:
  // x must have zero-mean unit-norm columns and y must be centered; the
  // referenced data has to outlive the path object.
  LarsPath(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, PathConfig cfg);

  // Advances to the next knot. Returns false once the path has finished.
  bool step();
  bool finished() const noexcept { return done_; }

  const Eigen::VectorXd& coefficients() const noexcept { return beta_; }
  std::span<const std::size_t> active() const noexcept { return active_; }
  // Correlations as maintained by the recursion (cheap, may drift by rounding).
  const Eigen::VectorXd& tracked_correlations() const noexcept { return corr_; }

  PathResult result() const;

  const Eigen::MatrixXd& design() const noexcept { return x_; }
  const Eigen::VectorXd& response() const noexcept { return y_; }

 private:
  void enter(std::size_t j);
  std::size_t max_active() const noexcept;

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  PathConfig cfg_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd corr_;
  std::vector<std::size_t> active_;
  std::vector<char> is_active_;
  std::size_t dummies_ = 0;
  std::size_t steps_ = 0;
  bool final_step_ = false;
  bool done_ = false;
  bool quota_reached_ = false;
};

// c = x^T (y - x * beta), recomputed from the current coefficients.
Eigen::VectorXd knot_correlations(const LarsPath& state);

PathResult lars_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const PathConfig& cfg);

}  // namespace strex
