#include "screentrex/fallback.hpp"

#include "screentrex/error.hpp"
#include "screentrex/parallel.hpp"
#include "screentrex/screen.hpp"

#include <algorithm>
#include <cmath>

namespace strex {

std::size_t fallback_t_max(double alpha, std::size_t p) {
  const auto budget = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(p) / 2.0));
  return std::min<std::size_t>(10, std::max<std::size_t>(2, budget));
}

std::vector<Eigen::VectorXd> deflated_occurrences(
    const std::vector<std::vector<std::size_t>>& counts_by_t, std::size_t k, std::size_t l) {
  std::vector<Eigen::VectorXd> out;
  if (counts_by_t.empty()) return out;
  const std::size_t p = counts_by_t.front().size();
  const double kk = static_cast<double>(k);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t t = 0; t < counts_by_t.size(); ++t) {
    // Average originals that entered between the t-th and (t+1)-th dummy,
    // and the expected nulls among them: remaining originals per remaining
    // dummy, as in the negative hypergeometric urn.
    double total = 0.0, fresh = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double now = static_cast<double>(counts_by_t[t][j]) / kk;
      const double before = t == 0 ? 0.0 : static_cast<double>(counts_by_t[t - 1][j]) / kk;
      total += now;
      fresh += now - before;
    }
    if (fresh > 0.0) {
      const double expected_nulls =
          (static_cast<double>(p) - total) / static_cast<double>(l - t);
      const double keep = 1.0 - expected_nulls / fresh;
      for (std::size_t j = 0; j < p; ++j) {
        const double before = t == 0 ? 0.0 : static_cast<double>(counts_by_t[t - 1][j]) / kk;
        const double delta = static_cast<double>(counts_by_t[t][j]) / kk - before;
        acc(static_cast<Eigen::Index>(j)) += keep * delta;
      }
    }
    out.push_back(acc.cwiseMax(0.0));
  }
  return out;
}

double fallback_fdr_estimate(const Eigen::VectorXd& deflated, std::span<const std::size_t> selected) {
  if (selected.empty()) return 0.0;
  double nulls = 0.0;
  for (std::size_t j : selected) nulls += 1.0 - deflated(static_cast<Eigen::Index>(j));
  return std::min(1.0, nulls / static_cast<double>(selected.size()));
}

CalibrationResult calibrate_trex(const StandardizedDataset& d, double alpha,
                                 const ExperimentPlan& plan, std::size_t threads) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "target FDR must lie in (0, 1]");
  plan.validate();
  const std::size_t p = d.p();
  if (plan.l != p) throw Error(ErrorCode::InvalidArgument, "calibration requires L = p dummies");
  const std::size_t t_max = fallback_t_max(alpha, p);

  // candidates[k][t - 1]: candidate set of experiment k stopped at t dummies.
  std::vector<std::vector<std::vector<std::size_t>>> candidates(plan.k);
  parallel_for(plan.k, threads, [&](std::size_t k) {
    try {
      const Eigen::MatrixXd ext = extended_design(d, plan.l, experiment_seed(plan.master_seed, k));
      candidates[k].reserve(t_max);
      for (std::size_t t = 1; t <= t_max; ++t)
        candidates[k].push_back(run_experiment(ext, d.y_c, p, t).candidate_set);
    } catch (const Error& e) {
      throw Error(e.code(), "calibration experiment " + std::to_string(k + 1) + ": " + e.what());
    }
  });

  CalibrationResult res;
  res.counts_by_t.assign(t_max, std::vector<std::size_t>(p, 0));
  for (std::size_t t = 0; t < t_max; ++t) {
    for (std::size_t k = 0; k < plan.k; ++k)
      for (std::size_t j : candidates[k][t]) ++res.counts_by_t[t][j];
    Eigen::VectorXd phi(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j)
      phi(static_cast<Eigen::Index>(j)) =
          static_cast<double>(res.counts_by_t[t][j]) / static_cast<double>(plan.k);
    res.votes_by_t.push_back(std::move(phi));
  }

  const auto deflated = deflated_occurrences(res.counts_by_t, plan.k, plan.l);
  // Selected at vote index i iff count / K > (10 + i) / 20.
  auto selection = [&](std::size_t t, std::size_t i) {
    std::vector<std::size_t> sel;
    for (std::size_t j = 0; j < p; ++j)
      if (20 * res.counts_by_t[t][j] > (10 + i) * plan.k) sel.push_back(j);
    return sel;
  };

  std::size_t best_r = 0, best_t = 0, best_i = 0;
  double best_est = 0.0;
  bool found = false;
  for (std::size_t t = 0; t < t_max; ++t) {
    for (std::size_t i = 0; i < kVoteGridSize; ++i) {
      const auto sel = selection(t, i);
      const std::size_t r = sel.size();
      const double est = fallback_fdr_estimate(deflated[t], sel);
      if (est > alpha) continue;
      // Larger selection, then smaller estimate, then smaller T, then larger v.
      const bool better = !found || r > best_r || (r == best_r && est < best_est) ||
                          (r == best_r && est == best_est && t == best_t && i > best_i);
      if (better) {
        found = true;
        best_r = r;
        best_t = t;
        best_i = i;
        best_est = est;
      }
    }
  }

  res.feasible = found;
  if (!found) {
    res.fdr_estimate = 0.0;
    return res;
  }
  res.t_star = best_t + 1;
  res.v_star = vote_level(best_i);
  res.fdr_estimate = best_est;
  res.selected = selection(best_t, best_i);
  return res;
}

}  // namespace strex
