#include "screentrex/experiments.hpp"

#include "screentrex/error.hpp"
#include "screentrex/parallel.hpp"
#include "screentrex/rng.hpp"

#include <algorithm>

namespace strex {

void ExperimentPlan::validate() const {
  if (k < 1 || l < 1 || t < 1)
    throw Error(ErrorCode::InvalidArgument, "experiment plan needs k, l, t >= 1");
}

Eigen::MatrixXd generate_dummies(std::size_t n, std::size_t l, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
  double* data = m.data();
  for (std::size_t i = 0; i < n * l; ++i) data[i] = rng.normal();
  return m;
}

std::uint64_t experiment_seed(std::uint64_t master_seed, std::size_t k) {
  // Salted so a dummy stream never coincides with a simulation stream that
  // happens to share the seed.
  return split_seed(master_seed ^ 0x6a09e667f3bcc909ULL, k);
}

Eigen::MatrixXd extended_design(const StandardizedDataset& d, std::size_t l, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(d.n());
  const auto p = static_cast<Eigen::Index>(d.p());
  Eigen::MatrixXd ext(n, p + static_cast<Eigen::Index>(l));
  ext.leftCols(p) = d.x_std;
  ext.rightCols(static_cast<Eigen::Index>(l)) = generate_dummies(d.n(), l, seed);
  standardize_columns(ext.rightCols(static_cast<Eigen::Index>(l)));
  return ext;
}

ExperimentOutcome run_experiment(const Eigen::MatrixXd& x_ext, const Eigen::VectorXd& y_c,
                                 std::size_t p, std::size_t t_stop) {
  const PathResult path = lars_path(x_ext, y_c, PathConfig{t_stop, p, 0});
  const auto pp = static_cast<Eigen::Index>(p);
  ExperimentOutcome out;
  out.entry_order = path.entry_order;
  out.terminated_early = path.terminated_early;
  out.orig_coefs = path.coefficients.head(pp);
  out.dummy_coefs = path.coefficients.tail(path.coefficients.size() - pp);
  for (std::size_t j : path.entry_order) {
    if (j < p)
      out.candidate_set.push_back(j);
    else
      out.included_dummy_coef = path.coefficients(static_cast<Eigen::Index>(j));
  }
  std::sort(out.candidate_set.begin(), out.candidate_set.end());
  return out;
}

std::vector<ExperimentOutcome> run_experiments(const StandardizedDataset& d,
                                               const ExperimentPlan& plan, std::size_t threads) {
  plan.validate();
  std::vector<ExperimentOutcome> outcomes(plan.k);
  parallel_for(plan.k, threads, [&](std::size_t k) {
    try {
      const Eigen::MatrixXd ext = extended_design(d, plan.l, experiment_seed(plan.master_seed, k));
      outcomes[k] = run_experiment(ext, d.y_c, d.p(), plan.t);
    } catch (const Error& e) {
      throw Error(e.code(), "experiment " + std::to_string(k + 1) + ": " + e.what());
    }
  });
  return outcomes;
}

AggregateVotes aggregate(std::span<const ExperimentOutcome> outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::InvalidArgument, "no experiment outcomes to aggregate");
  const auto p = outcomes.front().orig_coefs.size();
  AggregateVotes v;
  v.k = outcomes.size();
  v.counts.assign(static_cast<std::size_t>(p), 0);
  v.avg_coefs = Eigen::VectorXd::Zero(p);
  for (const auto& o : outcomes) {
    if (o.orig_coefs.size() != p)
      throw Error(ErrorCode::Dimension, "experiment outcomes disagree on predictor count");
    for (std::size_t j : o.candidate_set) ++v.counts[j];
    v.avg_coefs += o.orig_coefs;
    if (o.terminated_early && o.included_dummy_coef != 0.0)
      v.dummy_pool.push_back(o.included_dummy_coef);
    else
      v.reduced_pool = true;
  }
  const double k = static_cast<double>(v.k);
  v.avg_coefs /= k;
  v.phi.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) v.phi(j) = static_cast<double>(v.counts[static_cast<std::size_t>(j)]) / k;
  return v;
}

}  // namespace strex
