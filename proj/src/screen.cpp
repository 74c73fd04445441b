#include "screentrex/screen.hpp"

#include "screentrex/error.hpp"
#include "screentrex/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace strex {

const char* to_string(Method m) noexcept {
  return m == Method::Ordinary ? "ordinary" : "confidence";
}

Interval BootstrapCI::at(double gamma) const {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "confidence level must lie in [0, 1]");
  if (gamma == 0.0) return {center, center};
  if (gamma == 1.0)
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + gamma));
  return {center - z * se_boot, center + z * se_boot};
}

ScreenResult select_ordinary(const AggregateVotes& votes) {
  ScreenResult res;
  res.method = Method::Ordinary;
  // phi > 0.5  <=>  2 * count > K, evaluated on integers.
  for (std::size_t j = 0; j < votes.counts.size(); ++j)
    if (2 * votes.counts[j] > votes.k) res.selected.push_back(j);
  res.r = res.selected.size();
  res.alpha_hat = reciprocal_estimate(res.r);
  return res;
}

BootstrapCI bootstrap_se(std::span<const double> pool, std::size_t resamples,
                         std::uint64_t boot_seed) {
  if (pool.empty())
    throw Error(ErrorCode::EmptyPool,
                "dummy coefficient pool is empty; use the ordinary selector instead");
  if (resamples < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least 2 resamples");
  const std::size_t k = pool.size();
  BootstrapCI ci;
  ci.resamples = resamples;
  ci.boot_seed = boot_seed;
  double sum = 0.0;
  for (double v : pool) sum += v;
  ci.center = sum / static_cast<double>(k);

  // Resample means are produced and reduced sequentially, so the result is a
  // pure function of (pool, resamples, boot_seed).
  CounterRng rng(boot_seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t b = 0; b < resamples; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += pool[rng.below(k)];
    const double x = s / static_cast<double>(k);
    const double delta = x - mean;
    mean += delta / static_cast<double>(b + 1);
    m2 += delta * (x - mean);
  }
  ci.se_boot = std::sqrt(std::max(0.0, m2 / static_cast<double>(resamples - 1)));
  // A constant pool gives exactly zero spread; suppress Welford rounding noise.
  bool constant = true;
  for (double v : pool) constant = constant && v == pool[0];
  if (constant) ci.se_boot = 0.0;
  return ci;
}

Interval bootstrap_ci(std::span<const double> pool, double gamma, std::size_t resamples,
                      std::uint64_t boot_seed) {
  return bootstrap_se(pool, resamples, boot_seed).at(gamma);
}

std::size_t count_outside(const AggregateVotes& votes, const BootstrapCI& ci, double gamma) {
  const Interval iv = ci.at(gamma);
  std::size_t r = 0;
  for (Eigen::Index j = 0; j < votes.avg_coefs.size(); ++j)
    if (!iv.contains(votes.avg_coefs(j))) ++r;
  return r;
}

ScreenResult select_confidence(const AggregateVotes& votes, std::size_t r_ordinary,
                               const GammaGrid& grid, std::size_t resamples,
                               std::uint64_t boot_seed) {
  if (!(grid.step > 0.0 && grid.step <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "gamma grid step must lie in (0, 1]");
  const BootstrapCI ci = bootstrap_se(votes.dummy_pool, resamples, boot_seed);
  const auto points = static_cast<std::size_t>(std::llround(1.0 / grid.step));

  ScreenResult res;
  res.method = Method::Confidence;
  for (std::size_t i = 0; i <= points; ++i) {
    const double gamma = i == points ? 1.0 : static_cast<double>(i) * grid.step;
    if (count_outside(votes, ci, gamma) > r_ordinary) continue;
    res.gamma = gamma;
    res.ci = ci.at(gamma);
    break;
  }
  for (Eigen::Index j = 0; j < votes.avg_coefs.size(); ++j)
    if (!res.ci.contains(votes.avg_coefs(j))) res.selected.push_back(static_cast<std::size_t>(j));
  res.r = res.selected.size();
  res.alpha_hat = reciprocal_estimate(res.r);
  return res;
}

double nhg_mean(std::size_t population, std::size_t nulls, std::size_t stops) {
  if (nulls > population)
    throw Error(ErrorCode::InvalidArgument, "nulls exceed population");
  const std::size_t dummies = population - nulls;
  if (stops < 1 || stops > dummies)
    throw Error(ErrorCode::InvalidArgument, "stops must lie in [1, population - nulls]");
  return static_cast<double>(stops) * static_cast<double>(nulls) /
         static_cast<double>(dummies + 1);
}

}  // namespace strex
