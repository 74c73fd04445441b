#pragma once

#include "screentrex/experiments.hpp"
#include "screentrex/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace strex {

enum class Method { Ordinary, Confidence };

const char* to_string(Method m) noexcept;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  // Closed interval: boundary points count as inside.
  bool contains(double v) const noexcept { return v >= lower && v <= upper; }
};

struct BootstrapCI {
  double center = 0.0;
  double se_boot = 0.0;
  std::size_t resamples = 1000;
  std::uint64_t boot_seed = 0;

  // Normal interval center +- z((1+gamma)/2) * se_boot; gamma = 1 is the
  // whole real line.
  Interval at(double gamma) const;
};

struct ScreenResult {
  std::vector<std::size_t> selected;
  double alpha_hat = 1.0;
  Method method = Method::Ordinary;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  Interval ci{};
  std::size_t r = 0;
};

struct GammaGrid {
  double step = 1e-3;
};

// Bootstrap stream of a screening run; disjoint from the experiment streams.
inline std::uint64_t bootstrap_seed(std::uint64_t master_seed) noexcept {
  return split_seed(master_seed ^ 0xb5297a4d3f84d5b5ULL, 0xb0075eedULL);
}

inline double reciprocal_estimate(std::size_t r) noexcept {
  return 1.0 / static_cast<double>(r > 0 ? r : 1);
}

// {j : phi_j > 0.5}, alpha_hat = 1 / max(R, 1).
ScreenResult select_ordinary(const AggregateVotes& votes);

// Mean of the pool and the bootstrap standard error of that mean.
BootstrapCI bootstrap_se(std::span<const double> pool, std::size_t resamples,
                         std::uint64_t boot_seed);

Interval bootstrap_ci(std::span<const double> pool, double gamma, std::size_t resamples,
                      std::uint64_t boot_seed);

// Number of averaged coefficients falling outside ci.at(gamma).
std::size_t count_outside(const AggregateVotes& votes, const BootstrapCI& ci, double gamma);

// Smallest grid gamma whose interval excludes at most r_ordinary variables.
ScreenResult select_confidence(const AggregateVotes& votes, std::size_t r_ordinary,
                               const GammaGrid& grid, std::size_t resamples,
                               std::uint64_t boot_seed);

// Expected nulls drawn before the stops-th dummy from an urn holding `nulls`
// nulls and population - nulls dummies.
double nhg_mean(std::size_t population, std::size_t nulls, std::size_t stops);

}  // namespace strex
