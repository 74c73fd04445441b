#pragma once

#include "screentrex/biobank.hpp"
#include "screentrex/core_data.hpp"

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace strex {

enum class Design { Gaussian, Genotype };

struct SimSpec {
  std::size_t n = 300;
  std::size_t p = 1000;
  std::size_t p1 = 10;
  double snr = 1.0;
  Design design = Design::Gaussian;
  double maf_lo = 0.05;  // genotype design only
  double maf_hi = 0.5;
  double corr_rho = 0.5;
  double case_fraction = 0.0;  // > 0: binary response with this share of cases
  double beta_value = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
  void merge_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TruthedDataset {
  Dataset dataset;
  std::vector<std::size_t> support;  // ascending
  Eigen::VectorXd beta;
  double sigma2 = 0.0;
};

TruthedDataset simulate(const SimSpec& spec);

enum class BenchMethod { Ordinary, Confidence, Fallback };

const char* to_string(BenchMethod m) noexcept;
BenchMethod parse_bench_method(const std::string& s);

struct MetricRow {
  std::size_t rep = 0;
  double snr = 0.0;
  BenchMethod method = BenchMethod::Ordinary;
  double fdp = 0.0;
  double tpp = 0.0;
  double alpha_hat = 1.0;  // self-estimate; the target level for the fallback
  std::size_t n_selected = 0;
  std::size_t n_false = 0;
  double wall_time = 0.0;
  std::vector<std::size_t> selected;
};

MetricRow score(std::span<const std::size_t> selected, const TruthedDataset& truth);

// Draws without replacement until the stops-th dummy; returns nulls drawn.
std::size_t nhg_urn_sample(std::size_t nulls, std::size_t dummies, std::size_t stops,
                           std::uint64_t seed);

struct MethodSummary {
  BenchMethod method = BenchMethod::Ordinary;
  double snr = 0.0;
  std::size_t reps = 0;
  double mean_fdp = 0.0, se_fdp = 0.0;
  double mean_alpha_hat = 0.0, se_alpha_hat = 0.0;
  double mean_tpp = 0.0, se_tpp = 0.0;
  double mean_selected = 0.0;
  double mean_false = 0.0;
  double mean_wall_time = 0.0, se_wall_time = 0.0;
};

struct Campaign {
  std::vector<MetricRow> rows;  // ordered by (snr, rep, method)
  std::vector<MethodSummary> summaries;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;
};

// Replicate r uses seed split_seed(spec.seed, r). Replicates run on
// cfg.threads workers; rows are ordered by replicate afterwards.
Campaign mc_campaign(const SimSpec& spec, std::size_t reps, std::span<const BenchMethod> methods,
                     const ScreenConfig& cfg);

// One campaign per SNR value, concatenated.
Campaign snr_sweep(const SimSpec& spec, std::span<const double> snr_grid, std::size_t reps,
                   std::span<const BenchMethod> methods, const ScreenConfig& cfg);

MethodSummary summarize(std::span<const MetricRow> rows, BenchMethod method, double snr);

void write_campaign_csv(std::ostream& os, const Campaign& c);
nlohmann::json campaign_json(const Campaign& c, const SimSpec& spec, std::size_t reps);

}  // namespace strex
