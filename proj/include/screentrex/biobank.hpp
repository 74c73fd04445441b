#pragma once

#include "screentrex/core_data.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace strex {

struct ScreenConfig {
  double alpha = 0.1;     // target FDR of the fallback selector
  double alpha_l = 0.05;  // acceptance window for the screening estimates
  double alpha_u = 0.2;
  std::size_t k = 20;
  std::uint64_t master_seed = 42;
  std::size_t resamples = 1000;
  std::size_t threads = 1;
  bool header = false;  // CSV inputs carry a header row

  void validate() const;
  // Overrides fields present in a flat JSON object; unknown keys are an error.
  void merge_json(const nlohmann::json& j);
  void merge_json_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

enum class Branch { Confidence, Ordinary, Fallback };

const char* to_string(Branch b) noexcept;

// Picks the branch whose estimate is accepted by the [alpha_l, alpha_u] window.
Branch decide(double alpha_hat, double alpha_hat_c, double alpha_l, double alpha_u) noexcept;
inline Branch decide(double alpha_hat, double alpha_hat_c, const ScreenConfig& cfg) noexcept {
  return decide(alpha_hat, alpha_hat_c, cfg.alpha_l, cfg.alpha_u);
}

struct BiobankDecision {
  std::string phenotype_id;
  std::vector<std::size_t> final_set;
  Branch branch = Branch::Fallback;
  double alpha_hat = 1.0;
  double alpha_hat_c = 1.0;
  double gamma = 0.0;
  std::size_t r_ordinary = 0;
  std::size_t r_confidence = 0;
  bool fallback_used = false;
  bool fallback_feasible = false;
  double fallback_fdr_estimate = 0.0;
  double wall_time = 0.0;
};

BiobankDecision screen_phenotype(const Dataset& d, const ScreenConfig& cfg,
                                 std::string phenotype_id = "phenotype");

struct ManifestEntry {
  std::string x_path;
  std::string y_path;
  std::string phenotype_id;
};

// CSV with columns x_path, y_path, phenotype_id (header row required).
// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

struct BatchRow {
  std::string phenotype_id;
  std::optional<BiobankDecision> decision;
  std::string error;  // set iff decision is empty
};

struct BatchReport {
  std::vector<BatchRow> rows;  // manifest order
  double total_wall_time = 0.0;

  std::size_t count(Branch b) const noexcept;
  std::size_t failures() const noexcept;
  bool all_failed() const noexcept { return !rows.empty() && failures() == rows.size(); }
};

BatchReport run_batch(const std::vector<ManifestEntry>& manifest, const ScreenConfig& cfg);

// Result rows: phenotype_id,branch,alpha_hat,alpha_hat_c,n_selected,selected,wall_time,error
void write_results_csv(std::ostream& os, const BatchReport& report);
nlohmann::json summary_json(const BatchReport& report, const ScreenConfig& cfg);

// Six significant digits, as used by every numeric output column.
std::string format_real(double v);

}  // namespace strex
