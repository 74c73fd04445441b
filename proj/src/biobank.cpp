#include "screentrex/biobank.hpp"

#include "screentrex/error.hpp"
#include "screentrex/experiments.hpp"
#include "screentrex/fallback.hpp"
#include "screentrex/parallel.hpp"
#include "screentrex/screen.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace strex {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.emplace_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double rounded(double v) { return std::stod(format_real(v)); }

}  // namespace

void ScreenConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
  if (!(alpha_l > 0.0 && alpha_l <= alpha_u && alpha_u <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "acceptance window needs 0 < alpha_l <= alpha_u <= 1");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (resamples < 2) throw Error(ErrorCode::InvalidArgument, "resamples must be at least 2");
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
}

void ScreenConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "config must be a flat JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "alpha") alpha = value.get<double>();
      else if (key == "alpha_l") alpha_l = value.get<double>();
      else if (key == "alpha_u") alpha_u = value.get<double>();
      else if (key == "k") k = value.get<std::size_t>();
      else if (key == "seed") master_seed = value.get<std::uint64_t>();
      else if (key == "resamples") resamples = value.get<std::size_t>();
      else if (key == "threads") threads = value.get<std::size_t>();
      else if (key == "header") header = value.get<bool>();
      else throw Error(ErrorCode::Parse, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad config value: ") + e.what());
  }
}

void ScreenConfig::merge_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  merge_json(j);
}

nlohmann::json ScreenConfig::to_json() const {
  return {{"alpha", rounded(alpha)},   {"alpha_l", rounded(alpha_l)},
          {"alpha_u", rounded(alpha_u)}, {"k", k},
          {"seed", master_seed},       {"resamples", resamples},
          {"threads", threads},        {"header", header}};
}

const char* to_string(Branch b) noexcept {
  switch (b) {
    case Branch::Confidence: return "confidence";
    case Branch::Ordinary: return "ordinary";
    case Branch::Fallback: return "fallback";
  }
  return "unknown";
}

Branch decide(double alpha_hat, double alpha_hat_c, double alpha_l, double alpha_u) noexcept {
  auto below = [](double a, double b) { return a <= b ? 1.0 : 0.0; };
  const bool confidence = alpha_l <= alpha_hat_c && alpha_hat_c <= alpha_u &&
                          std::max(alpha_hat_c, alpha_hat * below(alpha_hat, alpha_u)) == alpha_hat_c;
  const bool ordinary = alpha_l <= alpha_hat && alpha_hat <= alpha_u &&
                        std::max(alpha_hat_c * below(alpha_hat_c, alpha_u), alpha_hat) == alpha_hat;
  // Both cases can only hold together when the estimates are equal; the
  // confidence-based set wins that tie.
  if (confidence) return Branch::Confidence;
  if (ordinary) return Branch::Ordinary;
  return Branch::Fallback;
}

BiobankDecision screen_phenotype(const Dataset& d, const ScreenConfig& cfg, std::string phenotype_id) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  BiobankDecision out;
  out.phenotype_id = std::move(phenotype_id);

  const StandardizedDataset s = standardize(d);
  const ExperimentPlan plan = ExperimentPlan::screen(s.p(), cfg.master_seed, cfg.k);
  const auto outcomes = run_experiments(s, plan, cfg.threads);
  const AggregateVotes votes = aggregate(outcomes);

  const ScreenResult ordinary = select_ordinary(votes);
  out.alpha_hat = ordinary.alpha_hat;
  out.r_ordinary = ordinary.r;

  ScreenResult confidence;
  confidence.method = Method::Confidence;
  if (!votes.dummy_pool.empty()) {
    confidence = select_confidence(votes, ordinary.r, GammaGrid{}, cfg.resamples,
                                   bootstrap_seed(cfg.master_seed));
  }
  // An empty pool leaves the confidence selection empty: alpha_hat_c = 1.
  out.alpha_hat_c = confidence.alpha_hat;
  out.r_confidence = confidence.r;
  out.gamma = confidence.gamma;

  out.branch = decide(out.alpha_hat, out.alpha_hat_c, cfg);
  // An accepted estimate that selects nothing leaves the screen without an
  // answer, which is handed to the calibrated selector as well.
  if ((out.branch == Branch::Confidence && confidence.selected.empty()) ||
      (out.branch == Branch::Ordinary && ordinary.selected.empty()))
    out.branch = Branch::Fallback;
  switch (out.branch) {
    case Branch::Confidence: out.final_set = confidence.selected; break;
    case Branch::Ordinary: out.final_set = ordinary.selected; break;
    case Branch::Fallback: {
      const CalibrationResult cal = calibrate_trex(s, cfg.alpha, plan, cfg.threads);
      out.fallback_used = true;
      out.fallback_feasible = cal.feasible;
      out.fallback_fdr_estimate = cal.fdr_estimate;
      out.final_set = cal.selected;
      break;
    }
  }
  out.wall_time = seconds_since(start);
  return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open manifest " + path.string());
  std::string line;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line))
    if (!trim(line).empty()) header = split_row(line);
  auto column = [&](const char* name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorCode::Parse, path.string() + ": manifest lacks column '" + name + "'");
  };
  const std::size_t cx = column("x_path"), cy = column("y_path"), cid = column("phenotype_id");
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return (fp.is_absolute() || base.empty() ? fp : base / fp).string();
  };

  std::vector<ManifestEntry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::Parse, path.string() + ": line " + std::to_string(line_no) +
                                        " has " + std::to_string(fields.size()) + " fields");
    entries.push_back({resolve(fields[cx]), resolve(fields[cy]), fields[cid]});
  }
  if (entries.empty()) throw Error(ErrorCode::Parse, path.string() + ": manifest has no entries");
  return entries;
}

std::size_t BatchReport::count(Branch b) const noexcept {
  std::size_t c = 0;
  for (const auto& r : rows) c += r.decision && r.decision->branch == b;
  return c;
}

std::size_t BatchReport::failures() const noexcept {
  std::size_t c = 0;
  for (const auto& r : rows) c += !r.decision;
  return c;
}

BatchReport run_batch(const std::vector<ManifestEntry>& manifest, const ScreenConfig& cfg) {
  cfg.validate();
  if (manifest.empty()) throw Error(ErrorCode::InvalidArgument, "manifest is empty");
  const auto start = std::chrono::steady_clock::now();
  BatchReport report;
  report.rows.resize(manifest.size());

  // Phenotypes run concurrently; each one then uses a single worker.
  ScreenConfig inner = cfg;
  if (manifest.size() > 1) inner.threads = 1;
  parallel_for(manifest.size(), cfg.threads, [&](std::size_t i) {
    BatchRow& row = report.rows[i];
    row.phenotype_id = manifest[i].phenotype_id;
    try {
      const Dataset d = load_csv(manifest[i].x_path, manifest[i].y_path, cfg.header);
      row.decision = screen_phenotype(d, inner, manifest[i].phenotype_id);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  report.total_wall_time = seconds_since(start);
  return report;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_results_csv(std::ostream& os, const BatchReport& report) {
  os << "phenotype_id,branch,alpha_hat,alpha_hat_c,n_selected,selected,wall_time,error\n";
  for (const auto& row : report.rows) {
    os << row.phenotype_id << ',';
    if (!row.decision) {
      std::string msg = row.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      os << "error,,,,,," << msg << '\n';
      continue;
    }
    const auto& d = *row.decision;
    os << to_string(d.branch) << ',' << format_real(d.alpha_hat) << ',' << format_real(d.alpha_hat_c)
       << ',' << d.final_set.size() << ',';
    for (std::size_t i = 0; i < d.final_set.size(); ++i) os << (i ? ";" : "") << d.final_set[i];
    os << ',' << format_real(d.wall_time) << ",\n";
  }
}

nlohmann::json summary_json(const BatchReport& report, const ScreenConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r{{"phenotype_id", row.phenotype_id}};
    if (!row.decision) {
      r["error"] = row.error;
    } else {
      const auto& d = *row.decision;
      r["branch"] = to_string(d.branch);
      r["alpha_hat"] = rounded(d.alpha_hat);
      r["alpha_hat_c"] = rounded(d.alpha_hat_c);
      r["gamma"] = std::isfinite(d.gamma) ? nlohmann::json(rounded(d.gamma)) : nlohmann::json(nullptr);
      r["r_ordinary"] = d.r_ordinary;
      r["r_confidence"] = d.r_confidence;
      r["n_selected"] = d.final_set.size();
      r["selected"] = d.final_set;
      r["fallback_used"] = d.fallback_used;
      if (d.fallback_used) {
        r["fallback_feasible"] = d.fallback_feasible;
        r["fallback_fdr_estimate"] = rounded(d.fallback_fdr_estimate);
      }
      r["wall_time"] = rounded(d.wall_time);
    }
    rows.push_back(std::move(r));
  }
  return {{"config", cfg.to_json()},
          {"phenotypes", report.rows.size()},
          {"failures", report.failures()},
          {"branch_counts",
           {{"confidence", report.count(Branch::Confidence)},
            {"ordinary", report.count(Branch::Ordinary)},
            {"fallback", report.count(Branch::Fallback)}}},
          {"total_wall_time", rounded(report.total_wall_time)},
          {"results", std::move(rows)}};
}

}  // namespace strex
