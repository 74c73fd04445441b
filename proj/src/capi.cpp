#include "screentrex/screentrex.h"

#include "screentrex/biobank.hpp"
#include "screentrex/core_data.hpp"
#include "screentrex/error.hpp"
#include "screentrex/simbench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

struct strex_dataset {
  strex::Dataset data;
};
struct strex_config {
  strex::ScreenConfig cfg;
};
struct strex_decision {
  strex::BiobankDecision decision;
};
struct strex_batch {
  strex::BatchReport report;
};
struct strex_bench {
  strex::Campaign campaign;
  strex::SimSpec spec;
  std::size_t reps = 0;
};

namespace {

thread_local std::string g_last_error;

strex_status to_status(strex::ErrorCode code) {
  using strex::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return STREX_E_INVALID_ARGUMENT;
    case ErrorCode::Io: return STREX_E_IO;
    case ErrorCode::Parse: return STREX_E_PARSE;
    case ErrorCode::Dimension: return STREX_E_DIMENSION;
    case ErrorCode::ZeroVariance: return STREX_E_ZERO_VARIANCE;
    case ErrorCode::NotStandardized: return STREX_E_NOT_STANDARDIZED;
    case ErrorCode::Singular: return STREX_E_SINGULAR;
    case ErrorCode::EmptyPool: return STREX_E_EMPTY_POOL;
    case ErrorCode::Internal: return STREX_E_INTERNAL;
  }
  return STREX_E_INTERNAL;
}

strex_status fail(strex_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class Fn>
strex_status guarded(Fn&& fn) {
  try {
    fn();
    return STREX_OK;
  } catch (const strex::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(STREX_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(STREX_E_INTERNAL, e.what());
  }
}

strex_branch to_c(strex::Branch b) {
  switch (b) {
    case strex::Branch::Confidence: return STREX_BRANCH_CONFIDENCE;
    case strex::Branch::Ordinary: return STREX_BRANCH_ORDINARY;
    case strex::Branch::Fallback: return STREX_BRANCH_FALLBACK;
  }
  return STREX_BRANCH_FALLBACK;
}

void write_text(const char* path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw strex::Error(strex::ErrorCode::Io, std::string("cannot write ") + path);
  out << text;
  if (!out) throw strex::Error(strex::ErrorCode::Io, std::string("write failed for ") + path);
}

std::vector<std::string> split_list(const char* s) {
  std::vector<std::string> out;
  if (!s) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

nlohmann::json read_spec(const char* spec) {
  std::string text = spec ? spec : "{}";
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::ifstream in(text);
    if (!in) throw strex::Error(strex::ErrorCode::Io, "cannot open spec file " + text);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw strex::Error(strex::ErrorCode::Parse, std::string("spec: ") + e.what());
  }
}

#define STREX_REQUIRE(cond, what) \
  if (!(cond)) return fail(STREX_E_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* strex_version(void) { return "0.1.0"; }

const char* strex_status_string(strex_status status) {
  switch (status) {
    case STREX_OK: return "ok";
    case STREX_E_INVALID_ARGUMENT: return "invalid argument";
    case STREX_E_IO: return "i/o error";
    case STREX_E_PARSE: return "parse error";
    case STREX_E_DIMENSION: return "dimension mismatch";
    case STREX_E_ZERO_VARIANCE: return "zero-variance column";
    case STREX_E_NOT_STANDARDIZED: return "input not standardized";
    case STREX_E_SINGULAR: return "singular equiangular system";
    case STREX_E_EMPTY_POOL: return "empty dummy coefficient pool";
    case STREX_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* strex_last_error(void) { return g_last_error.c_str(); }

strex_status strex_dataset_load_csv(const char* x_path, const char* y_path, int header,
                                    strex_dataset** out) {
  STREX_REQUIRE(x_path && y_path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new strex_dataset{strex::load_csv(x_path, y_path, header != 0)}; });
}

strex_status strex_dataset_from_arrays(const double* x, const double* y, size_t n, size_t p,
                                       const char* const* labels, strex_dataset** out) {
  STREX_REQUIRE(x && y && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < p; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i * p + j];
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(n));
    std::vector<std::string> names;
    if (labels)
      for (size_t j = 0; j < p; ++j) names.emplace_back(labels[j] ? labels[j] : "");
    *out = new strex_dataset{strex::Dataset(std::move(m), std::move(v), std::move(names))};
  });
}

size_t strex_dataset_rows(const strex_dataset* d) { return d ? d->data.n() : 0; }
size_t strex_dataset_cols(const strex_dataset* d) { return d ? d->data.p() : 0; }
void strex_dataset_free(strex_dataset* d) { delete d; }

strex_status strex_config_new(strex_config** out) {
  STREX_REQUIRE(out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new strex_config{}; });
}

strex_status strex_config_load_json(strex_config* cfg, const char* path) {
  STREX_REQUIRE(cfg && path, "null argument");
  strex::ScreenConfig next = cfg->cfg;
  const strex_status s = guarded([&] { next.merge_json_file(path); });
  if (s == STREX_OK) cfg->cfg = next;
  return s;
}

strex_status strex_config_set_alpha(strex_config* cfg, double alpha) {
  STREX_REQUIRE(cfg, "null config");
  STREX_REQUIRE(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  cfg->cfg.alpha = alpha;
  return STREX_OK;
}

strex_status strex_config_set_window(strex_config* cfg, double alpha_l, double alpha_u) {
  STREX_REQUIRE(cfg, "null config");
  STREX_REQUIRE(alpha_l > 0.0 && alpha_l <= alpha_u && alpha_u <= 1.0,
                "acceptance window needs 0 < alpha_l <= alpha_u <= 1");
  cfg->cfg.alpha_l = alpha_l;
  cfg->cfg.alpha_u = alpha_u;
  return STREX_OK;
}

// The single-bound setters defer the window check to strex_config_validate so
// that flags can be applied in any order.
strex_status strex_config_set_alpha_l(strex_config* cfg, double alpha_l) {
  STREX_REQUIRE(cfg, "null config");
  cfg->cfg.alpha_l = alpha_l;
  return STREX_OK;
}

strex_status strex_config_set_alpha_u(strex_config* cfg, double alpha_u) {
  STREX_REQUIRE(cfg, "null config");
  cfg->cfg.alpha_u = alpha_u;
  return STREX_OK;
}

strex_status strex_config_set_k(strex_config* cfg, size_t k) {
  STREX_REQUIRE(cfg && k >= 1, "k must be at least 1");
  cfg->cfg.k = k;
  return STREX_OK;
}

strex_status strex_config_set_seed(strex_config* cfg, uint64_t seed) {
  STREX_REQUIRE(cfg, "null config");
  cfg->cfg.master_seed = seed;
  return STREX_OK;
}

strex_status strex_config_set_resamples(strex_config* cfg, size_t resamples) {
  STREX_REQUIRE(cfg && resamples >= 2, "resamples must be at least 2");
  cfg->cfg.resamples = resamples;
  return STREX_OK;
}

strex_status strex_config_set_threads(strex_config* cfg, size_t threads) {
  STREX_REQUIRE(cfg && threads >= 1, "threads must be at least 1");
  cfg->cfg.threads = threads;
  return STREX_OK;
}

int strex_config_header(const strex_config* cfg) { return cfg && cfg->cfg.header ? 1 : 0; }

strex_status strex_config_set_header(strex_config* cfg, int header) {
  STREX_REQUIRE(cfg, "null config");
  cfg->cfg.header = header != 0;
  return STREX_OK;
}

strex_status strex_config_validate(const strex_config* cfg) {
  STREX_REQUIRE(cfg, "null config");
  return guarded([&] { cfg->cfg.validate(); });
}

void strex_config_free(strex_config* cfg) { delete cfg; }

strex_status strex_screen(const strex_dataset* d, const strex_config* cfg, const char* phenotype_id,
                          strex_decision** out) {
  STREX_REQUIRE(d && cfg && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new strex_decision{
        strex::screen_phenotype(d->data, cfg->cfg, phenotype_id ? phenotype_id : "phenotype")};
  });
}

strex_branch strex_decision_branch(const strex_decision* r) { return to_c(r->decision.branch); }
double strex_decision_alpha_hat(const strex_decision* r) { return r->decision.alpha_hat; }
double strex_decision_alpha_hat_c(const strex_decision* r) { return r->decision.alpha_hat_c; }
double strex_decision_gamma(const strex_decision* r) { return r->decision.gamma; }
double strex_decision_wall_time(const strex_decision* r) { return r->decision.wall_time; }
int strex_decision_fallback_used(const strex_decision* r) { return r->decision.fallback_used ? 1 : 0; }
size_t strex_decision_num_selected(const strex_decision* r) { return r->decision.final_set.size(); }

size_t strex_decision_selected(const strex_decision* r, size_t* indices, size_t capacity) {
  const auto& set = r->decision.final_set;
  if (indices) std::copy_n(set.begin(), std::min(capacity, set.size()), indices);
  return set.size();
}

strex_status strex_decision_write(const strex_decision* r, const strex_config* cfg,
                                  const char* csv_path, const char* json_path) {
  STREX_REQUIRE(r && cfg, "null argument");
  return guarded([&] {
    strex::BatchReport report;
    report.rows.push_back({r->decision.phenotype_id, r->decision, {}});
    report.total_wall_time = r->decision.wall_time;
    if (csv_path) {
      std::ostringstream os;
      strex::write_results_csv(os, report);
      write_text(csv_path, os.str());
    }
    if (json_path) write_text(json_path, strex::summary_json(report, cfg->cfg).dump(2) + "\n");
  });
}

void strex_decision_free(strex_decision* r) { delete r; }

strex_branch strex_decide(double alpha_hat, double alpha_hat_c, double alpha_l, double alpha_u) {
  return to_c(strex::decide(alpha_hat, alpha_hat_c, alpha_l, alpha_u));
}

strex_status strex_batch_run(const char* manifest_path, const strex_config* cfg, strex_batch** out) {
  STREX_REQUIRE(manifest_path && cfg && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto manifest = strex::read_manifest(manifest_path);
    *out = new strex_batch{strex::run_batch(manifest, cfg->cfg)};
  });
}

size_t strex_batch_rows(const strex_batch* b) { return b ? b->report.rows.size() : 0; }
size_t strex_batch_failures(const strex_batch* b) { return b ? b->report.failures() : 0; }

size_t strex_batch_branch_count(const strex_batch* b, strex_branch branch) {
  if (!b) return 0;
  switch (branch) {
    case STREX_BRANCH_CONFIDENCE: return b->report.count(strex::Branch::Confidence);
    case STREX_BRANCH_ORDINARY: return b->report.count(strex::Branch::Ordinary);
    case STREX_BRANCH_FALLBACK: return b->report.count(strex::Branch::Fallback);
  }
  return 0;
}

strex_status strex_batch_write(const strex_batch* b, const strex_config* cfg, const char* csv_path,
                               const char* json_path) {
  STREX_REQUIRE(b && cfg, "null argument");
  return guarded([&] {
    if (csv_path) {
      std::ostringstream os;
      strex::write_results_csv(os, b->report);
      write_text(csv_path, os.str());
    }
    if (json_path) write_text(json_path, strex::summary_json(b->report, cfg->cfg).dump(2) + "\n");
  });
}

void strex_batch_free(strex_batch* b) { delete b; }

strex_status strex_bench_run(const char* spec, size_t reps, const char* methods,
                             const char* snr_grid, const strex_config* cfg, strex_bench** out) {
  STREX_REQUIRE(cfg && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto bench = std::make_unique<strex_bench>();
    bench->spec.merge_json(read_spec(spec));
    bench->reps = reps;
    std::vector<strex::BenchMethod> ms;
    for (const auto& m : split_list(methods ? methods : "ordinary,confidence"))
      ms.push_back(strex::parse_bench_method(m));
    std::vector<double> grid;
    for (const auto& v : split_list(snr_grid)) {
      try {
        std::size_t used = 0;
        grid.push_back(std::stod(v, &used));
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw strex::Error(strex::ErrorCode::Parse, "bad SNR grid value '" + v + "'");
      }
    }
    bench->campaign = strex::snr_sweep(bench->spec, grid, reps, ms, cfg->cfg);
    *out = bench.release();
  });
}

size_t strex_bench_rows(const strex_bench* b) { return b ? b->campaign.rows.size() : 0; }
size_t strex_bench_failures(const strex_bench* b) { return b ? b->campaign.failures : 0; }
size_t strex_bench_num_summaries(const strex_bench* b) { return b ? b->campaign.summaries.size() : 0; }

strex_status strex_bench_summary(const strex_bench* b, size_t i, double* snr, double* mean_fdp,
                                 double* se_fdp, double* mean_alpha_hat, double* mean_tpp) {
  STREX_REQUIRE(b && i < b->campaign.summaries.size(), "summary index out of range");
  const auto& s = b->campaign.summaries[i];
  if (snr) *snr = s.snr;
  if (mean_fdp) *mean_fdp = s.mean_fdp;
  if (se_fdp) *se_fdp = s.se_fdp;
  if (mean_alpha_hat) *mean_alpha_hat = s.mean_alpha_hat;
  if (mean_tpp) *mean_tpp = s.mean_tpp;
  return STREX_OK;
}

strex_status strex_bench_write(const strex_bench* b, const char* csv_path, const char* json_path) {
  STREX_REQUIRE(b, "null argument");
  return guarded([&] {
    if (csv_path) {
      std::ostringstream os;
      strex::write_campaign_csv(os, b->campaign);
      write_text(csv_path, os.str());
    }
    if (json_path)
      write_text(json_path, strex::campaign_json(b->campaign, b->spec, b->reps).dump(2) + "\n");
  });
}

void strex_bench_free(strex_bench* b) { delete b; }

}  // extern "C"
