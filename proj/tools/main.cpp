// screentrex command-line front end. Talks to the library only through the C API.
#include "screentrex/screentrex.h"

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::optional<double> alpha, alpha_l, alpha_u;
  std::optional<std::size_t> k, resamples, threads;
  std::optional<std::uint64_t> seed;
  bool header = false;
  std::string out;

  std::string x, y, phenotype = "phenotype";
  std::string manifest;
  std::string spec = "{}";
  std::size_t reps = 100;
  std::string methods = "ordinary,confidence";
  std::string snr_grid;
};

struct ConfigDeleter {
  void operator()(strex_config* c) const { strex_config_free(c); }
};
using ConfigPtr = std::unique_ptr<strex_config, ConfigDeleter>;

void report(const char* what) { std::fprintf(stderr, "screentrex: %s: %s\n", what, strex_last_error()); }

// Defaults, then the config file, then explicit flags.
ConfigPtr build_config(const Options& o) {
  strex_config* raw = nullptr;
  if (strex_config_new(&raw) != STREX_OK) return nullptr;
  ConfigPtr cfg(raw);
  bool ok = true;
  if (!o.config.empty()) ok = ok && strex_config_load_json(raw, o.config.c_str()) == STREX_OK;
  if (o.alpha) ok = ok && strex_config_set_alpha(raw, *o.alpha) == STREX_OK;
  if (o.alpha_l) ok = ok && strex_config_set_alpha_l(raw, *o.alpha_l) == STREX_OK;
  if (o.alpha_u) ok = ok && strex_config_set_alpha_u(raw, *o.alpha_u) == STREX_OK;
  if (o.k) ok = ok && strex_config_set_k(raw, *o.k) == STREX_OK;
  if (o.seed) ok = ok && strex_config_set_seed(raw, *o.seed) == STREX_OK;
  if (o.resamples) ok = ok && strex_config_set_resamples(raw, *o.resamples) == STREX_OK;
  if (o.threads) ok = ok && strex_config_set_threads(raw, *o.threads) == STREX_OK;
  if (o.header) ok = ok && strex_config_set_header(raw, 1) == STREX_OK;
  ok = ok && strex_config_validate(raw) == STREX_OK;
  if (!ok) {
    report("configuration");
    return nullptr;
  }
  return cfg;
}

// --out names a prefix; a trailing .csv or .json is dropped.
std::string out_prefix(std::string out, const char* fallback) {
  if (out.empty()) return fallback;
  for (const char* ext : {".csv", ".json"}) {
    const std::string e(ext);
    if (out.size() > e.size() && out.compare(out.size() - e.size(), e.size(), e) == 0)
      return out.substr(0, out.size() - e.size());
  }
  return out;
}

int run_screen(const Options& o) {
  auto cfg = build_config(o);
  if (!cfg) return kExitUsage;
  const int header = strex_config_header(cfg.get());
  strex_dataset* d = nullptr;
  if (strex_dataset_load_csv(o.x.c_str(), o.y.c_str(), header, &d) != STREX_OK) {
    report("loading data");
    return kExitFailure;
  }
  strex_decision* r = nullptr;
  const strex_status st = strex_screen(d, cfg.get(), o.phenotype.c_str(), &r);
  strex_dataset_free(d);
  if (st != STREX_OK) {
    report("screening");
    return kExitFailure;
  }

  static const char* names[] = {"confidence", "ordinary", "fallback"};
  std::vector<std::size_t> sel(strex_decision_num_selected(r));
  strex_decision_selected(r, sel.data(), sel.size());
  std::printf("%s: branch=%s alpha_hat=%.6g alpha_hat_c=%.6g selected=%zu", o.phenotype.c_str(),
              names[strex_decision_branch(r)], strex_decision_alpha_hat(r), strex_decision_alpha_hat_c(r),
              sel.size());
  for (std::size_t i = 0; i < sel.size(); ++i) std::printf("%c%zu", i ? ';' : ' ', sel[i]);
  std::printf("\n");

  int rc = kExitOk;
  if (!o.out.empty()) {
    const std::string prefix = out_prefix(o.out, "");
    const std::string csv = prefix + ".csv", json = prefix + ".json";
    if (strex_decision_write(r, cfg.get(), csv.c_str(), json.c_str()) != STREX_OK) {
      report("writing results");
      rc = kExitFailure;
    }
  }
  strex_decision_free(r);
  return rc;
}

int run_batch(const Options& o) {
  auto cfg = build_config(o);
  if (!cfg) return kExitUsage;
  strex_batch* b = nullptr;
  if (strex_batch_run(o.manifest.c_str(), cfg.get(), &b) != STREX_OK) {
    report("batch");
    return kExitFailure;
  }
  const std::string prefix = out_prefix(o.out, "screentrex_batch");
  const std::string csv = prefix + ".csv", json = prefix + ".json";
  int rc = kExitOk;
  if (strex_batch_write(b, cfg.get(), csv.c_str(), json.c_str()) != STREX_OK) {
    report("writing results");
    rc = kExitFailure;
  }
  const std::size_t rows = strex_batch_rows(b), failed = strex_batch_failures(b);
  std::printf("%zu phenotypes: %zu confidence, %zu ordinary, %zu fallback, %zu failed -> %s\n", rows,
              strex_batch_branch_count(b, STREX_BRANCH_CONFIDENCE),
              strex_batch_branch_count(b, STREX_BRANCH_ORDINARY),
              strex_batch_branch_count(b, STREX_BRANCH_FALLBACK), failed, csv.c_str());
  if (rows > 0 && failed == rows) rc = kExitFailure;
  strex_batch_free(b);
  return rc;
}

int run_bench(const Options& o) {
  auto cfg = build_config(o);
  if (!cfg) return kExitUsage;
  strex_bench* b = nullptr;
  const strex_status st = strex_bench_run(o.spec.c_str(), o.reps, o.methods.c_str(),
                                          o.snr_grid.empty() ? nullptr : o.snr_grid.c_str(), cfg.get(), &b);
  if (st != STREX_OK) {
    report("bench");
    return st == STREX_E_INVALID_ARGUMENT || st == STREX_E_PARSE ? kExitUsage : kExitFailure;
  }
  const std::string prefix = out_prefix(o.out, "screentrex_bench");
  const std::string csv = prefix + ".csv", json = prefix + ".json";
  int rc = kExitOk;
  if (strex_bench_write(b, csv.c_str(), json.c_str()) != STREX_OK) {
    report("writing results");
    rc = kExitFailure;
  }
  // Summaries come in (snr, method) order with methods as listed.
  std::vector<std::string> names;
  for (const auto& m : CLI::detail::split(o.methods, ',')) names.push_back(CLI::detail::trim_copy(m));
  for (std::size_t i = 0; i < strex_bench_num_summaries(b); ++i) {
    double snr = 0, fdp = 0, se = 0, ah = 0, tpp = 0;
    strex_bench_summary(b, i, &snr, &fdp, &se, &ah, &tpp);
    std::printf("snr=%-6g %-10s fdp=%.4f (se %.4f) alpha_hat=%.4f tpp=%.4f\n", snr,
                names[i % names.size()].c_str(), fdp, se, ah, tpp);
  }
  if (strex_bench_rows(b) == 0 && strex_bench_failures(b) > 0) rc = kExitFailure;
  strex_bench_free(b);
  return rc;
}

void common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Flat JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--alpha", o.alpha, "Target FDR of the fallback selector");
  cmd->add_option("--alpha-l", o.alpha_l, "Lower bound of the acceptance window");
  cmd->add_option("--alpha-u", o.alpha_u, "Upper bound of the acceptance window");
  cmd->add_option("--k", o.k, "Random experiments (default 20)");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--resamples", o.resamples, "Bootstrap resamples (default 1000)");
  cmd->add_option("--threads", o.threads, "Worker threads");
  cmd->add_option("--out", o.out, "Output prefix; writes <out>.csv and <out>.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screen-T-Rex FDR-controlled variable screening"};
  app.set_version_flag("--version", std::string(strex_version()));
  app.require_subcommand(1);
  Options o;

  auto* screen = app.add_subcommand("screen", "Screen one phenotype");
  common_flags(screen, o);
  screen->add_option("--x", o.x, "Predictor CSV (n rows, p columns)")->required();
  screen->add_option("--y", o.y, "Response CSV (one column)")->required();
  screen->add_option("--id", o.phenotype, "Phenotype id used in the output");
  screen->add_flag("--header", o.header, "Input CSVs start with a header row");

  auto* batch = app.add_subcommand("batch", "Screen every phenotype of a manifest");
  common_flags(batch, o);
  batch->add_option("--manifest", o.manifest, "CSV with x_path,y_path,phenotype_id")->required();
  batch->add_flag("--header", o.header, "Input CSVs start with a header row");

  auto* bench = app.add_subcommand("bench", "Monte Carlo FDR/TPP benchmark on simulated data");
  common_flags(bench, o);
  bench->add_option("--spec", o.spec, "Simulation spec: inline JSON or a JSON file");
  bench->add_option("--reps", o.reps, "Replicates per SNR value");
  bench->add_option("--methods", o.methods, "Comma list of ordinary,confidence,fallback");
  bench->add_option("--snr-grid", o.snr_grid, "Comma list of SNR values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (screen->parsed()) return run_screen(o);
  if (batch->parsed()) return run_batch(o);
  return run_bench(o);
}
