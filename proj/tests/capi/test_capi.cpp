// Exercises the shared library through the C header only.
#include "screentrex/screentrex.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Deterministic design with a clear signal in columns 0 and 3.
void make_arrays(std::size_t n, std::size_t p, std::vector<double>& x, std::vector<double>& y) {
  x.assign(n * p, 0.0);
  y.assign(n, 0.0);
  std::uint64_t s = 12345;
  auto u = [&] {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x[i * p + j] = u();
    y[i] = 3.0 * x[i * p + 0] - 2.0 * x[i * p + 3] + 0.1 * u();
  }
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "screentrex_capi";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("status strings and version") {
  CHECK(std::string(strex_version()).size() > 0);
  CHECK(std::string(strex_status_string(STREX_OK)) == "ok");
  CHECK(std::string(strex_status_string(STREX_E_PARSE)).size() > 0);
}

TEST_CASE("errors carry codes and messages") {
  strex_dataset* d = nullptr;
  CHECK(strex_dataset_load_csv("/nonexistent/x.csv", "/nonexistent/y.csv", 0, &d) == STREX_E_IO);
  CHECK(d == nullptr);
  CHECK(std::string(strex_last_error()).find("x.csv") != std::string::npos);
  CHECK(strex_dataset_load_csv(nullptr, nullptr, 0, &d) == STREX_E_INVALID_ARGUMENT);

  strex_config* cfg = nullptr;
  REQUIRE(strex_config_new(&cfg) == STREX_OK);
  CHECK(strex_config_set_alpha(cfg, 1.5) == STREX_E_INVALID_ARGUMENT);
  CHECK(strex_config_set_window(cfg, 0.3, 0.2) == STREX_E_INVALID_ARGUMENT);
  CHECK(strex_config_set_k(cfg, 0) == STREX_E_INVALID_ARGUMENT);
  CHECK(strex_config_validate(cfg) == STREX_OK);
  strex_config_free(cfg);
}

TEST_CASE("screen through the C interface") {
  std::vector<double> x, y;
  make_arrays(60, 20, x, y);
  strex_dataset* d = nullptr;
  REQUIRE(strex_dataset_from_arrays(x.data(), y.data(), 60, 20, nullptr, &d) == STREX_OK);
  CHECK(strex_dataset_rows(d) == 60);
  CHECK(strex_dataset_cols(d) == 20);

  strex_config* cfg = nullptr;
  REQUIRE(strex_config_new(&cfg) == STREX_OK);
  REQUIRE(strex_config_set_window(cfg, 0.01, 0.99) == STREX_OK);

  strex_decision* r1 = nullptr;
  strex_decision* r2 = nullptr;
  REQUIRE(strex_screen(d, cfg, "trait", &r1) == STREX_OK);
  REQUIRE(strex_config_set_threads(cfg, 3) == STREX_OK);
  REQUIRE(strex_screen(d, cfg, "trait", &r2) == STREX_OK);

  const std::size_t n = strex_decision_num_selected(r1);
  std::vector<std::size_t> a(n + 1, 99), b(n + 1, 99);
  CHECK(strex_decision_selected(r1, a.data(), a.size()) == n);
  CHECK(strex_decision_selected(r2, b.data(), b.size()) == n);
  CHECK(a == b);
  CHECK(strex_decision_branch(r1) == strex_decision_branch(r2));
  CHECK(strex_decision_alpha_hat(r1) == strex_decision_alpha_hat(r2));
  CHECK(strex_decide(strex_decision_alpha_hat(r1), strex_decision_alpha_hat_c(r1), 0.01, 0.99) ==
        strex_decision_branch(r1));
  bool has0 = false, has3 = false;
  for (std::size_t i = 0; i < n; ++i) {
    has0 |= a[i] == 0;
    has3 |= a[i] == 3;
  }
  CHECK(has0);
  CHECK(has3);

  const fs::path dir = scratch();
  const std::string csv = (dir / "one.csv").string(), json = (dir / "one.json").string();
  CHECK(strex_decision_write(r1, cfg, csv.c_str(), json.c_str()) == STREX_OK);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "phenotype_id,branch,alpha_hat,alpha_hat_c,n_selected,selected,wall_time,error");
  CHECK(fs::file_size(json) > 0);

  strex_decision_free(r1);
  strex_decision_free(r2);
  strex_config_free(cfg);
  strex_dataset_free(d);
}

TEST_CASE("decide through the C interface") {
  CHECK(strex_decide(0.0357, 0.0370, 0.02, 0.04) == STREX_BRANCH_CONFIDENCE);
  CHECK(strex_decide(0.0476, 1.0, 0.02, 0.04) == STREX_BRANCH_FALLBACK);
  CHECK(strex_decide(0.03, 0.5, 0.02, 0.04) == STREX_BRANCH_ORDINARY);
}

TEST_CASE("bench through the C interface") {
  strex_config* cfg = nullptr;
  REQUIRE(strex_config_new(&cfg) == STREX_OK);
  strex_bench* b = nullptr;
  REQUIRE(strex_bench_run(R"({"n": 40, "p": 30, "p1": 2, "snr": 2})", 2, "ordinary,confidence", "1,2", cfg,
                          &b) == STREX_OK);
  CHECK(strex_bench_rows(b) == 8);
  CHECK(strex_bench_failures(b) == 0);
  CHECK(strex_bench_num_summaries(b) == 4);
  double snr = 0, fdp = 0, se = 0, ah = 0, tpp = 0;
  CHECK(strex_bench_summary(b, 3, &snr, &fdp, &se, &ah, &tpp) == STREX_OK);
  CHECK(snr == 2.0);
  CHECK(strex_bench_summary(b, 4, &snr, &fdp, &se, &ah, &tpp) == STREX_E_INVALID_ARGUMENT);
  strex_bench_free(b);
  CHECK(strex_bench_run("{\"n\": 40}", 1, "lasso", nullptr, cfg, &b) != STREX_OK);
  strex_config_free(cfg);
}

}  // TEST_SUITE
