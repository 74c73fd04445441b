#include "screentrex/simbench.hpp"

#include "screentrex/error.hpp"
#include "screentrex/experiments.hpp"
#include "screentrex/fallback.hpp"
#include "screentrex/parallel.hpp"
#include "screentrex/rng.hpp"
#include "screentrex/screen.hpp"

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace strex {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rounded(double v) { return std::stod(format_real(v)); }

constexpr int kMaxColumnRetries = 50;

// Latent AR(1) Gaussian across columns, cut at Hardy-Weinberg genotype
// quantiles of a per-column minor-allele frequency.
Eigen::MatrixXd genotype_design(const SimSpec& spec, CounterRng& rng) {
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.p);
  const boost::math::normal_distribution<double> std_normal;
  const double rho = spec.corr_rho;
  const double innov = std::sqrt(1.0 - rho * rho);

  Eigen::MatrixXd g(n, p);
  Eigen::VectorXd latent(n), prev(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double maf = spec.maf_lo + (spec.maf_hi - spec.maf_lo) * rng.uniform();
    const double cut0 = boost::math::quantile(std_normal, (1.0 - maf) * (1.0 - maf));
    const double cut1 = boost::math::quantile(std_normal, 1.0 - maf * maf);
    bool varied = false;
    for (int attempt = 0; attempt < kMaxColumnRetries && !varied; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double e = rng.normal();
        latent(i) = j == 0 ? e : rho * prev(i) + innov * e;
        g(i, j) = latent(i) < cut0 ? 0.0 : (latent(i) < cut1 ? 1.0 : 2.0);
      }
      varied = (g.col(j).array() != g(0, j)).any();
    }
    if (!varied)
      throw Error(ErrorCode::ZeroVariance,
                  "genotype column " + std::to_string(j + 1) + " stayed constant after retries");
    prev = latent;
  }
  return g;
}

double sample_variance(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

}  // namespace

void SimSpec::validate() const {
  if (n < 3 || p < 1) throw Error(ErrorCode::InvalidArgument, "simulation needs n >= 3 and p >= 1");
  if (p1 > p) throw Error(ErrorCode::InvalidArgument, "p1 exceeds p");
  if (!(snr > 0.0)) throw Error(ErrorCode::InvalidArgument, "snr must be positive");
  if (design == Design::Genotype) {
    if (!(maf_lo > 0.0 && maf_lo <= maf_hi && maf_hi <= 0.5))
      throw Error(ErrorCode::InvalidArgument, "maf range must satisfy 0 < lo <= hi <= 0.5");
    if (!(corr_rho > -1.0 && corr_rho < 1.0))
      throw Error(ErrorCode::InvalidArgument, "corr_rho must lie in (-1, 1)");
  }
  if (!(case_fraction >= 0.0 && case_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "case_fraction must lie in [0, 1)");
}

void SimSpec::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "simulation spec must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") n = value.get<std::size_t>();
      else if (key == "p") p = value.get<std::size_t>();
      else if (key == "p1") p1 = value.get<std::size_t>();
      else if (key == "snr") snr = value.get<double>();
      else if (key == "design") {
        const auto d = value.get<std::string>();
        if (d == "gaussian") design = Design::Gaussian;
        else if (d == "genotype") design = Design::Genotype;
        else throw Error(ErrorCode::Parse, "unknown design '" + d + "'");
      }
      else if (key == "maf_range") {
        maf_lo = value.at(0).get<double>();
        maf_hi = value.at(1).get<double>();
      }
      else if (key == "corr_rho") corr_rho = value.get<double>();
      else if (key == "case_fraction") case_fraction = value.get<double>();
      else if (key == "beta_value") beta_value = value.get<double>();
      else if (key == "seed") seed = value.get<std::uint64_t>();
      else throw Error(ErrorCode::Parse, "unknown spec key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad spec value: ") + e.what());
  }
}

nlohmann::json SimSpec::to_json() const {
  nlohmann::json j{{"n", n},       {"p", p},
                   {"p1", p1},     {"snr", rounded(snr)},
                   {"design", design == Design::Gaussian ? "gaussian" : "genotype"},
                   {"beta_value", rounded(beta_value)},
                   {"seed", seed}};
  if (design == Design::Genotype) {
    j["maf_range"] = {rounded(maf_lo), rounded(maf_hi)};
    j["corr_rho"] = rounded(corr_rho);
  }
  if (case_fraction > 0.0) j["case_fraction"] = rounded(case_fraction);
  return j;
}

TruthedDataset simulate(const SimSpec& spec) {
  spec.validate();
  CounterRng design_rng(split_seed(spec.seed, 1));
  CounterRng support_rng(split_seed(spec.seed, 2));
  CounterRng noise_rng(split_seed(spec.seed, 3));

  Eigen::MatrixXd x;
  if (spec.design == Design::Gaussian) {
    x = generate_dummies(spec.n, spec.p, split_seed(spec.seed, 1));
  } else {
    x = genotype_design(spec, design_rng);
  }

  // Partial Fisher-Yates draw of the support.
  std::vector<std::size_t> idx(spec.p);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < spec.p1; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(support_rng.below(spec.p - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::size_t> support(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(spec.p1));
  std::sort(support.begin(), support.end());

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.p));
  for (std::size_t j : support) beta(static_cast<Eigen::Index>(j)) = spec.beta_value;
  const Eigen::VectorXd signal = x * beta;
  const double var_signal = sample_variance(signal);
  // Without signal the response is unit-variance noise.
  const double sigma2 = var_signal > 0.0 ? var_signal / spec.snr : 1.0;
  const double sigma = std::sqrt(sigma2);

  Eigen::VectorXd y(signal.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = signal(i) + sigma * noise_rng.normal();

  if (spec.case_fraction > 0.0) {
    const auto n = spec.n;
    auto cases = static_cast<std::size_t>(std::llround(spec.case_fraction * static_cast<double>(n)));
    cases = std::clamp<std::size_t>(cases, 1, n - 1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return y(static_cast<Eigen::Index>(a)) > y(static_cast<Eigen::Index>(b));
    });
    Eigen::VectorXd status = Eigen::VectorXd::Zero(y.size());
    for (std::size_t i = 0; i < cases; ++i) status(static_cast<Eigen::Index>(order[i])) = 1.0;
    y = std::move(status);
  }

  return TruthedDataset{Dataset(std::move(x), std::move(y)), std::move(support), std::move(beta),
                        sigma2};
}

const char* to_string(BenchMethod m) noexcept {
  switch (m) {
    case BenchMethod::Ordinary: return "ordinary";
    case BenchMethod::Confidence: return "confidence";
    case BenchMethod::Fallback: return "fallback";
  }
  return "unknown";
}

BenchMethod parse_bench_method(const std::string& s) {
  if (s == "ordinary") return BenchMethod::Ordinary;
  if (s == "confidence") return BenchMethod::Confidence;
  if (s == "fallback") return BenchMethod::Fallback;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "'");
}

MetricRow score(std::span<const std::size_t> selected, const TruthedDataset& truth) {
  MetricRow row;
  std::size_t hits = 0;
  for (std::size_t j : selected)
    hits += std::binary_search(truth.support.begin(), truth.support.end(), j);
  row.n_selected = selected.size();
  row.n_false = selected.size() - hits;
  row.fdp = static_cast<double>(row.n_false) / static_cast<double>(std::max<std::size_t>(row.n_selected, 1));
  row.tpp = static_cast<double>(hits) / static_cast<double>(std::max<std::size_t>(truth.support.size(), 1));
  row.selected.assign(selected.begin(), selected.end());
  return row;
}

std::size_t nhg_urn_sample(std::size_t nulls, std::size_t dummies, std::size_t stops,
                           std::uint64_t seed) {
  if (stops < 1 || stops > dummies)
    throw Error(ErrorCode::InvalidArgument, "urn needs dummies >= stops >= 1");
  CounterRng rng(seed);
  std::size_t nulls_left = nulls, dummies_left = dummies, drawn_nulls = 0, drawn_dummies = 0;
  while (drawn_dummies < stops) {
    if (rng.below(nulls_left + dummies_left) < nulls_left) {
      --nulls_left;
      ++drawn_nulls;
    } else {
      --dummies_left;
      ++drawn_dummies;
    }
  }
  return drawn_nulls;
}

MethodSummary summarize(std::span<const MetricRow> rows, BenchMethod method, double snr) {
  std::vector<double> fdp, ah, tpp, sel, fal, wall;
  for (const auto& r : rows) {
    if (r.method != method || r.snr != snr) continue;
    fdp.push_back(r.fdp);
    ah.push_back(r.alpha_hat);
    tpp.push_back(r.tpp);
    sel.push_back(static_cast<double>(r.n_selected));
    fal.push_back(static_cast<double>(r.n_false));
    wall.push_back(r.wall_time);
  }
  MethodSummary s;
  s.method = method;
  s.snr = snr;
  s.reps = fdp.size();
  const auto f = mean_se(fdp), a = mean_se(ah), t = mean_se(tpp), w = mean_se(wall);
  s.mean_fdp = f.mean;
  s.se_fdp = f.se;
  s.mean_alpha_hat = a.mean;
  s.se_alpha_hat = a.se;
  s.mean_tpp = t.mean;
  s.se_tpp = t.se;
  s.mean_selected = mean_se(sel).mean;
  s.mean_false = mean_se(fal).mean;
  s.mean_wall_time = w.mean;
  s.se_wall_time = w.se;
  return s;
}

Campaign mc_campaign(const SimSpec& spec, std::size_t reps, std::span<const BenchMethod> methods,
                     const ScreenConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be at least 1");
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods requested");
  const bool want_screen = std::any_of(methods.begin(), methods.end(), [](BenchMethod m) {
    return m != BenchMethod::Fallback;
  });

  std::vector<std::vector<MetricRow>> per_rep(reps);
  std::vector<std::string> errors(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t rep) {
    try {
      SimSpec rep_spec = spec;
      rep_spec.seed = split_seed(spec.seed, rep);
      const TruthedDataset truth = simulate(rep_spec);
      const std::uint64_t master = split_seed(cfg.master_seed ^ rep_spec.seed, rep);
      const ExperimentPlan plan = ExperimentPlan::screen(spec.p, master, cfg.k);

      ScreenResult ordinary, confidence;
      double t_ordinary = 0.0, t_confidence = 0.0;
      if (want_screen) {
        const auto start = Clock::now();
        const StandardizedDataset s = standardize(truth.dataset);
        const AggregateVotes votes = aggregate(run_experiments(s, plan, 1));
        ordinary = select_ordinary(votes);
        t_ordinary = seconds_since(start);
        confidence.method = Method::Confidence;
        if (!votes.dummy_pool.empty())
          confidence = select_confidence(votes, ordinary.r, GammaGrid{}, cfg.resamples,
                                         bootstrap_seed(master));
        t_confidence = seconds_since(start);
      }

      for (BenchMethod m : methods) {
        MetricRow row;
        switch (m) {
          case BenchMethod::Ordinary:
            row = score(ordinary.selected, truth);
            row.alpha_hat = ordinary.alpha_hat;
            row.wall_time = t_ordinary;
            break;
          case BenchMethod::Confidence:
            row = score(confidence.selected, truth);
            row.alpha_hat = confidence.alpha_hat;
            row.wall_time = t_confidence;
            break;
          case BenchMethod::Fallback: {
            const auto start = Clock::now();
            const StandardizedDataset s = standardize(truth.dataset);
            const CalibrationResult cal = calibrate_trex(s, cfg.alpha, plan, 1);
            const double elapsed = seconds_since(start);
            row = score(cal.selected, truth);
            row.alpha_hat = cfg.alpha;
            row.wall_time = elapsed;
            break;
          }
        }
        row.rep = rep;
        row.snr = spec.snr;
        row.method = m;
        per_rep[rep].push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      per_rep[rep].clear();
      errors[rep] = "rep " + std::to_string(rep) + ": " + e.what();
    }
  });

  Campaign c;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    if (!errors[rep].empty()) {
      ++c.failures;
      c.failure_messages.push_back(errors[rep]);
      continue;
    }
    for (auto& row : per_rep[rep]) c.rows.push_back(std::move(row));
  }
  for (BenchMethod m : methods) c.summaries.push_back(summarize(c.rows, m, spec.snr));
  return c;
}

Campaign snr_sweep(const SimSpec& spec, std::span<const double> snr_grid, std::size_t reps,
                   std::span<const BenchMethod> methods, const ScreenConfig& cfg) {
  if (snr_grid.empty()) return mc_campaign(spec, reps, methods, cfg);
  Campaign all;
  for (double snr : snr_grid) {
    SimSpec s = spec;
    s.snr = snr;
    Campaign c = mc_campaign(s, reps, methods, cfg);
    all.failures += c.failures;
    for (auto& m : c.failure_messages) all.failure_messages.push_back(std::move(m));
    for (auto& r : c.rows) all.rows.push_back(std::move(r));
    for (auto& s2 : c.summaries) all.summaries.push_back(s2);
  }
  return all;
}

void write_campaign_csv(std::ostream& os, const Campaign& c) {
  os << "rep,snr,method,fdp,tpp,alpha_hat,n_selected,n_false,wall_time\n";
  for (const auto& r : c.rows) {
    os << r.rep << ',' << format_real(r.snr) << ',' << to_string(r.method) << ','
       << format_real(r.fdp) << ',' << format_real(r.tpp) << ',' << format_real(r.alpha_hat) << ','
       << r.n_selected << ',' << r.n_false << ',' << format_real(r.wall_time) << '\n';
  }
}

nlohmann::json campaign_json(const Campaign& c, const SimSpec& spec, std::size_t reps) {
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : c.summaries) {
    summaries.push_back({{"method", to_string(s.method)},
                         {"snr", rounded(s.snr)},
                         {"reps", s.reps},
                         {"mean_fdp", rounded(s.mean_fdp)},
                         {"se_fdp", rounded(s.se_fdp)},
                         {"mean_alpha_hat", rounded(s.mean_alpha_hat)},
                         {"se_alpha_hat", rounded(s.se_alpha_hat)},
                         {"mean_tpp", rounded(s.mean_tpp)},
                         {"se_tpp", rounded(s.se_tpp)},
                         {"mean_selected", rounded(s.mean_selected)},
                         {"mean_false", rounded(s.mean_false)},
                         {"mean_wall_time", rounded(s.mean_wall_time)},
                         {"se_wall_time", rounded(s.se_wall_time)}});
  }
  return {{"spec", spec.to_json()},
          {"reps", reps},
          {"failures", c.failures},
          {"failure_messages", c.failure_messages},
          {"summaries", std::move(summaries)}};
}

}  // namespace strex
