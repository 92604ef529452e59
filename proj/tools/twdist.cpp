// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface: tabulate / density / sample / compare / verify.
// Exit codes: 0 success, 1 verification or runtime failure, 2 invalid
// configuration, 3 resource guard.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "twdist/distributions.hpp"
#include "twdist/ensembles.hpp"
#include "twdist/verify.hpp"
#include "twdist/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twdist;

namespace {

struct CommonOpts {
  std::string out = "out";
  std::string cache_dir = "cache";
  std::string format = "csv";
  std::uint64_t seed = 20260810;  // default validation seed used by the acceptance suite
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--out", c.out, "Output directory")->envname("TWDIST_OUT");
  cmd->add_option("--cache-dir", c.cache_dir, "Painleve state cache directory")
      ->envname("TWDIST_CACHE_DIR");
  cmd->add_option("--format", c.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->envname("TWDIST_FORMAT");
  cmd->add_option("--seed", c.seed, "Master seed")->envname("TWDIST_SEED");
}

void setup_cache(StateCache& cache, const CommonOpts& c) {
  if (!c.cache_dir.empty()) cache.set_disk_cache(c.cache_dir);
}

void report_cache(const StateCache& cache) {
  auto st = cache.stats();
  if (st.stale > 0)
    std::cerr << "notice: " << st.stale
              << " cached state(s) had a stale version or config hash; recomputed\n";
}

json sidecar_base(const StateCache& cache, const CommonOpts& c, const char* command) {
  json j;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(cache.config().hash()));
  j["version"] = kCodeVersion;
  j["config_hash"] = hash;
  j["command"] = command;
  j["seed"] = c.seed;
  return j;
}

std::vector<double> clip_grid(const std::vector<double>& grid, double smin, double smax) {
  std::vector<double> out;
  for (double s : grid)
    if (s >= smin - 1e-12 && s <= smax + 1e-12) out.push_back(s);
  if (out.size() < 2) throw CLI::ValidationError("--s-min/--s-max leave an empty grid");
  return out;
}

int cmd_tabulate(const CommonOpts& c, std::vector<int> betas, int m_max, double smin,
                 double smax) {
  StateCache cache((SolverConfig()));
  setup_cache(cache, c);
  fs::create_directories(c.out);
  std::vector<double> grid = clip_grid(cache.base().grid, smin, smax);
  for (int beta : betas) {
    const int mm = std::min(m_max, max_order_m(beta));
    DistributionTable t = build_table(beta, mm, grid, cache);
    char name[64];
    std::snprintf(name, sizeof name, "table_beta%d", beta);
    if (c.format == "csv") {
      export_table_csv(t, cache.config().hash(), fs::path(c.out) / (std::string(name) + ".csv"));
      json j = sidecar_base(cache, c, "tabulate");
      j["beta"] = beta;
      j["m_max"] = mm;
      j["rows"] = t.grid.size();
      std::ofstream os(fs::path(c.out) / (std::string(name) + ".meta.json"));
      os << j.dump(2) << "\n";
    } else {
      export_table_json(t, cache.config().hash(), fs::path(c.out) / (std::string(name) + ".json"));
    }
    std::printf("tabulate: beta=%d m_max=%d -> %s/%s.%s\n", beta, mm, c.out.c_str(), name,
                c.format.c_str());
  }
  report_cache(cache);
  return 0;
}

int cmd_density(const CommonOpts& c, std::vector<int> betas, int m_max, double smin,
                double smax) {
  StateCache cache((SolverConfig()));
  setup_cache(cache, c);
  fs::create_directories(c.out);
  std::vector<double> grid = clip_grid(cache.base().grid, smin, smax);
  for (int beta : betas) {
    const int mm = std::min(m_max, max_order_m(beta));
    DistributionTable t = build_table(beta, mm, grid, cache);
    char name[64];
    std::snprintf(name, sizeof name, "density_beta%d", beta);
    fs::path path = fs::path(c.out) / (std::string(name) + (c.format == "csv" ? ".csv" : ".json"));
    if (c.format == "csv") {
      std::ofstream os(path, std::ios::trunc);
      char line[256];
      std::snprintf(line, sizeof line, "# twdist densities, version=%s, config_hash=%016llx, beta=%d\n",
                    kCodeVersion, static_cast<unsigned long long>(cache.config().hash()), beta);
      os << line << "s";
      for (int m = 1; m <= mm; ++m) {
        std::snprintf(line, sizeof line, ",f%d(m=%d)", beta, m);
        os << line;
      }
      os << "\n";
      for (std::size_t i = 0; i < t.grid.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g", t.grid[i]);
        os << line;
        for (int m = 1; m <= mm; ++m) {
          std::snprintf(line, sizeof line, ",%.17g", t.pdf[m - 1][i]);
          os << line;
        }
        os << "\n";
      }
    } else {
      json j = sidecar_base(cache, c, "density");
      j["beta"] = beta;
      j["s"] = t.grid;
      for (int m = 1; m <= mm; ++m) j["pdf"][std::to_string(m)] = t.pdf[m - 1];
      std::ofstream os(path);
      os << j.dump(2) << "\n";
    }
    std::printf("density: beta=%d m_max=%d -> %s\n", beta, mm, path.string().c_str());
  }
  report_cache(cache);
  return 0;
}

int cmd_sample(const CommonOpts& c, const std::string& ensemble, int beta, int n, int p,
               int k, int replicates, const std::string& model, double budget) {
  fs::create_directories(c.out);
  SampleBatch batch;
  json j;
  if (ensemble == "wishart") {
    WishartSpec ws;
    ws.p = p;
    ws.n = n;
    ws.k = k;
    ws.replicates = replicates;
    ws.master_seed = c.seed;
    ws.validate();
    const double cost = sampling_cost_estimate(ws);
    if (cost > budget) {
      std::fprintf(stderr, "resource guard: estimated %.3g flops exceeds budget %.3g\n",
                   cost, budget);
      return 3;
    }
    batch = sample_wishart(ws);
    j["ensemble"] = "wishart";
    j["p"] = p;
    j["n"] = n;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(ws.hash()));
    j["spec_hash"] = hash;
  } else {
    EnsembleSpec spec;
    spec.beta = beta;
    spec.n = n;
    spec.k = k;
    spec.replicates = replicates;
    spec.master_seed = c.seed;
    spec.model = model == "dense" ? EnsembleModel::Dense : EnsembleModel::Tridiagonal;
    spec.validate();
    const double cost = sampling_cost_estimate(spec);
    if (cost > budget) {
      std::fprintf(stderr, "resource guard: estimated %.3g flops exceeds budget %.3g\n",
                   cost, budget);
      return 3;
    }
    batch = sample_gaussian(spec);
    j["ensemble"] = "gaussian";
    j["beta"] = beta;
    j["n"] = n;
    j["model"] = model;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(spec.hash()));
    j["spec_hash"] = hash;
  }
  j["version"] = kCodeVersion;
  j["command"] = "sample";
  j["k"] = k;
  j["replicates"] = replicates;
  j["seed"] = c.seed;
  export_batch_csv(batch, fs::path(c.out) / "samples.csv");
  std::ofstream os(fs::path(c.out) / "samples.json");
  os << j.dump(2) << "\n";
  std::printf("sample: %d replicates -> %s/samples.csv\n", replicates, c.out.c_str());
  return 0;
}

int cmd_compare(const CommonOpts& c, int p, int n, int k, int replicates, double budget) {
  StateCache cache((SolverConfig()));
  setup_cache(cache, c);
  fs::create_directories(c.out);
  WishartSpec ws;
  ws.p = p;
  ws.n = n;
  ws.k = k;
  ws.replicates = replicates;
  ws.master_seed = c.seed;
  ws.validate();
  if (sampling_cost_estimate(ws) > budget) {
    std::fprintf(stderr, "resource guard: estimated %.3g flops exceeds budget %.3g\n",
                 sampling_cost_estimate(ws), budget);
    return 3;
  }
  SampleBatch batch = sample_wishart(ws);
  const std::vector<double> pcts = {0.01, 0.05, 0.10, 0.30, 0.50, 0.70, 0.90, 0.95, 0.99};
  std::vector<std::vector<double>> quant(k);
  for (int m = 1; m <= k; ++m)
    for (double q : pcts) quant[m - 1].push_back(quantile(1, m, q, cache));
  PercentileReport rep = percentile_table(batch, quant, pcts);

  fs::path path = fs::path(c.out) / "compare.csv";
  std::ofstream os(path, std::ios::trunc);
  char line[512];
  std::snprintf(line, sizeof line, "# twdist percentile comparison, version=%s, config_hash=%016llx, p=%d, n=%d, replicates=%d, seed=%llu\n",
                kCodeVersion, static_cast<unsigned long long>(cache.config().hash()), p, n,
                replicates, static_cast<unsigned long long>(c.seed));
  os << line;
  os << "F1_percentile";
  for (int m = 1; m <= k; ++m) {
    std::snprintf(line, sizeof line, ",lambda%d,lambda%d_se", m, m);
    os << line;
  }
  os << "\n";
  std::printf("F1-pct ");
  for (int m = 1; m <= k; ++m) std::printf("  lambda%d (+/- se)   ", m);
  std::printf("\n");
  for (std::size_t jx = 0; jx < pcts.size(); ++jx) {
    std::snprintf(line, sizeof line, "%.2f", pcts[jx]);
    os << line;
    std::printf("%6.2f ", pcts[jx]);
    for (int m = 1; m <= k; ++m) {
      std::snprintf(line, sizeof line, ",%.17g,%.17g", rep.proportions[m - 1][jx],
                    rep.std_errors[m - 1][jx]);
      os << line;
      std::printf("  %.3f (%.4f)   ", rep.proportions[m - 1][jx], rep.std_errors[m - 1][jx]);
    }
    os << "\n";
    std::printf("\n");
  }
  json j = sidecar_base(cache, c, "compare");
  j["p"] = p;
  j["n"] = n;
  j["k"] = k;
  j["replicates"] = replicates;
  std::ofstream ms(fs::path(c.out) / "compare.meta.json");
  ms << j.dump(2) << "\n";
  report_cache(cache);
  return 0;
}

int cmd_verify(const CommonOpts& c, bool fast, double tol_scale) {
  StateCache cache((SolverConfig()));
  setup_cache(cache, c);
  VerifyOptions opt;
  opt.fast = fast;
  opt.tol_scale = tol_scale;
  opt.seed = c.seed;
  std::vector<CheckResult> results = run_verification(cache, opt);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-24s measured %.6g  bound %.6g  %s\n", r.pass ? " OK " : "FAIL",
                r.name.c_str(), r.measured, r.bound, r.detail.c_str());
    if (!r.pass) ++failures;
  }
  report_cache(cache);
  if (failures > 0) {
    std::printf("%d check(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu checks passed\n", results.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge eigenvalue distributions F_beta(s,m) via Painleve II, with a "
               "Fredholm-determinant oracle and Monte Carlo validation"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  CommonOpts c_tab, c_den, c_sam, c_cmp, c_ver;
  std::vector<int> betas = {1, 2, 4};
  int m_max = 2, m_max_den = 4;
  double smin = -10.0, smax = 6.0, smin_d = -10.0, smax_d = 6.0;

  auto* tab = app.add_subcommand("tabulate", "Write F_beta(s,m) cdf/pdf tables");
  add_common(tab, c_tab);
  tab->add_option("--beta", betas, "Ensemble betas (subset of 1,2,4)")
      ->envname("TWDIST_BETA");
  tab->add_option("--m-max", m_max, "Largest m per beta (clipped to the cap)")
      ->envname("TWDIST_M_MAX");
  tab->add_option("--s-min", smin, "Left edge of the output grid");
  tab->add_option("--s-max", smax, "Right edge of the output grid");

  std::vector<int> betas_d = {1, 2, 4};
  auto* den = app.add_subcommand("density", "Write plot-ready density grids");
  add_common(den, c_den);
  den->add_option("--beta", betas_d, "Ensemble betas");
  den->add_option("--m-max", m_max_den, "Largest m per beta (clipped to the cap)");
  den->add_option("--s-min", smin_d, "Left edge of the output grid");
  den->add_option("--s-max", smax_d, "Right edge of the output grid");

  std::string ensemble = "gaussian", model = "tridiagonal";
  int beta_s = 1, n_s = 200, p_s = 100, k_s = 1, reps_s = 1000;
  double budget = 2e12;
  auto* sam = app.add_subcommand("sample", "Monte Carlo sampling of ensembles");
  add_common(sam, c_sam);
  sam->add_option("--ensemble", ensemble, "gaussian or wishart")
      ->check(CLI::IsMember({"gaussian", "wishart"}));
  sam->add_option("--beta", beta_s, "Gaussian ensemble beta");
  sam->add_option("--n", n_s, "Matrix size (gaussian) / degrees of freedom (wishart)");
  sam->add_option("--wishart-p", p_s, "Wishart variate count p");
  sam->add_option("--k", k_s, "Top eigenvalues kept");
  sam->add_option("--replicates", reps_s, "Replicates")->envname("TWDIST_REPLICATES");
  sam->add_option("--model", model, "gaussian matrix model")
      ->check(CLI::IsMember({"dense", "tridiagonal"}));
  sam->add_option("--budget", budget, "Resource guard (estimated flops)");

  int p_c = 100, n_c = 100, k_c = 3, reps_c = 10000;
  double budget_c = 2e12;
  auto* cmp = app.add_subcommand("compare", "Percentile comparison report (Table-1 layout)");
  add_common(cmp, c_cmp);
  cmp->add_option("--wishart-p", p_c, "Wishart variate count p");
  cmp->add_option("--wishart-n", n_c, "Wishart degrees of freedom n");
  cmp->add_option("--k", k_c, "Eigenvalues compared");
  cmp->add_option("--replicates", reps_c, "Replicates")->envname("TWDIST_REPLICATES");
  cmp->add_option("--budget", budget_c, "Resource guard (estimated flops)");

  bool fast = false;
  double tol_scale = 1.0;
  auto* ver = app.add_subcommand("verify", "Run the invariant suite");
  add_common(ver, c_ver);
  ver->add_flag("--fast", fast, "Skip the Monte Carlo checks");
  ver->add_option("--tol-scale", tol_scale, "Scale every bound (sensitivity runs)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tab->parsed()) return cmd_tabulate(c_tab, betas, m_max, smin, smax);
    if (den->parsed()) return cmd_density(c_den, betas_d, m_max_den, smin_d, smax_d);
    if (sam->parsed())
      return cmd_sample(c_sam, ensemble, beta_s, n_s, p_s, k_s, reps_s, model, budget);
    if (cmp->parsed()) return cmd_compare(c_cmp, p_c, n_c, k_c, reps_c, budget_c);
    if (ver->parsed()) return cmd_verify(c_ver, fast, tol_scale);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
