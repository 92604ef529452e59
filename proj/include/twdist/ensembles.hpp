// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "twdist/parallel.hpp"

namespace twdist {

enum class EnsembleModel { Dense, Tridiagonal };

struct EnsembleSpec {
  int beta = 1;            // 1, 2, 4
  int n = 100;             // matrix size
  int replicates = 1000;
  int k = 1;               // top eigenvalues kept per replicate
  std::uint64_t master_seed = 1;
  EnsembleModel model = EnsembleModel::Tridiagonal;

  void validate() const;
  std::uint64_t hash() const;
};

struct WishartSpec {
  int p = 100;  // variates
  int n = 100;  // degrees of freedom, n >= p
  int replicates = 1000;
  int k = 1;
  std::uint64_t master_seed = 1;

  void validate() const;
  std::uint64_t hash() const;
};

// Edge-rescaled top-k eigenvalues, one sorted-descending row per replicate.
struct SampleBatch {
  std::uint64_t spec_hash = 0;
  std::uint64_t master_seed = 0;
  int k = 0;
  std::vector<std::vector<double>> rows;

  // all m-th values (m = 1-based), in replicate order
  std::vector<double> column(int m) const;
};

// Symmetric tridiagonal matrix (diag size n, off size n-1).
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;
};

// k largest eigenvalues, descending: Sturm-count bisection brackets refined
// by safeguarded Newton steps on the characteristic polynomial.
std::vector<double> top_eigenvalues(const SymTridiag& t, int k);
// Dense symmetric path: Householder tridiagonalization, then as above.
// Throws std::invalid_argument if the matrix is not symmetric.
std::vector<double> top_eigenvalues(std::span<const double> dense_rowmajor, int n, int k);

// Edge rescaling (lambda - sqrt(2N)) / (2^{-1/2} N^{-1/6}); for beta = 4 the
// result additionally carries the 2^{2/3} convention factor so rescaled
// samples compare against F4 directly (see edge_rescale in ensembles.cpp).
double edge_rescale(double lam, int n, int beta);

// Rough flop estimate used by the CLI resource guard.
double sampling_cost_estimate(const EnsembleSpec& spec);
double sampling_cost_estimate(const WishartSpec& spec);

// Monte Carlo runs. Replicate i draws from rng_stream(master_seed, i), so
// results are bit-identical for any worker count.
SampleBatch sample_gaussian(const EnsembleSpec& spec, Exec exec = Exec::Parallel);
SampleBatch sample_wishart(const WishartSpec& spec, Exec exec = Exec::Parallel);

struct PercentileReport {
  std::vector<double> percentiles;
  std::vector<std::vector<double>> ordinates;   // [m-1][p]: reference quantiles used
  std::vector<std::vector<double>> proportions; // [m-1][p]
  std::vector<std::vector<double>> std_errors;  // [m-1][p]: binomial MC error
};

// Fraction of replicates whose m-th rescaled eigenvalue lies left of the
// reference quantile, for every (m, percentile) pair. quantiles[m-1][j] is
// the reference ordinate for percentile j.
PercentileReport percentile_table(const SampleBatch& batch,
                                  const std::vector<std::vector<double>>& quantiles,
                                  std::span<const double> percentiles);

// Kolmogorov-Smirnov sup distance between the empirical cdf of sample and cdf.
double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf);

void export_batch_csv(const SampleBatch& batch, const std::filesystem::path& path);

}  // namespace twdist
