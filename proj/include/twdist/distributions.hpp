// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <vector>

#include "twdist/painleve.hpp"
#include "twdist/parallel.hpp"

namespace twdist {

// lambda-tilde reparametrization 2l - l^2, written so that it is exactly
// symmetric about lambda = 1 in floating point.
inline double lambda_tilde(double lambda) {
  const double e = 1.0 - lambda;
  return 1.0 - e * e;
}

// Solve-on-demand store of PainleveState per lambda. The lambda = 1 base
// carries the q1 block; lambda >= 0.95 states are solved as corrections
// against it. Thread-safe; states are immutable once built.
class StateCache {
 public:
  explicit StateCache(SolverConfig config);
  const SolverConfig& config() const { return config_; }
  const PainleveState& base();
  const PainleveState& at(double lambda);

  // Persist states under dir as versioned binary files keyed by lambda;
  // entries whose header hash disagrees with config().hash() are recomputed.
  void set_disk_cache(std::filesystem::path dir);

  struct Stats {
    int disk_hits = 0;
    int stale = 0;  // present but version/config mismatch, recomputed
    int solves = 0;
  };
  Stats stats() const;

 private:
  std::filesystem::path state_path(long long key) const;
  SolverConfig config_;
  std::mutex mu_;
  PainleveState base_;
  bool base_ready_ = false;
  std::map<long long, PainleveState> states_;
  std::filesystem::path disk_dir_;
  bool disk_enabled_ = false;
  Stats stats_;
};

// Generating determinants whose lambda-derivatives at 1 yield the m-th
// largest eigenvalue laws. d2 is exp(-I0); d1 and d4 are assembled from the
// lambda-tilde state (beta=1) or the lambda state (beta=4) with the
// hyperbolic factors evaluated in a cancellation-free form.
double d2(double s, double lambda, StateCache& cache);
double d1(double s, double lambda, StateCache& cache);  // lambda in [0,2)
double d4(double s, double lambda, StateCache& cache);  // lambda in [0,1]

enum class DerivMethod { Analytic, OneSidedFd };

struct LambdaDerivatives {
  int beta = 0;
  double s = 0;
  int order = 0;
  std::vector<double> values;  // d^k/dlambda^k D_beta^{1/2}|_{lambda=1}, k = 0..order
  DerivMethod method = DerivMethod::Analytic;
  bool converged = true;
  double last_delta = 0;  // spread of the last Richardson pair
};

// Derivatives of D_beta^{1/2} at lambda = 1. Orders 0 and 1 have analytic
// forms; higher orders use one-sided Richardson finite differences with the
// config's stencil. order <= 4.
LambdaDerivatives lambda_derivs(int beta, double s, int order, DerivMethod method,
                                StateCache& cache);

enum class Beta4Route { Direct, Interlacing };

// F_beta(s,m) by the telescoped derivative recurrence. m starts at 1 for the
// largest eigenvalue. beta = 4 can alternatively be served through the
// interlacing identity F4(s,m) = F1(s,2m).
double f_cdf(int beta, int m, double s, StateCache& cache,
             Beta4Route route = Beta4Route::Direct);

// Densities: analytic closed forms for m = 1, centered differentiation of the
// cdf for m >= 2.
double f_pdf(int beta, int m, double s, StateCache& cache);

// Inverse cdf by bracketing bisection; |F(s*) - p| <= 1e-8. Throws
// std::domain_error when p is outside the range attained on the grid.
double quantile(int beta, int m, double p, StateCache& cache);

int max_order_m(int beta);  // certification cap on m per beta

// Exact rational with 64-bit numerator/denominator, sufficient for the
// recursion sequence up to j = 20.
struct Rational {
  long long num = 0;
  long long den = 1;
  Rational() = default;
  Rational(long long n, long long d);
  Rational operator*(const Rational& o) const;
  Rational operator+(const Rational& o) const;
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

struct LemmaSequence {
  std::vector<Rational> a;  // a_0 .. a_jmax per the recursion
  std::vector<Rational> b;  // b_j = a_j / j!
};

LemmaSequence lemma_a_seq(int j_max);  // j_max <= 20

// Residual of the even/odd derivative identity of f(s,lambda) =
// 1 - sqrt(lambda/(2-lambda)) tanh(mu(s,lambda-tilde)/2) at lambda = 1,
// estimated with one-sided Richardson differences. n in {0,1}.
double flemma_check(double s, int n, StateCache& cache);

struct DistributionTable {
  int beta = 0;
  int m_max = 0;
  std::vector<double> grid;
  std::vector<std::vector<double>> cdf;  // [m-1][i]
  std::vector<std::vector<double>> pdf;
};

DistributionTable build_table(int beta, int m_max, std::vector<double> grid,
                              StateCache& cache, Exec exec = Exec::Parallel,
                              Beta4Route route = Beta4Route::Direct);

void export_table_csv(const DistributionTable& t, std::uint64_t config_hash,
                      const std::filesystem::path& path);
void export_table_json(const DistributionTable& t, std::uint64_t config_hash,
                       const std::filesystem::path& path);

}  // namespace twdist
