// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "twdist/distributions.hpp"
#include "twdist/fredholm.hpp"

using namespace twdist;

namespace {

StateCache& cache() {
  static StateCache c{SolverConfig{}};
  return c;
}

}  // namespace

TEST_CASE("lambda_tilde is exactly symmetric about 1") {
  for (double d : {1e-1, 1e-3, 1e-6, 0.3}) {
    CHECK(lambda_tilde(1.0 - d) == lambda_tilde(1.0 + d));
  }
  CHECK(lambda_tilde(1.0) == 1.0);
  CHECK(lambda_tilde(0.0) == 0.0);
}

TEST_CASE("d2 basics") {
  for (double s : {-5.0, 0.0, 4.0}) CHECK(d2(s, 0.0, cache()) == 1.0);
  CHECK(std::abs(d2(5.0, 1.0, cache()) - 1.0) < 1e-8);
  CHECK_THROWS_AS(d2(0.0, 1.5, cache()), std::invalid_argument);
  CHECK_THROWS_AS(d2(-11.0, 1.0, cache()), std::out_of_range);
}

TEST_CASE("d2 against the Fredholm oracle") {
  for (double lam : {0.25, 0.5, 1.0})
    for (double s : {-4.0, -2.0, 0.0, 2.0})
      CHECK(std::abs(d2(s, lam, cache()) - fredholm_det(s, lam, 60)) < 5e-6);
}

TEST_CASE("d1 assembly and domain") {
  for (double s : {-3.0, 0.0, 2.0}) {
    CHECK(d1(s, 0.0, cache()) == doctest::Approx(1.0).epsilon(1e-12));
    // lambda = 0.5 maps to lambda-tilde = 0.75; assemble by hand
    const double lt = 0.75;
    const PainleveState& st = cache().at(lt);
    const double mu_t = st.j0(s);
    const double manual = std::exp(-st.i0(s)) *
                          (0.5 - 1.0 - std::cosh(mu_t) + std::sqrt(lt) * std::sinh(mu_t)) /
                          (0.5 - 2.0);
    CHECK(d1(s, 0.5, cache()) == doctest::Approx(manual).epsilon(1e-12));
    // reduction at lambda = 1
    CHECK(std::abs(d1(s, 1.0, cache()) -
                   d2(s, 1.0, cache()) * std::exp(-cache().base().j0(s))) < 1e-10);
  }
  CHECK_THROWS_AS(d1(0.0, 2.0, cache()), std::invalid_argument);
  CHECK_THROWS_AS(d1(0.0, -0.1, cache()), std::invalid_argument);
}

TEST_CASE("d4 assembly, ordering, reduction") {
  for (double s : {-4.0, -1.0, 1.0}) {
    CHECK(d4(s, 0.0, cache()) == 1.0);
    const double c = std::cosh(0.5 * cache().base().j0(s));
    CHECK(std::abs(d4(s, 1.0, cache()) - d2(s, 1.0, cache()) * c * c) < 1e-10);
    for (double lam : {0.25, 0.75, 1.0})
      CHECK(d4(s, lam, cache()) >= d2(s, lam, cache()));
  }
  CHECK_THROWS_AS(d4(0.0, 1.01, cache()), std::invalid_argument);
}

TEST_CASE("lambda_derivs: order zero, analytic vs FD, flags") {
  auto z = lambda_derivs(2, 0.0, 0, DerivMethod::Analytic, cache());
  CHECK(z.values[0] == doctest::Approx(std::exp(-0.5 * cache().base().i0(0.0))).epsilon(1e-15));

  for (double s : {-1.0, 0.0, 2.0}) {
    auto a = lambda_derivs(2, s, 1, DerivMethod::Analytic, cache());
    auto f = lambda_derivs(2, s, 1, DerivMethod::OneSidedFd, cache());
    CHECK(std::abs(a.values[1] - f.values[1]) < 5e-5);
    CHECK(f.converged);
  }
  // far-left: the square root's branch point enters the stencil and the
  // Richardson triple must flag non-convergence
  auto bad = lambda_derivs(2, -6.0, 1, DerivMethod::OneSidedFd, cache());
  CHECK_FALSE(bad.converged);

  CHECK_THROWS_AS(lambda_derivs(3, 0.0, 1, DerivMethod::Analytic, cache()),
                  std::invalid_argument);
  CHECK_THROWS_AS(lambda_derivs(2, 0.0, 5, DerivMethod::OneSidedFd, cache()),
                  std::invalid_argument);
  CHECK_THROWS_AS(lambda_derivs(2, 0.0, 2, DerivMethod::Analytic, cache()),
                  std::invalid_argument);
}

TEST_CASE("beta=1 order-1 closed form against the FD path") {
  // F1(s,2) = F1(s,1) + sqrt(D2) sinh(mu/2); the derivative underlying it
  // must match one-sided differencing of d1
  for (double s : {-1.0, 0.5, 2.0}) {
    auto a = lambda_derivs(1, s, 1, DerivMethod::Analytic, cache());
    auto f = lambda_derivs(1, s, 1, DerivMethod::OneSidedFd, cache());
    CHECK(std::abs(a.values[1] - f.values[1]) < 5e-5);
  }
}

TEST_CASE("f_cdf: telescoping, limits, ordering in m") {
  CHECK(std::abs(f_cdf(2, 1, 0.0, cache()) - d2(0.0, 1.0, cache())) < 1e-14);
  // F2(s,2) - F2(s,1) = -d/dlambda det(I - lambda K)|_1: cross-check the
  // analytic I1 route against central differences of the oracle (entire)
  for (double s : {-2.0, 0.0}) {
    auto dd = [&](double h) {
      return (fredholm_det(s, 1.0 + h, 60) - fredholm_det(s, 1.0 - h, 60)) / (2 * h);
    };
    const double rich = (4.0 * dd(0.05) - dd(0.1)) / 3.0;
    const double analytic = f_cdf(2, 2, s, cache()) - f_cdf(2, 1, s, cache());
    CHECK(std::abs(analytic - (-rich)) < 5e-6);
  }
  for (int beta : {1, 2, 4}) {
    const int mm = max_order_m(beta);
    CHECK(std::abs(f_cdf(beta, 1, 6.0, cache()) - 1.0) < 1e-8);
    // stochastic ordering: exact for the analytic columns, within the
    // certified FD accuracy once the order-m derivatives enter
    for (double s : {-4.0, -2.0, 0.0})
      for (int m = 1; m < mm; ++m) {
        const double slack = (m + 1 <= 2) ? 1e-9 : 5e-4;
        CHECK(f_cdf(beta, m + 1, s, cache()) >= f_cdf(beta, m, s, cache()) - slack);
      }
    CHECK_THROWS_AS(f_cdf(beta, mm + 1, 0.0, cache()), std::invalid_argument);
  }
  CHECK_THROWS_AS(f_cdf(3, 1, 0.0, cache()), std::invalid_argument);
  CHECK_THROWS_AS(f_cdf(2, 0, 0.0, cache()), std::invalid_argument);
}

TEST_CASE("interlacing identity") {
  double w1 = 0, w2 = 0;
  for (double s = -8.0; s <= 5.0; s += 0.5) {
    w1 = std::max(w1, std::abs(f_cdf(4, 1, s, cache()) - f_cdf(1, 2, s, cache())));
    w2 = std::max(w2, std::abs(f_cdf(4, 2, s, cache()) - f_cdf(1, 4, s, cache())));
  }
  CHECK(w1 < 1e-6);
  CHECK(w2 < 5e-4);
  // the beta=4 interlacing route is exposed and matches the direct default
  for (double s : {-3.0, 0.0})
    CHECK(std::abs(f_cdf(4, 1, s, cache(), Beta4Route::Interlacing) -
                   f_cdf(1, 2, s, cache())) < 1e-14);
}

TEST_CASE("densities: closed forms, positivity, mode ordering") {
  // m = 1 closed forms against centered differentiation of the cdf
  for (int beta : {1, 2, 4})
    for (double s : {-3.0, -1.0, 1.0}) {
      const double h = 1e-4;
      const double fd = (f_cdf(beta, 1, s + h, cache()) - f_cdf(beta, 1, s - h, cache())) / (2 * h);
      CHECK(std::abs(f_pdf(beta, 1, s, cache()) - fd) < 1e-7);
    }
  // modes move left as m grows (table columns)
  DistributionTable t = build_table(1, 4, cache().base().grid, cache());
  std::vector<double> modes;
  for (int m = 1; m <= 4; ++m) {
    std::size_t arg = 0;
    for (std::size_t i = 0; i < t.grid.size(); ++i)
      if (t.pdf[m - 1][i] > t.pdf[m - 1][arg]) arg = i;
    modes.push_back(t.grid[arg]);
    for (std::size_t i = 0; i < t.grid.size(); ++i) CHECK(t.pdf[m - 1][i] >= -1e-9);
  }
  for (int m = 1; m < 4; ++m) CHECK(modes[m] < modes[m - 1]);
}

TEST_CASE("quantiles: round trip, monotonicity, cross-family") {
  const double q95 = quantile(1, 1, 0.95, cache());
  CHECK(std::abs(f_cdf(1, 1, q95, cache()) - 0.95) < 1e-8);
  CHECK(quantile(1, 1, 0.3, cache()) < quantile(1, 1, 0.7, cache()));
  for (double p : {0.05, 0.5, 0.95})
    CHECK(std::abs(quantile(4, 1, p, cache()) - quantile(1, 2, p, cache())) < 1e-5);
  CHECK_THROWS_AS(quantile(1, 1, 0.0, cache()), std::invalid_argument);
  // F1(-10,1) is about 3e-22, so 1e-30 lies outside the attained range
  CHECK_THROWS_AS(quantile(1, 1, 1e-30, cache()), std::domain_error);
}

TEST_CASE("lemma sequence matches the recursion and the generating function") {
  LemmaSequence seq = lemma_a_seq(10);
  const long long expect[11] = {1, 1, 1, 3, 9, 45, 225, 1575, 11025, 99225, 893025};
  for (int j = 0; j <= 10; ++j) {
    CHECK(seq.a[j].num == expect[j]);
    CHECK(seq.a[j].den == 1);
  }
  // oracle: Taylor coefficients of sqrt((1+u)/(1-u)) at u = 0 in exact
  // rational arithmetic, b_j = sum_k C(1/2,k) C(-1/2,j-k) (-1)^{j-k}
  std::vector<Rational> c{Rational(1, 1)}, d{Rational(1, 1)};
  for (int k = 1; k <= 10; ++k) {
    c.push_back(c.back() * Rational(3 - 2 * k, 2 * k));       // C(1/2,k) ratio
    d.push_back(d.back() * Rational(2 * k - 1, 2 * k));       // C(-1/2,k)(-1)^k ratio
  }
  Rational fact(1, 1);
  for (int j = 0; j <= 10; ++j) {
    if (j > 0) fact = fact * Rational(j, 1);
    Rational bj(0, 1);
    for (int k = 0; k <= j; ++k) bj = bj + c[k] * d[j - k];
    CHECK(seq.b[j] == bj);
    CHECK(seq.a[j] == bj * fact);
  }
  CHECK_THROWS_AS(lemma_a_seq(21), std::invalid_argument);
}

TEST_CASE("flemma identity residuals") {
  for (double s : {-2.0, 0.0, 2.0}) {
    CHECK(flemma_check(s, 0, cache()) < 1e-4);
    CHECK(flemma_check(s, 1, cache()) < 5e-3);
  }
  CHECK_THROWS_AS(flemma_check(0.0, 2, cache()), std::invalid_argument);
}

TEST_CASE("table construction invariants and exports") {
  namespace fs = std::filesystem;
  DistributionTable t = build_table(2, 4, cache().base().grid, cache());
  for (int m = 1; m <= 4; ++m) {
    const auto& col = t.cdf[m - 1];
    for (std::size_t i = 0; i < col.size(); ++i) {
      CHECK(col[i] >= -1e-9);
      CHECK(col[i] <= 1.0 + 1e-9);
      if (i) CHECK(col[i] >= col[i - 1] - 1e-12);
      if (m > 1) CHECK(col[i] >= t.cdf[m - 2][i] - 1e-12);
    }
  }
  const fs::path dir = fs::temp_directory_path() / "twdist_table_test";
  fs::create_directories(dir);
  export_table_csv(t, cache().config().hash(), dir / "t.csv");
  export_table_json(t, cache().config().hash(), dir / "t.json");
  std::ifstream jf(dir / "t.json");
  nlohmann::json j = nlohmann::json::parse(jf);
  CHECK(j["beta"] == 2);
  CHECK(j["s"].size() == t.grid.size());
  CHECK(j["cdf"]["4"].size() == t.grid.size());
  std::ifstream cf(dir / "t.csv");
  std::string line;
  int lines = 0;
  while (std::getline(cf, line)) ++lines;
  CHECK(lines == int(t.grid.size()) + 2);
  fs::remove_all(dir);
}

TEST_CASE("disk-backed state cache hits and stale detection") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "twdist_cache_test";
  fs::remove_all(dir);
  {
    StateCache c1{SolverConfig{}};
    c1.set_disk_cache(dir);
    c1.base();
    c1.at(0.5);
    CHECK(c1.stats().solves == 2);
    CHECK(c1.stats().disk_hits == 0);
  }
  {
    StateCache c2{SolverConfig{}};
    c2.set_disk_cache(dir);
    c2.base();
    c2.at(0.5);
    CHECK(c2.stats().disk_hits == 2);
    CHECK(c2.stats().solves == 0);
  }
  {
    SolverConfig other;
    other.rk_atol = 1e-11;  // different hash -> stale entries
    StateCache c3{other};
    c3.set_disk_cache(dir);
    c3.base();
    CHECK(c3.stats().stale == 1);
    CHECK(c3.stats().solves == 1);
  }
  fs::remove_all(dir);
}
