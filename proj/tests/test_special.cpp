// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "twdist/special.hpp"

using namespace twdist;

namespace {

// Independent Maclaurin oracle for Ai in long double, anchored at the frozen
// values of Ai(0) and Ai'(0).
long double airy_oracle(long double x, bool prime) {
  const long double c1 = 0.35502805388781723926L;
  const long double c2 = -0.25881940379280679841L;
  const long double x3 = x * x * x;
  long double f = 1, tf = 1, g = x, tg = x, fp = 0, tfp = x * x / 2, gp = 1, tgp = 1;
  for (int k = 0; k < 120; ++k) {
    tf *= x3 / ((3 * k + 2) * (3 * k + 3));
    f += tf;
    tg *= x3 / ((3 * k + 3) * (3 * k + 4));
    g += tg;
    if (k >= 1) tfp *= (long double)(k + 1) / k * x3 / ((3 * k + 2) * (3 * k + 3));
    fp += tfp;
    tgp *= x3 / ((3 * k + 1) * (3 * k + 3));
    gp += tgp;
  }
  return prime ? c1 * fp + c2 * gp : c1 * f + c2 * g;
}

}  // namespace

TEST_CASE("airy values at 0 and derivative consistency") {
  CHECK(airy_ai(0.0) == doctest::Approx(0.3550280538878172).epsilon(1e-15));
  CHECK(airy_ai_prime(0.0) == doctest::Approx(-0.2588194037928068).epsilon(1e-15));
  // finite-difference consistency at x = 1
  const double h = 1e-5;
  const double fd = (airy_ai(1 + h) - airy_ai(1 - h)) / (2 * h);
  CHECK(std::abs(fd - airy_ai_prime(1.0)) < 1e-8);
}

TEST_CASE("airy agrees with the series oracle on the central range") {
  for (double x = -5.0; x <= 5.01; x += 0.25) {
    const double ref = double(airy_oracle(x, false));
    const double refp = double(airy_oracle(x, true));
    CHECK(std::abs(airy_ai(x) - ref) < 1e-13 * (1 + std::abs(ref)));
    CHECK(std::abs(airy_ai_prime(x) - refp) < 1e-13 * (1 + std::abs(refp)));
  }
}

TEST_CASE("airy decay profile at large x") {
  auto leading = [](double x) {
    return 0.5 / std::sqrt(M_PI) * std::pow(x, -0.25) * std::exp(-2.0 / 3.0 * std::pow(x, 1.5));
  };
  // the first correction term is 5/(72 zeta) = 3.2e-3 at x=10, so the leading
  // profile matches to 1e-3 only from x ~ 25 on
  CHECK(std::abs(airy_ai(10.0) / leading(10.0) - 1.0) < 5e-3);
  CHECK(std::abs(airy_ai(25.0) / leading(25.0) - 1.0) < 1e-3);
}

TEST_CASE("airy derivative envelope at x = 8") {
  CHECK(airy_ai_prime(8.0) < 0.0);
  CHECK(std::abs(airy_ai_prime(8.0)) < airy_ai(8.0) * (std::sqrt(8.0) + 1.0));
}

TEST_CASE("airy satisfies Ai'' = x Ai on [-10, 8]") {
  const double h = 1e-3;
  for (double x = -10.0; x <= 8.001; x += 0.1) {
    const double d2 = (-airy_ai(x + 2 * h) + 16 * airy_ai(x + h) - 30 * airy_ai(x) +
                       16 * airy_ai(x - h) - airy_ai(x - 2 * h)) /
                      (12 * h * h);
    CHECK(std::abs(d2 - x * airy_ai(x)) < 1e-8);
  }
}

TEST_CASE("airy branch seams agree far below 1e-10") {
  const double xr = detail::kAirySeamRight;
  const double xl = detail::kAirySeamLeft;
  for (bool prime : {false, true}) {
    CHECK(std::abs(detail::airy_series(xr, prime) / detail::airy_asymptotic_right(xr, prime) - 1.0) < 1e-10);
    CHECK(std::abs(detail::airy_series(xl, prime) / detail::airy_asymptotic_left(xl, prime) - 1.0) < 1e-10);
  }
}

TEST_CASE("gauss_legendre basic rules") {
  const QuadratureRule mid = gauss_legendre(1, 0.0, 2.0);
  CHECK(mid.nodes[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mid.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  // nodes of P_2 via an independent bisection root-finder for 3x^2 - 1
  auto p2 = [](double x) { return 1.5 * x * x - 0.5; };
  double lo = 0.1, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    double m = 0.5 * (lo + hi);
    (p2(m) < 0 ? lo : hi) = m;
  }
  const double root = 0.5 * (lo + hi);
  const QuadratureRule r2 = gauss_legendre(2, -1.0, 1.0);
  CHECK(r2.nodes[1] == doctest::Approx(root).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(0.5773502691896257).epsilon(1e-14));
  CHECK(r2.nodes[0] == doctest::Approx(-r2.nodes[1]).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

  double odd = 0;
  for (int i = 0; i < 2; ++i) odd += r2.weights[i] * std::pow(r2.nodes[i], 3);
  CHECK(std::abs(odd) < 1e-14);
}

TEST_CASE("gauss_legendre exactness to degree 2n-1") {
  for (int n : {2, 4, 8, 16}) {
    for (auto [a, b] : {std::pair{-1.0, 1.0}, std::pair{0.0, 2.0}}) {
      const QuadratureRule r = gauss_legendre(n, a, b);
      double wsum = 0;
      for (int i = 0; i < n; ++i) {
        CHECK(r.weights[i] > 0.0);
        CHECK(r.nodes[i] > a);
        CHECK(r.nodes[i] < b);
        if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
        wsum += r.weights[i];
      }
      CHECK(std::abs(wsum - (b - a)) < 1e-12 * (b - a));
      for (int k = 0; k <= 2 * n - 1; ++k) {
        double acc = 0;
        for (int i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
        const double exact = (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
        CHECK(std::abs(acc - exact) < 1e-12 * (1 + std::abs(exact)));
      }
    }
  }
}

TEST_CASE("gauss_legendre rejects bad arguments") {
  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(4, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("rng streams are deterministic and reproducible") {
  RngStream a(123, 7), b(123, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(123, 7), d(123, 8);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += (c.next_u64() == d.next_u64());
  CHECK(same == 0);
}

TEST_CASE("rng normal moments") {
  RngStream r(2026, 1);
  const int n = 1000000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double z = r.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
}

TEST_CASE("rng chi moments") {
  RngStream r(2026, 2);
  const int n = 1000000;
  double s2 = 0;
  for (int i = 0; i < n; ++i) {
    double x = r.chi(3);
    s2 += x * x;
  }
  CHECK(std::abs(s2 / n - 3.0) < 0.01 * 3.0);

  // gamma-based branch for large k: E[chi_k^2] = k
  RngStream r2(2026, 3);
  const int n2 = 200000;
  double t2 = 0;
  for (int i = 0; i < n2; ++i) {
    double x = r2.chi(100);
    t2 += x * x;
  }
  CHECK(std::abs(t2 / n2 - 100.0) < 0.01 * 100.0);
  CHECK_THROWS_AS(r2.chi(0), std::invalid_argument);
}

TEST_CASE("two streams are statistically independent") {
  RngStream a(55, 1), b(55, 2);
  const int n = 100000;
  double sa = 0, sb = 0, sab = 0, sa2 = 0, sb2 = 0;
  for (int i = 0; i < n; ++i) {
    double x = a.normal(), y = b.normal();
    sa += x;
    sb += y;
    sab += x * y;
    sa2 += x * x;
    sb2 += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((sa2 / n - sa / n * sa / n) * (sb2 / n - sb / n * sb / n));
  CHECK(std::abs(corr) < 0.01);
}
