// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: every release criterion at its pinned tolerance, one
// test case per criterion, one printed pass/fail line per sub-check.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdio>

#include "twdist/distributions.hpp"
#include "twdist/verify.hpp"

using namespace twdist;

namespace {

StateCache& cache() {
  static StateCache c{SolverConfig{}};
  return c;
}

constexpr std::uint64_t kSeed = 20260810;

bool report(const CheckResult& r) {
  std::printf("[%s] %-24s measured %.6g  bound %.6g  %s\n", r.pass ? "PASS" : "FAIL",
              r.name.c_str(), r.measured, r.bound, r.detail.c_str());
  std::fflush(stdout);
  return r.pass;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("criterion 1: oracle equivalence within 5e-6 and two minutes") {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult r = check_oracle_equivalence(cache(), 1.0, Exec::Parallel);
  const double secs = seconds_since(t0);
  std::printf("        (oracle sweep took %.1f s)\n", secs);
  CHECK(report(r));
  CHECK(secs < 120.0);
}

TEST_CASE("criterion 2: series tail matching at the patch point") {
  CHECK(report(check_tail_q0(cache(), 1.0)));
  CHECK(report(check_tail_q1(cache(), 1.0)));
}

TEST_CASE("criterion 3: identity reductions at lambda = 1") {
  CHECK(report(check_identity_d1(cache(), 1.0)));
  CHECK(report(check_identity_d4(cache(), 1.0)));
}

TEST_CASE("criterion 4: interlacing") {
  CHECK(report(check_interlacing_m1(cache(), 1.0)));
  CHECK(report(check_interlacing_m2(cache(), 1.0)));
}

TEST_CASE("criterion 5: Table 1 reproduction at desk scale") {
  auto t0 = std::chrono::steady_clock::now();
  CHECK(report(check_table1_wishart_100x100(cache(), 1.0, kSeed, Exec::Parallel)));
  CHECK(report(check_table1_wishart_100x400(cache(), 1.0, kSeed, Exec::Parallel)));
  const double secs = seconds_since(t0);
  std::printf("        (both Wishart runs took %.1f s)\n", secs);
  CHECK(secs < 600.0);
}

TEST_CASE("criterion 6: Figure 2 analog at N = 200") {
  // The 0.05 bound comes from the criterion text; the measured distances for
  // m = 3, 4 sit above it at N = 200 and shrink toward the tabulated limit as
  // N grows (finite-N bias, not a column error: the m = 4 reference via the
  // interlacing route gives the same distance to four decimals). The failing
  // sub-checks below are the faithful record of that.
  for (int m = 1; m <= 4; ++m) CHECK(report(check_fig2_goe_ks(cache(), m, 1.0, kSeed, Exec::Parallel)));
}

TEST_CASE("criterion 7: lemma suite") {
  CHECK(report(check_lemma_sequence(1.0)));
  CHECK(report(check_flemma(cache(), 0, 1.0)));
  CHECK(report(check_flemma(cache(), 1, 1.0)));
}

TEST_CASE("criterion 8: internal consistency") {
  CHECK(report(check_deriv_analytic_vs_fd(cache(), 1.0)));
  CHECK(report(check_pdf_normalization(cache(), 1.0, Exec::Parallel)));
  CHECK(report(check_cdf_monotone(cache(), Exec::Parallel)));
}

TEST_CASE("supporting invariants: finite-N interlacing and sampler agreement") {
  CHECK(report(check_goe_gse_interlacing(cache(), 1.0, kSeed, Exec::Parallel)));
  CHECK(report(check_dense_vs_tridiagonal(1.0, kSeed, Exec::Parallel)));
}

TEST_CASE("sensitivity: tightening every bound 100x exposes the FD-limited checks") {
  VerifyOptions opt;
  opt.fast = true;
  opt.tol_scale = 0.01;
  std::vector<CheckResult> rs = run_verification(cache(), opt);
  int failures = 0;
  for (const auto& r : rs)
    if (!r.pass) {
      ++failures;
      std::printf("[info] tightened bound trips %-24s measured %.6g  bound %.6g\n",
                  r.name.c_str(), r.measured, r.bound);
    }
  CHECK(failures >= 1);
  CHECK(rs.size() == 13);  // nothing short-circuits
}
