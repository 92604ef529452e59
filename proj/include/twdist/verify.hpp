// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twdist/distributions.hpp"
#include "twdist/parallel.hpp"

namespace twdist {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0;   // the quantity compared against the bound
  double bound = 0;
  std::string detail;
};

struct VerifyOptions {
  bool fast = false;       // skip the Monte Carlo checks
  double tol_scale = 1.0;  // multiplies every bound (sensitivity runs)
  std::uint64_t seed = 20260810;
  Exec exec = Exec::Parallel;
};

// Runs the full invariant suite: oracle equivalence, series tail matching,
// identity reductions, interlacing, lemma checks, derivative consistency,
// table sanity, and (unless fast) the Monte Carlo reproductions. Checks are
// independent; failures do not short-circuit.
std::vector<CheckResult> run_verification(StateCache& cache, const VerifyOptions& opt);

// Individual checks, exposed for the acceptance suite.
CheckResult check_oracle_equivalence(StateCache& cache, double tol_scale, Exec exec);
CheckResult check_tail_q0(StateCache& cache, double tol_scale);
CheckResult check_tail_q1(StateCache& cache, double tol_scale);
CheckResult check_identity_d1(StateCache& cache, double tol_scale);
CheckResult check_identity_d4(StateCache& cache, double tol_scale);
CheckResult check_interlacing_m1(StateCache& cache, double tol_scale);
CheckResult check_interlacing_m2(StateCache& cache, double tol_scale);
CheckResult check_lemma_sequence(double tol_scale);
CheckResult check_flemma(StateCache& cache, int n, double tol_scale);
CheckResult check_deriv_analytic_vs_fd(StateCache& cache, double tol_scale);
CheckResult check_pdf_normalization(StateCache& cache, double tol_scale, Exec exec);
CheckResult check_cdf_monotone(StateCache& cache, Exec exec);
CheckResult check_table1_wishart_100x100(StateCache& cache, double tol_scale,
                                         std::uint64_t seed, Exec exec);
CheckResult check_table1_wishart_100x400(StateCache& cache, double tol_scale,
                                         std::uint64_t seed, Exec exec);
// KS of the m-th rescaled GOE eigenvalue against F1(.,m); reports the
// measured distance so calibration stays visible next to the bound.
CheckResult check_fig2_goe_ks(StateCache& cache, int m, double tol_scale,
                              std::uint64_t seed, Exec exec);
CheckResult check_goe_gse_interlacing(StateCache& cache, double tol_scale,
                                      std::uint64_t seed, Exec exec);
CheckResult check_dense_vs_tridiagonal(double tol_scale, std::uint64_t seed, Exec exec);

}  // namespace twdist
