// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace twdist {

// Airy function Ai and its derivative. Total on finite reals: a Maclaurin
// series evaluated in extended precision covers the central range, with
// asymptotic expansions (decaying branch on the right, oscillatory branch
// on the left) beyond the seams. Seam placement is chosen so the branches
// agree to well below 1e-10; see detail::kAirySeamRight/Left.
double airy_ai(double x);
double airy_ai_prime(double x);

namespace detail {
inline constexpr double kAirySeamRight = 9.0;
inline constexpr double kAirySeamLeft = -10.5;
// Individual branches, exposed for the seam-agreement tests.
double airy_series(double x, bool prime);
double airy_asymptotic_right(double x, bool prime);
double airy_asymptotic_left(double x, bool prime);
}  // namespace detail

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = 0;
  double b = 0;
};

// Gauss-Legendre rule with n points on (a, b); exact for polynomials of
// degree <= 2n-1. Throws std::invalid_argument for n == 0 or a >= b.
QuadratureRule gauss_legendre(int n, double a, double b);

// Deterministic random stream: (master_seed, stream_id) fully determines
// the sequence, and distinct stream_ids give statistically independent
// streams. Single-owner object; hand one per worker, never share.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform();  // (0,1)
  double normal();   // standard normal, Marsaglia polar method
  double chi(int k);// chi-distributed with k degrees of freedom, k >= 1

 private:
  double gamma(double shape);  // Marsaglia-Tsang, shape >= 1
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace twdist
