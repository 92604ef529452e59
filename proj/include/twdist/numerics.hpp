// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace twdist {

// Fornberg weights: w[j] such that sum_j w[j] f(x[j]) approximates the
// m-th derivative of f at z. Exact for polynomials of degree < x.size().
std::vector<double> fd_weights(double z, std::span<const double> x, int m);

// Cubic Hermite interpolant on a strictly increasing grid with caller-supplied
// slopes, with a Fritsch-Carlson limiter so monotone data stays monotone.
class CubicHermite {
 public:
  CubicHermite() = default;
  CubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> dy);
  double operator()(double s) const;
  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, dy_;
};

// Solves A x = b in place for a small dense row-major n x n matrix with
// partial pivoting. Throws std::runtime_error on a pivot that is zero to
// machine precision.
void lu_solve_inplace(std::vector<double>& a, std::vector<double>& b, int n);

// log|det A| and sign via pivoted LU (A destroyed). Throws on exact breakdown.
struct LogDet {
  double log_abs;
  double sign;
};
LogDet lu_log_det(std::vector<double>& a, int n);

// Banded LU with partial pivoting (LAPACK-style storage with kl fill rows).
// Entries must be written within the declared bands before factor().
class BandLU {
 public:
  BandLU(int n, int kl, int ku);
  double& at(int r, int c);  // valid for c - ku <= r <= c + kl
  void factor();
  void solve(std::vector<double>& b) const;

 private:
  int n_, kl_, ku_, w_;
  std::vector<double> ab_;
  std::vector<int> piv_;
  bool factored_ = false;
};

}  // namespace twdist
