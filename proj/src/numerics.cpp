// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "twdist/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace twdist {

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int nd = static_cast<int>(x.size());
  if (nd < m + 1) throw std::invalid_argument("fd_weights: need at least m+1 nodes");
  std::vector<double> c(nd * (m + 1), 0.0);
  auto C = [&](int i, int j) -> double& { return c[i * (m + 1) + j]; };
  double c1 = 1.0;
  double c4 = x[0] - z;
  C(0, 0) = 1.0;
  for (int i = 1; i < nd; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0;
    double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nd);
  for (int i = 0; i < nd; ++i) w[i] = C(i, m);
  return w;
}

CubicHermite::CubicHermite(std::vector<double> x, std::vector<double> y,
                           std::vector<double> dy)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
  if (x_.size() != y_.size() || x_.size() != dy_.size() || x_.size() < 2)
    throw std::invalid_argument("CubicHermite: inconsistent sizes");
  // Fritsch-Carlson circle criterion, applied only inside monotone runs
  // (cells whose slopes both point along the secant). Cells holding an
  // interior extremum keep their exact slopes, so smooth non-monotone data
  // retains full Hermite accuracy.
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    double h = x_[i + 1] - x_[i];
    double d = (y_[i + 1] - y_[i]) / h;
    if (d == 0.0) continue;
    double a = dy_[i] / d, b = dy_[i + 1] / d;
    if (a < 0.0 || b < 0.0) continue;
    double r = a * a + b * b;
    if (r > 9.0) {
      double t = 3.0 / std::sqrt(r);
      dy_[i] = t * a * d;
      dy_[i + 1] = t * b * d;
    }
  }
}

double CubicHermite::operator()(double s) const {
  if (s <= x_.front()) s = x_.front();
  if (s >= x_.back()) s = x_.back();
  std::size_t lo = 0, hi = x_.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (x_[mid] <= s)
      lo = mid;
    else
      hi = mid;
  }
  double h = x_[hi] - x_[lo];
  double t = (s - x_[lo]) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1;
  double h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2;
  double h11 = t3 - t2;
  return h00 * y_[lo] + h10 * h * dy_[lo] + h01 * y_[hi] + h11 * h * dy_[hi];
}

namespace {

// In-place LU with partial pivoting; perm records row swaps for the sign.
int lu_factor(std::vector<double>& a, std::vector<int>& piv, int n) {
  int swaps = 0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a[k * n + k]);
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("LU breakdown: matrix singular to machine precision");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[p * n + j], a[k * n + j]);
      ++swaps;
    }
    piv[k] = p;
    double inv = 1.0 / a[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      double m = a[i * n + k] * inv;
      a[i * n + k] = m;
      for (int j = k + 1; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
    }
  }
  return swaps;
}

}  // namespace

void lu_solve_inplace(std::vector<double>& a, std::vector<double>& b, int n) {
  std::vector<int> piv(n);
  lu_factor(a, piv, n);
  for (int k = 0; k < n; ++k)
    if (piv[k] != k) std::swap(b[piv[k]], b[k]);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) b[i] -= a[i * n + j] * b[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= a[i * n + j] * b[j];
    b[i] /= a[i * n + i];
  }
}

LogDet lu_log_det(std::vector<double>& a, int n) {
  std::vector<int> piv(n);
  int swaps = lu_factor(a, piv, n);
  LogDet r{0.0, (swaps % 2) ? -1.0 : 1.0};
  for (int k = 0; k < n; ++k) {
    double d = a[k * n + k];
    if (d < 0) {
      r.sign = -r.sign;
      d = -d;
    }
    r.log_abs += std::log(d);
  }
  return r;
}

BandLU::BandLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), w_(2 * kl + ku + 1), ab_(std::size_t(n) * (2 * kl + ku + 1), 0.0), piv_(n) {}

// column-major band storage: A(r,c) lives at ab_[c*w_ + kl_ + ku_ + r - c];
// the kl_ extra top rows hold fill generated by pivoting.
double& BandLU::at(int r, int c) {
  return ab_[std::size_t(c) * w_ + kl_ + ku_ + r - c];
}

void BandLU::factor() {
  const int ubw = kl_ + ku_;  // upper bandwidth of U after fill
  for (int k = 0; k < n_; ++k) {
    int pmax = std::min(k + kl_, n_ - 1);
    int p = k;
    double best = std::abs(at(k, k));
    for (int i = k + 1; i <= pmax; ++i) {
      double v = std::abs(at(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("BandLU: matrix singular to machine precision");
    piv_[k] = p;
    int jmax = std::min(k + ubw, n_ - 1);
    if (p != k)
      for (int j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
    double inv = 1.0 / at(k, k);
    for (int i = k + 1; i <= pmax; ++i) {
      double m = at(i, k) * inv;
      at(i, k) = m;
      for (int j = k + 1; j <= jmax; ++j) at(i, j) -= m * at(k, j);
    }
  }
  factored_ = true;
}

void BandLU::solve(std::vector<double>& b) const {
  if (!factored_) throw std::logic_error("BandLU::solve before factor");
  auto& self = const_cast<BandLU&>(*this);
  for (int k = 0; k < n_; ++k) {
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    int imax = std::min(k + kl_, n_ - 1);
    for (int i = k + 1; i <= imax; ++i) b[i] -= self.at(i, k) * b[k];
  }
  const int ubw = kl_ + ku_;
  for (int i = n_ - 1; i >= 0; --i) {
    int jmax = std::min(i + ubw, n_ - 1);
    for (int j = i + 1; j <= jmax; ++j) b[i] -= self.at(i, j) * b[j];
    b[i] /= self.at(i, i);
  }
}

}  // namespace twdist
