// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "twdist/ode.hpp"

#include "twdist/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace twdist {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

void rk45_sweep(const OdeSystem& sys, std::span<const double> nodes,
                std::span<const double> y0, double atol, double rtol,
                std::vector<double>& out) {
  const int n = sys.dim();
  if (nodes.size() < 2) throw std::invalid_argument("rk45_sweep: need >= 2 nodes");
  out.assign(nodes.size() * n, 0.0);
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y5(n);
  std::copy(y.begin(), y.end(), out.begin());

  const double dir = nodes[1] > nodes[0] ? 1.0 : -1.0;
  double s = nodes[0];
  double h = dir * 1e-3;
  sys.f(s, y.data(), k1.data());
  bool have_k1 = true;

  for (std::size_t node = 1; node < nodes.size(); ++node) {
    const double target = nodes[node];
    while (dir * (target - s) > 1e-14 * std::max(1.0, std::abs(s))) {
      if (dir * (s + h - target) > 0) h = target - s;
      if (!have_k1) {
        sys.f(s, y.data(), k1.data());
        have_k1 = true;
      }
      for (int i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
      sys.f(s + c2 * h, yt.data(), k2.data());
      for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      sys.f(s + c3 * h, yt.data(), k3.data());
      for (int i = 0; i < n; ++i)
        yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      sys.f(s + c4 * h, yt.data(), k4.data());
      for (int i = 0; i < n; ++i)
        yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      sys.f(s + c5 * h, yt.data(), k5.data());
      for (int i = 0; i < n; ++i)
        yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
      sys.f(s + h, yt.data(), k6.data());
      for (int i = 0; i < n; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      sys.f(s + h, y5.data(), k7.data());

      double err = 0;
      for (int i = 0; i < n; ++i) {
        double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * k7[i]);
        double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(e) / sc);
      }
      if (err <= 1.0) {
        s += h;
        y.swap(y5);
        k1.swap(k7);  // FSAL
      }
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h *= std::clamp(fac, 0.2, 5.0);
      if (std::abs(h) < 1e-14)
        throw std::runtime_error("rk45_sweep: step size underflow");
    }
    std::copy(y.begin(), y.end(), out.begin() + node * n);
  }
}

namespace {

// Per-cell MIRK4 residual and its two Jacobian blocks.
struct CellWork {
  std::vector<double> fi, fj, fm, ym, Ji, Jj, Jm, A, B, R;
  explicit CellWork(int n)
      : fi(n), fj(n), fm(n), ym(n), Ji(n * n), Jj(n * n), Jm(n * n), A(n * n), B(n * n), R(n) {}
};

void cell_residual(const OdeSystem& sys, double si, double sj, const double* yi,
                   const double* yj, CellWork& w, bool want_jac) {
  const int n = sys.dim();
  const double h = sj - si;
  sys.f(si, yi, w.fi.data());
  sys.f(sj, yj, w.fj.data());
  for (int i = 0; i < n; ++i)
    w.ym[i] = 0.5 * (yi[i] + yj[i]) + h / 8.0 * (w.fi[i] - w.fj[i]);
  const double sm = 0.5 * (si + sj);
  sys.f(sm, w.ym.data(), w.fm.data());
  for (int i = 0; i < n; ++i)
    w.R[i] = yj[i] - yi[i] - h / 6.0 * (w.fi[i] + 4.0 * w.fm[i] + w.fj[i]);
  if (!want_jac) return;
  sys.jac(si, yi, w.Ji.data());
  sys.jac(sj, yj, w.Jj.data());
  sys.jac(sm, w.ym.data(), w.Jm.data());
  // A = -I - h/6 (Ji + 4 Jm (I/2 + h/8 Ji)),  B = I - h/6 (Jj + 4 Jm (I/2 - h/8 Jj))
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double mij_a = 0, mij_b = 0;
      for (int k = 0; k < n; ++k) {
        mij_a += w.Jm[i * n + k] * (0.5 * (k == j) + h / 8.0 * w.Ji[k * n + j]);
        mij_b += w.Jm[i * n + k] * (0.5 * (k == j) - h / 8.0 * w.Jj[k * n + j]);
      }
      w.A[i * n + j] = -double(i == j) - h / 6.0 * (w.Ji[i * n + j] + 4.0 * mij_a);
      w.B[i * n + j] = double(i == j) - h / 6.0 * (w.Jj[i * n + j] + 4.0 * mij_b);
    }
  }
}

}  // namespace

RelaxResult relax_collocation(const OdeSystem& sys, std::span<const double> mesh,
                              std::span<const BoundaryPin> left,
                              std::span<const BoundaryPin> right,
                              std::vector<double>& Y, int max_iters, double tol) {
  const int n = sys.dim();
  const int M = static_cast<int>(mesh.size());
  const int nl = static_cast<int>(left.size());
  const int nr = static_cast<int>(right.size());
  if (M < 2) throw std::invalid_argument("relax_collocation: mesh too small");
  if (nl + nr != n)
    throw std::invalid_argument("relax_collocation: need dim() boundary pins");
  if (Y.size() != static_cast<std::size_t>(M) * n)
    throw std::invalid_argument("relax_collocation: trial size mismatch");

  const int N = M * n;
  // Equation r couples unknowns within [r - (n+nl), r + 2n-1-nl].
  const int kl = n + nl;
  const int ku = 2 * n;

  std::vector<double> As((M - 1) * n * n), Bs((M - 1) * n * n), Rs((M - 1) * n);
  std::vector<double> rhs(N);
  RelaxResult res;

  for (int iter = 0; iter < max_iters; ++iter) {
    double max_r = 0;
#pragma omp parallel
    {
      CellWork w(n);
      double local_r = 0;
#pragma omp for schedule(static) nowait
      for (int c = 0; c < M - 1; ++c) {
        cell_residual(sys, mesh[c], mesh[c + 1], &Y[c * n], &Y[(c + 1) * n], w, true);
        std::memcpy(&As[c * n * n], w.A.data(), sizeof(double) * n * n);
        std::memcpy(&Bs[c * n * n], w.B.data(), sizeof(double) * n * n);
        std::memcpy(&Rs[c * n], w.R.data(), sizeof(double) * n);
        for (int i = 0; i < n; ++i) {
          double sc = 1.0 + std::abs(Y[c * n + i]) + std::abs(Y[(c + 1) * n + i]);
          local_r = std::max(local_r, std::abs(w.R[i]) / sc);
        }
      }
#pragma omp critical
      max_r = std::max(max_r, local_r);
    }
    res.iterations = iter + 1;
    res.max_residual = max_r;

    BandLU band(N, kl, ku);
    for (int l = 0; l < nl; ++l) {
      band.at(l, left[l].component) = 1.0;
      rhs[l] = -(Y[left[l].component] - left[l].value);
    }
    for (int c = 0; c < M - 1; ++c) {
      for (int i = 0; i < n; ++i) {
        const int r = nl + c * n + i;
        for (int j = 0; j < n; ++j) {
          band.at(r, c * n + j) = As[c * n * n + i * n + j];
          band.at(r, (c + 1) * n + j) = Bs[c * n * n + i * n + j];
        }
        rhs[r] = -Rs[c * n + i];
      }
    }
    for (int j = 0; j < nr; ++j) {
      const int r = nl + (M - 1) * n + j;
      const int v = (M - 1) * n + right[j].component;
      band.at(r, v) = 1.0;
      rhs[r] = -(Y[v] - right[j].value);
    }
    band.factor();
    band.solve(rhs);

    double max_step = 0;
    for (int i = 0; i < N; ++i) {
      max_step = std::max(max_step, std::abs(rhs[i]) / (1.0 + std::abs(Y[i])));
      Y[i] += rhs[i];
    }
    if (max_step < tol) {
      res.converged = true;
      return res;
    }
  }
  std::ostringstream msg;
  msg << "relax_collocation: no convergence after " << max_iters
      << " iterations (scaled residual " << res.max_residual << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace twdist
