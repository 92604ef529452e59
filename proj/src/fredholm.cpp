// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "twdist/fredholm.hpp"

#include <cmath>
#include <stdexcept>

#include "twdist/numerics.hpp"
#include "twdist/special.hpp"

namespace twdist {

namespace detail {

double airy_kernel_quotient(double x, double y) {
  return (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) / (x - y);
}

double airy_kernel_diagonal(double x) {
  const double a = airy_ai(x), ap = airy_ai_prime(x);
  return ap * ap - x * a * a;
}

}  // namespace detail

double airy_kernel(double x, double y) {
  if (std::abs(x - y) > 1e-6) return detail::airy_kernel_quotient(x, y);
  return detail::airy_kernel_diagonal(0.5 * (x + y));
}

DiscretizedKernel discretize_airy_kernel(double s, int n_nodes, DomainMap map,
                                         Exec exec) {
  if (n_nodes < 8) throw std::invalid_argument("discretize_airy_kernel: need n_nodes >= 8");
  constexpr double L = 10.0;  // rational map scale
  DiscretizedKernel d;
  d.s = s;
  d.n = n_nodes;
  d.map = map;
  QuadratureRule base = gauss_legendre(n_nodes, -1.0, 1.0);
  d.nodes.resize(n_nodes);
  d.weights.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double u = base.nodes[i];
    if (map == DomainMap::Rational) {
      d.nodes[i] = s + L * (1.0 + u) / (1.0 - u);
      d.weights[i] = base.weights[i] * 2.0 * L / ((1.0 - u) * (1.0 - u));
    } else {
      d.nodes[i] = s - std::log(0.5 * (1.0 - u));
      d.weights[i] = base.weights[i] / (1.0 - u);
    }
  }
  d.matrix.assign(static_cast<std::size_t>(n_nodes) * n_nodes, 0.0);
  std::vector<double> rw(n_nodes);
  for (int i = 0; i < n_nodes; ++i) rw[i] = std::sqrt(d.weights[i]);
  const bool par = exec == Exec::Parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = i; j < n_nodes; ++j) {
      double v = rw[i] * airy_kernel(d.nodes[i], d.nodes[j]) * rw[j];
      d.matrix[static_cast<std::size_t>(i) * n_nodes + j] = v;
      d.matrix[static_cast<std::size_t>(j) * n_nodes + i] = v;
    }
  }
  return d;
}

double fredholm_det(double s, double lambda, int n_nodes, DomainMap map, Exec exec) {
  DiscretizedKernel d = discretize_airy_kernel(s, n_nodes, map, exec);
  if (lambda == 0.0) return 1.0;
  const int n = n_nodes;
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a[static_cast<std::size_t>(i) * n + j] =
          double(i == j) - lambda * d.matrix[static_cast<std::size_t>(i) * n + j];
  LogDet ld = lu_log_det(a, n);
  return ld.sign * std::exp(ld.log_abs);
}

}  // namespace twdist
