// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "twdist/parallel.hpp"

namespace twdist {

// Airy kernel (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y); the removable diagonal
// singularity is filled with the limit Ai'(x)^2 - x Ai(x)^2, applied when
// |x - y| <= 1e-6 (evaluated at the midpoint).
double airy_kernel(double x, double y);

namespace detail {
double airy_kernel_quotient(double x, double y);
double airy_kernel_diagonal(double x);
}

// Change of variables mapping (-1,1) quadrature onto (s, inf). The rational
// map is the default; the exponential map exists so tests can compare.
enum class DomainMap { Rational, Exponential };

struct DiscretizedKernel {
  double s = 0;
  int n = 0;
  DomainMap map = DomainMap::Rational;
  std::vector<double> nodes;    // mapped quadrature abscissae on (s, inf)
  std::vector<double> weights;  // Gauss-Legendre weights times the Jacobian
  std::vector<double> matrix;   // n x n, sqrt(w_i) K(x_i,x_j) sqrt(w_j)
};

DiscretizedKernel discretize_airy_kernel(double s, int n_nodes,
                                         DomainMap map = DomainMap::Rational,
                                         Exec exec = Exec::Parallel);

// det(I - lambda K) by Nystrom discretization and pivoted LU.
double fredholm_det(double s, double lambda, int n_nodes,
                    DomainMap map = DomainMap::Rational,
                    Exec exec = Exec::Parallel);

}  // namespace twdist
