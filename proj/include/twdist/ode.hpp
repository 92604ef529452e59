// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace twdist {

// First-order system y' = f(s, y) with analytic Jacobian, used by both the
// adaptive sweep and the collocation relaxation.
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;
  virtual int dim() const = 0;
  virtual void f(double s, const double* y, double* dy) const = 0;
  // J row-major: J[i*dim+j] = d f_i / d y_j
  virtual void jac(double s, const double* y, double* J) const = 0;
};

// Adaptive embedded Dormand-Prince 5(4) sweep. Starts from y0 at nodes.front()
// and records the solution at every node (nodes may be decreasing for a
// right-to-left sweep). out has nodes.size()*dim entries, row per node.
void rk45_sweep(const OdeSystem& sys, std::span<const double> nodes,
                std::span<const double> y0, double atol, double rtol,
                std::vector<double>& out);

struct RelaxResult {
  int iterations = 0;
  double max_residual = 0;
  bool converged = false;
};

// One pinned solution component at a mesh endpoint.
struct BoundaryPin {
  int component;
  double value;
};

// Global Newton relaxation of the collocation equations (4th-order
// Lobatto IIIA / MIRK4 cells) on the fixed, increasing mesh, with
// left.size() + right.size() == dim() pinned components at the two ends.
// Y holds the trial on entry (row per mesh point) and the relaxed solution
// on exit. The banded Newton system is solved with partial pivoting, and
// convergence is judged on the scaled Newton step: near a connection region
// the residual alone is a weak norm (a wrong trajectory can satisfy every
// cell equation to roundoff).
RelaxResult relax_collocation(const OdeSystem& sys, std::span<const double> mesh,
                              std::span<const BoundaryPin> left,
                              std::span<const BoundaryPin> right,
                              std::vector<double>& Y, int max_iters,
                              double tol = 1e-12);

}  // namespace twdist
