// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twdist/numerics.hpp"

namespace twdist {

// All numeric decisions of the Painleve solves in one place. The hash enters
// every cache file and output, so changing a tolerance invalidates caches.
struct SolverConfig {
  double s_right = 6.0;
  double s_left = -10.0;
  double patch_point = -8.0;
  double rk_atol = 1e-10;
  double rk_rtol = 1e-10;
  int relaxation_mesh_size = 1601;
  int max_relaxation_iters = 12;
  double lambda_stencil_h = 0.05;
  int fd_richardson_levels = 3;

  void validate() const;  // throws std::invalid_argument on bad fields
  std::uint64_t hash() const;
};

// Solution of the q(x,lambda) boundary-value family on a fixed grid,
// together with the accumulated integrals
//   I0 = int_s^inf (x-s) q^2,  J0 = int_s^inf q,
// and, when the lambda-derivative block is solved (lambda = 1 only),
//   q1 = dq/dlambda|_1,  I1 = int (x-s) q0 q1,  J1 = int q0 q1,
//   K1 = int_s^inf q1.
struct PainleveState {
  double lambda = 1.0;
  std::vector<double> grid;
  std::vector<double> q0, q0p, I0, I0p, J0;
  bool has_q1 = false;
  std::vector<double> q1, q1p, I1, I1p, J1, K1;

  // interpolated accessors (monotone-limited cubic Hermite, exact slopes)
  double q(double s) const;
  double i0(double s) const;
  double i0p(double s) const;
  double j0(double s) const;
  double i1(double s) const;
  double j1(double s) const;
  double k1(double s) const;

  void build_interpolants();

 private:
  CubicHermite q_itp_, i0_itp_, i0p_itp_, j0_itp_, i1_itp_, j1_itp_, k1_itp_;
};

// Truncated left expansion of the Hastings-McLeod solution at s = -t/2 and
// its s-derivative. Requires t >= 12, where the printed truncation is far
// below the solver tolerances.
std::pair<double, double> q0_left_asymptotic(double t);

// Truncated left expansion of q1 at s = -t/2; grows like exp(t^{3/2}/3).
// Throws std::overflow_error once the exponent leaves double range.
double q1_left_asymptotic(double t);

namespace detail {
double q1_left_asymptotic_ds(double t);  // s-derivative of the q1 expansion
}

// Solve the five-component q0 system with boundary data sqrt(lambda)*Ai at
// s_right: adaptive RK sweep for the trial, then global collocation
// relaxation. For lambda = 1 the mesh stops at patch_point and the stored
// state left of it comes from the asymptotic expansion. For lambda in
// [0.95, 1) the solve is routed through solve_q0_correction, which needs a
// lambda = 1 base (computed internally when not supplied).
PainleveState solve_q0(double lambda, const SolverConfig& config);
PainleveState solve_q0(double lambda, const SolverConfig& config,
                       const PainleveState* base);

// Correction route for lambda near 1: solves w = (q - q0)/(lambda - 1)
// against the base state. w rides the leftward-growing mode, so the solve is
// relatively stable where the direct one is ill-conditioned, and the
// assembled state q = q0 + (lambda-1) w carries no amplified noise.
PainleveState solve_q0_correction(double lambda, const PainleveState& base,
                                  const SolverConfig& config);

// Augment a lambda = 1 state with the q1 block (joint 11-component solve).
void solve_q1(PainleveState& base, const SolverConfig& config);

// mu(s, lambda) = J0(s) of the state; rejects s outside [s_left, s_right].
double mu(const PainleveState& state, double s);

// Versioned binary cache (little-endian doubles) and CSV export.
void save_state(const PainleveState& state, std::uint64_t config_hash,
                const std::filesystem::path& path);
std::optional<PainleveState> load_state(const std::filesystem::path& path,
                                        std::uint64_t config_hash);
void export_state_csv(const PainleveState& state, std::uint64_t config_hash,
                      const std::filesystem::path& path);

}  // namespace twdist
