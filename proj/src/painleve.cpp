// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "twdist/painleve.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "twdist/ode.hpp"
#include "twdist/special.hpp"
#include "twdist/version.hpp"

namespace twdist {

void SolverConfig::validate() const {
  if (!(s_left < patch_point && patch_point < 0.0 && 0.0 < s_right))
    throw std::invalid_argument("SolverConfig: need s_left < patch_point < 0 < s_right");
  if (!(rk_atol > 0 && rk_rtol > 0))
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  if (relaxation_mesh_size < 8)
    throw std::invalid_argument("SolverConfig: relaxation_mesh_size too small");
  if (max_relaxation_iters < 1)
    throw std::invalid_argument("SolverConfig: max_relaxation_iters must be >= 1");
  if (!(lambda_stencil_h > 0 && lambda_stencil_h < 0.5))
    throw std::invalid_argument("SolverConfig: lambda_stencil_h out of range");
  if (fd_richardson_levels < 1 || fd_richardson_levels > 6)
    throw std::invalid_argument("SolverConfig: fd_richardson_levels out of range");
}

std::uint64_t SolverConfig::hash() const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "cfg|%s|%.17g|%.17g|%.17g|%.17g|%.17g|%d|%d|%.17g|%d",
                kCodeVersion, s_right, s_left, patch_point, rk_atol, rk_rtol,
                relaxation_mesh_size, max_relaxation_iters, lambda_stencil_h,
                fd_richardson_levels);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::pair<double, double> q0_left_asymptotic(double t) {
  if (!(t >= 12.0))
    throw std::invalid_argument("q0_left_asymptotic: series requires t >= 12");
  const double t3 = t * t * t;
  const double br = 1.0 - 1.0 / t3 - 73.0 / (2.0 * t3 * t3) -
                    10657.0 / (2.0 * t3 * t3 * t3) -
                    13912277.0 / (8.0 * t3 * t3 * t3 * t3);
  const double dbr = 3.0 / (t3 * t) + 3.0 * 73.0 / (t3 * t3 * t) +
                     9.0 * 10657.0 / (2.0 * t3 * t3 * t3 * t) +
                     12.0 * 13912277.0 / (8.0 * t3 * t3 * t3 * t3 * t);
  const double rt = std::sqrt(t);
  const double value = 0.5 * rt * br;
  // s = -t/2, so d/ds = -2 d/dt
  const double ddt = br / (4.0 * rt) + 0.5 * rt * dbr;
  return {value, -2.0 * ddt};
}

namespace {

// bracket factor of the q1 expansion and its t-derivative
void q1_bracket(double t, double& br, double& dbr) {
  const double t32 = std::pow(t, 1.5);
  const double c1 = 17.0 / 24.0, c2 = 1513.0 / 1152.0, c3 = 850193.0 / 82944.0,
               c4 = -407117521.0 / 7962624.0;
  br = 1.0 + c1 / t32 + c2 / (t32 * t32) + c3 / (t32 * t32 * t32) +
       c4 / (t32 * t32 * t32 * t32);
  dbr = (-1.5 * c1 / (t32 * t) - 3.0 * c2 / (t32 * t32 * t) -
         4.5 * c3 / (t32 * t32 * t32 * t) - 6.0 * c4 / (t32 * t32 * t32 * t32 * t));
}

double q1_left_value_and_dds(double t, double* dds) {
  if (!(t >= 12.0))
    throw std::invalid_argument("q1_left_asymptotic: series requires t >= 12");
  const double expo = std::pow(t, 1.5) / 3.0;
  if (expo > 700.0)
    throw std::overflow_error("q1_left_asymptotic: exp((1/3)t^{3/2}) overflows double range");
  double br, dbr;
  q1_bracket(t, br, dbr);
  const double pref = std::exp(expo) / (2.0 * std::sqrt(2.0 * M_PI) * std::pow(t, 0.25));
  const double value = pref * br;
  if (dds) {
    // d/dt of log pref = 0.5 t^{1/2} - 1/(4t)
    const double dvdt = value * (0.5 * std::sqrt(t) - 0.25 / t) + pref * dbr;
    *dds = -2.0 * dvdt;
  }
  return value;
}

}  // namespace

double q1_left_asymptotic(double t) { return q1_left_value_and_dds(t, nullptr); }

namespace detail {
double q1_left_asymptotic_ds(double t) {
  double d;
  q1_left_value_and_dds(t, &d);
  return d;
}
}  // namespace detail

namespace {

// y = (q0, q0', I0, I0', J0)
class Q0System final : public OdeSystem {
 public:
  int dim() const override { return 5; }
  void f(double s, const double* y, double* dy) const override {
    dy[0] = y[1];
    dy[1] = s * y[0] + 2.0 * y[0] * y[0] * y[0];
    dy[2] = y[3];
    dy[3] = y[0] * y[0];
    dy[4] = -y[0];
  }
  void jac(double s, const double* y, double* J) const override {
    std::memset(J, 0, sizeof(double) * 25);
    J[0 * 5 + 1] = 1.0;
    J[1 * 5 + 0] = s + 6.0 * y[0] * y[0];
    J[2 * 5 + 3] = 1.0;
    J[3 * 5 + 0] = 2.0 * y[0];
    J[4 * 5 + 0] = -1.0;
  }
};

// y = (q0, q0', I0, I0', J0, q1, q1', I1, I1', J1, K1)
class Q0Q1System final : public OdeSystem {
 public:
  int dim() const override { return 11; }
  void f(double s, const double* y, double* dy) const override {
    const double q0 = y[0], q1 = y[5];
    dy[0] = y[1];
    dy[1] = s * q0 + 2.0 * q0 * q0 * q0;
    dy[2] = y[3];
    dy[3] = q0 * q0;
    dy[4] = -q0;
    dy[5] = y[6];
    dy[6] = s * q1 + 6.0 * q0 * q0 * q1;
    dy[7] = y[8];
    dy[8] = q0 * q1;
    dy[9] = -q0 * q1;
    dy[10] = -q1;
  }
  void jac(double s, const double* y, double* J) const override {
    std::memset(J, 0, sizeof(double) * 121);
    const double q0 = y[0], q1 = y[5];
    J[0 * 11 + 1] = 1.0;
    J[1 * 11 + 0] = s + 6.0 * q0 * q0;
    J[2 * 11 + 3] = 1.0;
    J[3 * 11 + 0] = 2.0 * q0;
    J[4 * 11 + 0] = -1.0;
    J[5 * 11 + 6] = 1.0;
    J[6 * 11 + 0] = 12.0 * q0 * q1;
    J[6 * 11 + 5] = s + 6.0 * q0 * q0;
    J[7 * 11 + 8] = 1.0;
    J[8 * 11 + 0] = q1;
    J[8 * 11 + 5] = q0;
    J[9 * 11 + 0] = -q1;
    J[9 * 11 + 5] = -q0;
    J[10 * 11 + 5] = -1.0;
  }
};

std::vector<double> make_grid(const SolverConfig& config) {
  const int m = config.relaxation_mesh_size;
  std::vector<double> g(m);
  const double h = (config.s_right - config.s_left) / (m - 1);
  for (int i = 0; i < m; ++i) g[i] = config.s_left + h * i;
  g.back() = config.s_right;
  return g;
}

int patch_index(const std::vector<double>& grid, double patch_point) {
  int best = 0;
  double d = std::abs(grid[0] - patch_point);
  for (int i = 1; i < static_cast<int>(grid.size()); ++i) {
    double di = std::abs(grid[i] - patch_point);
    if (di < d) {
      d = di;
      best = i;
    }
  }
  return best;
}

// Phase 1: adaptive RK sweep right-to-left from the full right boundary
// vector (trial). Phase 2: collocation relaxation on the increasing sub-mesh
// [i0, end) with the given boundary pins. Y gets one row per sub-mesh point.
void two_phase_solve(const OdeSystem& sys, const std::vector<double>& grid, int i0,
                     std::span<const double> y_right,
                     std::span<const BoundaryPin> left_pins,
                     std::span<const BoundaryPin> right_pins,
                     const SolverConfig& config, std::vector<double>& Y) {
  const int n = sys.dim();
  const int m = static_cast<int>(grid.size()) - i0;
  std::vector<double> rev_nodes(m);
  for (int i = 0; i < m; ++i) rev_nodes[i] = grid[grid.size() - 1 - i];
  std::vector<double> sweep;
  rk45_sweep(sys, rev_nodes, y_right, config.rk_atol, config.rk_rtol, sweep);
  Y.assign(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i)
    std::memcpy(&Y[(m - 1 - i) * n], &sweep[i * n], sizeof(double) * n);
  std::span<const double> mesh(grid.data() + i0, m);
  relax_collocation(sys, mesh, left_pins, right_pins, Y, config.max_relaxation_iters);
}

// 5-point Gauss-Legendre reference rule on (0,1).
constexpr double kGlx[5] = {0.046910077030668004, 0.23076534494715845, 0.5,
                            0.76923465505284155, 0.953089922969332};
constexpr double kGlw[5] = {0.11846344252809454, 0.23931433524968324,
                            0.28444444444444444, 0.23931433524968324,
                            0.11846344252809454};

}  // namespace

PainleveState solve_q0(double lambda, const SolverConfig& config) {
  return solve_q0(lambda, config, nullptr);
}

PainleveState solve_q0(double lambda, const SolverConfig& config,
                       const PainleveState* base) {
  config.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("solve_q0: lambda must lie in [0,1]");
  if (lambda >= 0.95 && lambda < 1.0) {
    if (base != nullptr) return solve_q0_correction(lambda, *base, config);
    PainleveState b = solve_q0(1.0, config);
    return solve_q0_correction(lambda, b, config);
  }

  PainleveState st;
  st.lambda = lambda;
  st.grid = make_grid(config);
  const int m = static_cast<int>(st.grid.size());
  st.q0.assign(m, 0.0);
  st.q0p.assign(m, 0.0);
  st.I0.assign(m, 0.0);
  st.I0p.assign(m, 0.0);
  st.J0.assign(m, 0.0);
  if (lambda == 0.0) {
    st.build_interpolants();
    return st;
  }

  const double rl = std::sqrt(lambda);
  const double y_right[5] = {rl * airy_ai(config.s_right),
                             rl * airy_ai_prime(config.s_right), 0.0, 0.0, 0.0};
  const bool patched = (lambda == 1.0);
  const int i0 = patched ? patch_index(st.grid, config.patch_point) : 0;

  // For lambda = 1 the connection-problem instability makes all-right
  // boundary data numerically indeterminate at the left end; the unstable
  // mode is anchored by pinning q0' at the patch point to the series
  // derivative, leaving the q0 value there free (it is a tested quantity).
  std::vector<BoundaryPin> left_pins, right_pins;
  if (patched) {
    left_pins.push_back({1, q0_left_asymptotic(-2.0 * st.grid[i0]).second});
    right_pins = {{0, y_right[0]}, {2, 0.0}, {3, 0.0}, {4, 0.0}};
  } else {
    right_pins = {{0, y_right[0]}, {1, y_right[1]}, {2, 0.0}, {3, 0.0}, {4, 0.0}};
  }

  Q0System sys;
  std::vector<double> Y;
  two_phase_solve(sys, st.grid, i0, std::span<const double>(y_right, 5), left_pins,
                  right_pins, config, Y);
  for (int i = i0; i < m; ++i) {
    const double* row = &Y[(i - i0) * 5];
    st.q0[i] = row[0];
    st.q0p[i] = row[1];
    st.I0[i] = row[2];
    st.I0p[i] = row[3];
    st.J0[i] = row[4];
  }

  if (patched && i0 > 0) {
    // Replace [s_left, patch) by the left expansion and extend the integrals
    // by cellwise quadrature of the series.
    const double sp = st.grid[i0];
    double A = 0, B = 0, C = 0;  // int q0^2, int x q0^2, int q0 over [s, sp]
    for (int i = i0 - 1; i >= 0; --i) {
      const double a = st.grid[i], b = st.grid[i + 1];
      for (int g = 0; g < 5; ++g) {
        const double x = a + (b - a) * kGlx[g];
        const double w = (b - a) * kGlw[g];
        const double q = q0_left_asymptotic(-2.0 * x).first;
        A += w * q * q;
        B += w * x * q * q;
        C += w * q;
      }
      auto [qv, qd] = q0_left_asymptotic(-2.0 * a);
      st.q0[i] = qv;
      st.q0p[i] = qd;
      st.I0[i] = (B - a * A) + st.I0[i0] + (sp - a) * (-st.I0p[i0]);
      st.I0p[i] = st.I0p[i0] - A;
      st.J0[i] = st.J0[i0] + C;
    }
  }
  st.build_interpolants();
  return st;
}

namespace {

// y = (w, w', dI, dI', dJ) where q = q0 + (lambda-1) w and
//   dI = int (x-s)(2 q0 w + (lambda-1) w^2),  dJ = int w,
// so that I0_lambda = I0 + (lambda-1) dI and J0_lambda = J0 + (lambda-1) dJ.
class CorrectionSystem final : public OdeSystem {
 public:
  CorrectionSystem(const PainleveState& base, double lambda)
      : base_(base), lm1_(lambda - 1.0) {}
  int dim() const override { return 5; }
  void f(double s, const double* y, double* dy) const override {
    const double q0 = base_.q(s);
    const double w = y[0];
    const double q = q0 + lm1_ * w;
    dy[0] = y[1];
    dy[1] = s * w + 2.0 * w * (q * q + q * q0 + q0 * q0);
    dy[2] = y[3];
    dy[3] = 2.0 * q0 * w + lm1_ * w * w;
    dy[4] = -w;
  }
  void jac(double s, const double* y, double* J) const override {
    std::memset(J, 0, sizeof(double) * 25);
    const double q0 = base_.q(s);
    const double w = y[0];
    const double q = q0 + lm1_ * w;
    J[0 * 5 + 1] = 1.0;
    J[1 * 5 + 0] = s + 2.0 * (q * q + q * q0 + q0 * q0) + 2.0 * w * lm1_ * (2.0 * q + q0);
    J[2 * 5 + 3] = 1.0;
    J[3 * 5 + 0] = 2.0 * q0 + 2.0 * lm1_ * w;
    J[4 * 5 + 0] = -1.0;
  }

 private:
  const PainleveState& base_;
  double lm1_;
};

}  // namespace

PainleveState solve_q0_correction(double lambda, const PainleveState& base,
                                  const SolverConfig& config) {
  config.validate();
  if (base.lambda != 1.0)
    throw std::invalid_argument("solve_q0_correction: base must be at lambda = 1");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("solve_q0_correction: lambda must lie in [0,1)");
  if (base.grid.size() != static_cast<std::size_t>(config.relaxation_mesh_size))
    throw std::invalid_argument("solve_q0_correction: base grid does not match config");

  const double rl = std::sqrt(lambda);
  const double bc = 1.0 / (1.0 + rl);  // (sqrt(l)-1)/(l-1)
  const double y_right[5] = {bc * airy_ai(config.s_right),
                             bc * airy_ai_prime(config.s_right), 0.0, 0.0, 0.0};
  std::vector<BoundaryPin> right_pins = {
      {0, y_right[0]}, {1, y_right[1]}, {2, 0.0}, {3, 0.0}, {4, 0.0}};

  CorrectionSystem sys(base, lambda);
  std::vector<double> Y;
  two_phase_solve(sys, base.grid, 0, std::span<const double>(y_right, 5), {},
                  right_pins, config, Y);

  PainleveState st;
  st.lambda = lambda;
  st.grid = base.grid;
  const int m = static_cast<int>(st.grid.size());
  st.q0.resize(m);
  st.q0p.resize(m);
  st.I0.resize(m);
  st.I0p.resize(m);
  st.J0.resize(m);
  const double lm1 = lambda - 1.0;
  for (int i = 0; i < m; ++i) {
    const double* row = &Y[i * 5];
    st.q0[i] = base.q0[i] + lm1 * row[0];
    st.q0p[i] = base.q0p[i] + lm1 * row[1];
    st.I0[i] = base.I0[i] + lm1 * row[2];
    st.I0p[i] = base.I0p[i] + lm1 * row[3];
    st.J0[i] = base.J0[i] + lm1 * row[4];
  }
  st.build_interpolants();
  return st;
}

void solve_q1(PainleveState& base, const SolverConfig& config) {
  config.validate();
  if (base.lambda != 1.0)
    throw std::invalid_argument("solve_q1: base state must be at lambda = 1");
  const int m = static_cast<int>(base.grid.size());
  base.q1.assign(m, 0.0);
  base.q1p.assign(m, 0.0);
  base.I1.assign(m, 0.0);
  base.I1p.assign(m, 0.0);
  base.J1.assign(m, 0.0);
  base.K1.assign(m, 0.0);

  const double y_right[11] = {airy_ai(config.s_right),
                              airy_ai_prime(config.s_right),
                              0.0,
                              0.0,
                              0.0,
                              0.5 * airy_ai(config.s_right),
                              0.5 * airy_ai_prime(config.s_right),
                              0.0,
                              0.0,
                              0.0,
                              0.0};
  const int i0 = patch_index(base.grid, config.patch_point);

  // q1 rides the leftward-growing mode, so its block is relatively stable
  // with right-only data; only the q0 block needs the left anchor.
  std::vector<BoundaryPin> left_pins = {
      {1, q0_left_asymptotic(-2.0 * base.grid[i0]).second}};
  std::vector<BoundaryPin> right_pins = {{0, y_right[0]}, {2, 0.0}, {3, 0.0},
                                         {4, 0.0},        {5, y_right[5]},
                                         {6, y_right[6]}, {7, 0.0},
                                         {8, 0.0},        {9, 0.0},
                                         {10, 0.0}};

  Q0Q1System sys;
  std::vector<double> Y;
  two_phase_solve(sys, base.grid, i0, std::span<const double>(y_right, 11), left_pins,
                  right_pins, config, Y);
  for (int i = i0; i < m; ++i) {
    const double* row = &Y[(i - i0) * 11];
    base.q0[i] = row[0];
    base.q0p[i] = row[1];
    base.I0[i] = row[2];
    base.I0p[i] = row[3];
    base.J0[i] = row[4];
    base.q1[i] = row[5];
    base.q1p[i] = row[6];
    base.I1[i] = row[7];
    base.I1p[i] = row[8];
    base.J1[i] = row[9];
    base.K1[i] = row[10];
  }

  if (i0 > 0) {
    const double sp = base.grid[i0];
    double A = 0, B = 0, C = 0;     // q0^2, x q0^2, q0
    double A1 = 0, B1 = 0, C1 = 0;  // q0 q1, x q0 q1, q1
    for (int i = i0 - 1; i >= 0; --i) {
      const double a = base.grid[i], b = base.grid[i + 1];
      for (int g = 0; g < 5; ++g) {
        const double x = a + (b - a) * kGlx[g];
        const double w = (b - a) * kGlw[g];
        const double q = q0_left_asymptotic(-2.0 * x).first;
        const double q1v = q1_left_asymptotic(-2.0 * x);
        A += w * q * q;
        B += w * x * q * q;
        C += w * q;
        A1 += w * q * q1v;
        B1 += w * x * q * q1v;
        C1 += w * q1v;
      }
      auto [qv, qd] = q0_left_asymptotic(-2.0 * a);
      base.q0[i] = qv;
      base.q0p[i] = qd;
      base.I0[i] = (B - a * A) + base.I0[i0] + (sp - a) * (-base.I0p[i0]);
      base.I0p[i] = base.I0p[i0] - A;
      base.J0[i] = base.J0[i0] + C;
      base.q1[i] = q1_left_asymptotic(-2.0 * a);
      base.q1p[i] = detail::q1_left_asymptotic_ds(-2.0 * a);
      base.I1[i] = (B1 - a * A1) + base.I1[i0] + (sp - a) * (-base.I1p[i0]);
      base.I1p[i] = base.I1p[i0] - A1;
      base.J1[i] = base.J1[i0] + A1;
      base.K1[i] = base.K1[i0] + C1;
    }
  }
  base.has_q1 = true;
  base.build_interpolants();
}

void PainleveState::build_interpolants() {
  const std::size_t m = grid.size();
  std::vector<double> j0_slope(m), i0p_slope(m), j1_slope(m), k1_slope(m);
  for (std::size_t i = 0; i < m; ++i) {
    j0_slope[i] = -q0[i];
    i0p_slope[i] = q0[i] * q0[i];
  }
  q_itp_ = CubicHermite(grid, q0, q0p);
  i0_itp_ = CubicHermite(grid, I0, I0p);
  i0p_itp_ = CubicHermite(grid, I0p, i0p_slope);
  j0_itp_ = CubicHermite(grid, J0, j0_slope);
  if (has_q1) {
    for (std::size_t i = 0; i < m; ++i) {
      j1_slope[i] = -q0[i] * q1[i];
      k1_slope[i] = -q1[i];
    }
    i1_itp_ = CubicHermite(grid, I1, I1p);
    j1_itp_ = CubicHermite(grid, J1, j1_slope);
    k1_itp_ = CubicHermite(grid, K1, k1_slope);
  }
}

double PainleveState::q(double s) const { return q_itp_(s); }
double PainleveState::i0(double s) const { return i0_itp_(s); }
double PainleveState::i0p(double s) const { return i0p_itp_(s); }
double PainleveState::j0(double s) const { return j0_itp_(s); }
double PainleveState::i1(double s) const {
  if (!has_q1) throw std::logic_error("PainleveState: q1 block not solved");
  return i1_itp_(s);
}
double PainleveState::j1(double s) const {
  if (!has_q1) throw std::logic_error("PainleveState: q1 block not solved");
  return j1_itp_(s);
}
double PainleveState::k1(double s) const {
  if (!has_q1) throw std::logic_error("PainleveState: q1 block not solved");
  return k1_itp_(s);
}

double mu(const PainleveState& state, double s) {
  if (s < state.grid.front() - 1e-12 || s > state.grid.back() + 1e-12)
    throw std::out_of_range("mu: s outside solver range");
  return state.j0(s);
}

namespace {

// cache files are little-endian by contract
static_assert(std::endian::native == std::endian::little);

constexpr std::uint32_t kCacheMagic = 0x54575053;  // "TWPS"
constexpr std::uint32_t kCacheVersion = 1;

void write_raw(std::ofstream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_vec(std::ofstream& os, const std::vector<double>& v) {
  write_raw(os, v.data(), v.size() * sizeof(double));
}

bool read_raw(std::ifstream& is, void* p, std::size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  return bool(is);
}

bool read_vec(std::ifstream& is, std::vector<double>& v, std::size_t n) {
  v.resize(n);
  return read_raw(is, v.data(), n * sizeof(double));
}

}  // namespace

void save_state(const PainleveState& state, std::uint64_t config_hash,
                const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save_state: cannot open " + path.string());
  std::uint32_t magic = kCacheMagic, version = kCacheVersion;
  std::uint32_t has_q1 = state.has_q1 ? 1 : 0;
  std::uint64_t n = state.grid.size();
  write_raw(os, &magic, 4);
  write_raw(os, &version, 4);
  write_raw(os, &config_hash, 8);
  write_raw(os, &state.lambda, 8);
  write_raw(os, &has_q1, 4);
  write_raw(os, &n, 8);
  write_vec(os, state.grid);
  write_vec(os, state.q0);
  write_vec(os, state.q0p);
  write_vec(os, state.I0);
  write_vec(os, state.I0p);
  write_vec(os, state.J0);
  if (state.has_q1) {
    write_vec(os, state.q1);
    write_vec(os, state.q1p);
    write_vec(os, state.I1);
    write_vec(os, state.I1p);
    write_vec(os, state.J1);
    write_vec(os, state.K1);
  }
}

std::optional<PainleveState> load_state(const std::filesystem::path& path,
                                        std::uint64_t config_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint32_t magic = 0, version = 0, has_q1 = 0;
  std::uint64_t hash = 0, n = 0;
  PainleveState st;
  if (!read_raw(is, &magic, 4) || magic != kCacheMagic) return std::nullopt;
  if (!read_raw(is, &version, 4) || version != kCacheVersion) return std::nullopt;
  if (!read_raw(is, &hash, 8) || hash != config_hash) return std::nullopt;
  if (!read_raw(is, &st.lambda, 8)) return std::nullopt;
  if (!read_raw(is, &has_q1, 4)) return std::nullopt;
  if (!read_raw(is, &n, 8) || n < 2 || n > (1u << 24)) return std::nullopt;
  st.has_q1 = has_q1 != 0;
  if (!read_vec(is, st.grid, n) || !read_vec(is, st.q0, n) || !read_vec(is, st.q0p, n) ||
      !read_vec(is, st.I0, n) || !read_vec(is, st.I0p, n) || !read_vec(is, st.J0, n))
    return std::nullopt;
  if (st.has_q1) {
    if (!read_vec(is, st.q1, n) || !read_vec(is, st.q1p, n) || !read_vec(is, st.I1, n) ||
        !read_vec(is, st.I1p, n) || !read_vec(is, st.J1, n) || !read_vec(is, st.K1, n))
      return std::nullopt;
  }
  st.build_interpolants();
  return st;
}

void export_state_csv(const PainleveState& state, std::uint64_t config_hash,
                      const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("export_state_csv: cannot open " + path.string());
  char line[1024];
  std::snprintf(line, sizeof line, "# twdist painleve state, version=%s, config_hash=%016llx, lambda=%.17g\n",
                kCodeVersion, static_cast<unsigned long long>(config_hash), state.lambda);
  os << line;
  os << "s,q0,q0_prime,I0,I0_prime,J0";
  if (state.has_q1) os << ",q1,q1_prime,I1,I1_prime,J1,K1";
  os << "\n";
  for (std::size_t i = 0; i < state.grid.size(); ++i) {
    int k = std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                          state.grid[i], state.q0[i], state.q0p[i], state.I0[i],
                          state.I0p[i], state.J0[i]);
    os.write(line, k);
    if (state.has_q1) {
      k = std::snprintf(line, sizeof line, ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                        state.q1[i], state.q1p[i], state.I1[i], state.I1p[i],
                        state.J1[i], state.K1[i]);
      os.write(line, k);
    }
    os << "\n";
  }
}

}  // namespace twdist
