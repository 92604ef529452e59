// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "twdist/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "twdist/numerics.hpp"
#include "twdist/version.hpp"

#include "json.hpp"

namespace twdist {

namespace {

long long lambda_key(double lambda) {
  return static_cast<long long>(std::llround(lambda * 1e12));
}

// stable 1 - sqrt(lt) for lt = lambda_tilde(lambda)
double one_minus_sqrt_lt(double lambda) {
  const double e = 1.0 - lambda;
  return e * e / (1.0 + std::sqrt(lambda_tilde(lambda)));
}

}  // namespace

StateCache::StateCache(SolverConfig config) : config_(config) { config_.validate(); }

void StateCache::set_disk_cache(std::filesystem::path dir) {
  std::lock_guard<std::mutex> lock(mu_);
  disk_dir_ = std::move(dir);
  std::filesystem::create_directories(disk_dir_);
  disk_enabled_ = true;
}

StateCache::Stats StateCache::stats() const { return stats_; }

std::filesystem::path StateCache::state_path(long long key) const {
  char name[64];
  std::snprintf(name, sizeof name, "state_%lld.bin", key);
  return disk_dir_ / name;
}

const PainleveState& StateCache::base() {
  std::lock_guard<std::mutex> lock(mu_);
  if (!base_ready_) {
    bool solved = false;
    if (disk_enabled_) {
      auto path = state_path(lambda_key(1.0));
      if (auto st = load_state(path, config_.hash()); st && st->has_q1) {
        base_ = std::move(*st);
        ++stats_.disk_hits;
        solved = true;
      } else if (std::filesystem::exists(path)) {
        ++stats_.stale;
      }
    }
    if (!solved) {
      base_ = solve_q0(1.0, config_);
      solve_q1(base_, config_);
      ++stats_.solves;
      if (disk_enabled_) save_state(base_, config_.hash(), state_path(lambda_key(1.0)));
    }
    base_ready_ = true;
  }
  return base_;
}

const PainleveState& StateCache::at(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("StateCache: lambda must lie in [0,1]");
  if (lambda == 1.0) return base();
  const PainleveState* basep = nullptr;
  if (lambda >= 0.95) basep = &base();  // resolve outside the lock below
  std::lock_guard<std::mutex> lock(mu_);
  auto key = lambda_key(lambda);
  auto it = states_.find(key);
  if (it != states_.end()) return it->second;
  if (disk_enabled_) {
    auto path = state_path(key);
    if (auto st = load_state(path, config_.hash())) {
      ++stats_.disk_hits;
      return states_.emplace(key, std::move(*st)).first->second;
    }
    if (std::filesystem::exists(path)) ++stats_.stale;
  }
  PainleveState st = basep ? solve_q0_correction(lambda, *basep, config_)
                           : solve_q0(lambda, config_);
  ++stats_.solves;
  if (disk_enabled_) save_state(st, config_.hash(), state_path(key));
  return states_.emplace(key, std::move(st)).first->second;
}

double d2(double s, double lambda, StateCache& cache) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("d2: lambda must lie in [0,1]");
  if (lambda == 0.0) return 1.0;
  const PainleveState& st = cache.at(lambda);
  if (s < st.grid.front() - 1e-12 || s > st.grid.back() + 1e-12)
    throw std::out_of_range("d2: s outside solver range");
  return std::exp(-st.i0(s));
}

double d1(double s, double lambda, StateCache& cache) {
  if (!(lambda >= 0.0 && lambda < 2.0))
    throw std::invalid_argument("d1: lambda must lie in [0,2)");
  const double lt = lambda_tilde(lambda);
  const PainleveState& st = cache.at(lt);
  if (s < st.grid.front() - 1e-12 || s > st.grid.back() + 1e-12)
    throw std::out_of_range("d1: s outside solver range");
  const double mu_t = st.j0(s);
  const double dd2 = std::exp(-st.i0(s));
  // (lambda-1) - cosh(mu) + sqrt(lt) sinh(mu) written without cancellation:
  // all three contributions are <= 0 on lambda in [0,1].
  const double oms = one_minus_sqrt_lt(lambda);  // 1 - sqrt(lt)
  const double numer =
      (lambda - 1.0) - 0.5 * (oms * std::exp(mu_t) + (2.0 - oms) * std::exp(-mu_t));
  return dd2 * numer / (lambda - 2.0);
}

double d4(double s, double lambda, StateCache& cache) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("d4: lambda must lie in [0,1]");
  if (lambda == 0.0) return 1.0;
  const PainleveState& st = cache.at(lambda);
  if (s < st.grid.front() - 1e-12 || s > st.grid.back() + 1e-12)
    throw std::out_of_range("d4: s outside solver range");
  const double c = std::cosh(0.5 * st.j0(s));
  return std::exp(-st.i0(s)) * c * c;
}

namespace {

// One-sided Richardson differentiation at lambda = 1 with nodes 1 - j h.
// Levels halve h; two extrapolation stages remove the h^2 and h^3 error
// terms of the (order+2)-point backward formulas.
struct FdEstimate {
  double value = 0;
  double delta = 0;
};

FdEstimate one_sided_fd(const std::function<double(double)>& g, int order, double h,
                        int levels) {
  if (levels < 2) levels = 2;
  const int npts = order + 2;
  std::vector<double> E(levels);
  for (int l = 0; l < levels; ++l) {
    const double hl = h / double(1 << l);
    std::vector<double> nodes(npts);
    for (int j = 0; j < npts; ++j) nodes[j] = 1.0 - j * hl;
    std::vector<double> w = fd_weights(1.0, nodes, order);
    double acc = 0;
    for (int j = 0; j < npts; ++j) acc += w[j] * g(nodes[j]);
    E[l] = acc;
  }
  std::vector<double> R(levels - 1);
  for (int l = 0; l + 1 < levels; ++l) R[l] = (4.0 * E[l + 1] - E[l]) / 3.0;
  if (levels == 2) return {R[0], std::abs(R[0] - E[1])};
  std::vector<double> S(levels - 2);
  for (int l = 0; l + 2 < levels; ++l) S[l] = (8.0 * R[l + 1] - R[l]) / 7.0;
  return {S.back(), std::abs(S.back() - R.back())};
}

double fd_flag_tolerance(int order) {
  switch (order) {
    case 1: return 5e-5;
    case 2: return 5e-4;
    default: return 5e-3;
  }
}

// D_beta^{1/2}(s, lambda) as a function of lambda for the FD paths.
double root_d(int beta, double s, double lambda, StateCache& cache) {
  switch (beta) {
    case 2: {
      const PainleveState& st = cache.at(lambda);
      return std::exp(-0.5 * st.i0(s));
    }
    case 1:
      return std::sqrt(d1(s, lambda, cache));
    case 4: {
      const PainleveState& st = cache.at(lambda);
      return std::exp(-0.5 * st.i0(s)) * std::cosh(0.5 * st.j0(s));
    }
    default:
      throw std::invalid_argument("beta must be one of {1,2,4}");
  }
}

}  // namespace

LambdaDerivatives lambda_derivs(int beta, double s, int order, DerivMethod method,
                                StateCache& cache) {
  if (beta != 1 && beta != 2 && beta != 4)
    throw std::invalid_argument("lambda_derivs: beta must be one of {1,2,4}");
  if (order < 0 || order > 4)
    throw std::invalid_argument("lambda_derivs: order must lie in [0,4]");
  if (method == DerivMethod::Analytic && order > 1)
    throw std::invalid_argument("lambda_derivs: analytic forms exist for order <= 1 only");

  LambdaDerivatives out;
  out.beta = beta;
  out.s = s;
  out.order = order;
  out.method = method;

  const PainleveState& base = cache.base();
  const double rt_d2 = std::exp(-0.5 * base.i0(s));
  const double mu1 = base.j0(s);
  const double i1 = base.i1(s);
  const double k1 = base.k1(s);

  for (int k = 0; k <= order; ++k) {
    if (k == 0) {
      double v = rt_d2;
      if (beta == 1) v = rt_d2 * std::exp(-0.5 * mu1);
      if (beta == 4) v = rt_d2 * std::cosh(0.5 * mu1);
      out.values.push_back(v);
      continue;
    }
    if (k == 1 && method == DerivMethod::Analytic) {
      double v;
      if (beta == 2) {
        v = -i1 * rt_d2;
      } else if (beta == 1) {
        v = -rt_d2 * std::sinh(0.5 * mu1);
      } else {
        v = -i1 * rt_d2 * std::cosh(0.5 * mu1) + 0.5 * k1 * rt_d2 * std::sinh(0.5 * mu1);
      }
      out.values.push_back(v);
      continue;
    }
    auto g = [&](double lam) { return root_d(beta, s, lam, cache); };
    FdEstimate e = one_sided_fd(g, k, cache.config().lambda_stencil_h,
                                cache.config().fd_richardson_levels);
    out.values.push_back(e.value);
    out.last_delta = std::max(out.last_delta, e.delta);
    if (e.delta > 10.0 * fd_flag_tolerance(k)) out.converged = false;
  }
  return out;
}

int max_order_m(int beta) {
  switch (beta) {
    case 1: return 4;
    case 2: return 4;
    case 4: return 2;
    default: throw std::invalid_argument("beta must be one of {1,2,4}");
  }
}

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double f_cdf(int beta, int m, double s, StateCache& cache, Beta4Route route) {
  if (beta != 1 && beta != 2 && beta != 4)
    throw std::invalid_argument("f_cdf: beta must be one of {1,2,4}");
  if (m < 1) throw std::invalid_argument("f_cdf: m must be >= 1");
  if (m > max_order_m(beta))
    throw std::invalid_argument("f_cdf: m exceeds the certified derivative-order cap");
  if (beta == 4 && route == Beta4Route::Interlacing) return f_cdf(1, 2 * m, s, cache);

  const PainleveState& base = cache.base();
  const double i0v = base.i0(s);
  const double mu1 = base.j0(s);
  const double i1 = base.i1(s);
  const double k1 = base.k1(s);

  double acc = 0;
  for (int j = 0; j < m; ++j) {
    double deriv;  // d^j/dlambda^j of the generating function at lambda = 1
    if (beta == 2) {
      // plain D2, not its square root
      if (j == 0)
        deriv = std::exp(-i0v);
      else if (j == 1)
        deriv = -2.0 * i1 * std::exp(-i0v);
      else {
        auto g = [&](double lam) {
          return lam == 1.0 ? std::exp(-i0v) : std::exp(-cache.at(lam).i0(s));
        };
        deriv = one_sided_fd(g, j, cache.config().lambda_stencil_h,
                             cache.config().fd_richardson_levels)
                    .value;
      }
    } else if (beta == 1) {
      const double rt_d2 = std::exp(-0.5 * i0v);
      if (j == 0)
        deriv = rt_d2 * std::exp(-0.5 * mu1);
      else if (j == 1)
        deriv = -rt_d2 * std::sinh(0.5 * mu1);
      else {
        auto g = [&](double lam) { return std::sqrt(d1(s, lam, cache)); };
        deriv = one_sided_fd(g, j, cache.config().lambda_stencil_h,
                             cache.config().fd_richardson_levels)
                    .value;
      }
    } else {
      const double rt_d2 = std::exp(-0.5 * i0v);
      if (j == 0)
        deriv = rt_d2 * std::cosh(0.5 * mu1);
      else if (j == 1)
        deriv = -i1 * rt_d2 * std::cosh(0.5 * mu1) + 0.5 * k1 * rt_d2 * std::sinh(0.5 * mu1);
      else {
        auto g = [&](double lam) { return root_d(4, s, lam, cache); };
        deriv = one_sided_fd(g, j, cache.config().lambda_stencil_h,
                             cache.config().fd_richardson_levels)
                    .value;
      }
    }
    acc += ((j % 2) ? -1.0 : 1.0) / factorial(j) * deriv;
  }
  return acc;
}

double f_pdf(int beta, int m, double s, StateCache& cache) {
  if (m < 1) throw std::invalid_argument("f_pdf: m must be >= 1");
  if (m > max_order_m(beta))
    throw std::invalid_argument("f_pdf: m exceeds the certified derivative-order cap");
  if (m == 1) {
    const PainleveState& base = cache.base();
    const double intq2 = -base.i0p(s);  // int_s^inf q0^2
    const double q0 = base.q(s);
    const double rt_d2 = std::exp(-0.5 * base.i0(s));
    const double mu1 = base.j0(s);
    switch (beta) {
      case 2:
        return rt_d2 * rt_d2 * intq2;
      case 1:
        return rt_d2 * std::exp(-0.5 * mu1) * 0.5 * (intq2 + q0);
      case 4:
        return 0.5 * rt_d2 * (std::cosh(0.5 * mu1) * intq2 - q0 * std::sinh(0.5 * mu1));
      default:
        throw std::invalid_argument("f_pdf: beta must be one of {1,2,4}");
    }
  }
  const double h = 0.01;
  const PainleveState& base = cache.base();
  const double a = std::max(s - h, base.grid.front());
  const double b = std::min(s + h, base.grid.back());
  return (f_cdf(beta, m, b, cache) - f_cdf(beta, m, a, cache)) / (b - a);
}

double quantile(int beta, int m, double p, StateCache& cache) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("quantile: p must lie in (0,1)");
  const PainleveState& base = cache.base();
  double lo = base.grid.front(), hi = base.grid.back();
  double flo = f_cdf(beta, m, lo, cache), fhi = f_cdf(beta, m, hi, cache);
  if (p <= flo || p >= fhi)
    throw std::domain_error("quantile: p outside the cdf range attained on the grid");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f_cdf(beta, m, mid, cache);
    if (std::abs(fm - p) <= 1e-8) return mid;
    if (fm < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * std::max(1.0, std::abs(lo))) return 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator*(const Rational& o) const {
  Rational a(num, o.den), b(o.num, den);  // cross-reduce before multiplying
  return Rational(a.num * b.num, a.den * b.den);
}

Rational Rational::operator+(const Rational& o) const {
  long long g = std::gcd(den, o.den);
  long long l = den / g * o.den;
  return Rational(num * (l / den) + o.num * (l / o.den), l);
}

LemmaSequence lemma_a_seq(int j_max) {
  if (j_max < 0 || j_max > 20)
    throw std::invalid_argument("lemma_a_seq: j_max must lie in [0,20]");
  LemmaSequence seq;
  seq.a.push_back(Rational(1, 1));
  for (int j = 1; j <= j_max; ++j) {
    long long factor = (j % 2 == 0) ? (j - 1) : j;
    seq.a.push_back(seq.a.back() * Rational(factor, 1));
  }
  Rational fact(1, 1);
  for (int j = 0; j <= j_max; ++j) {
    if (j > 0) fact = fact * Rational(j, 1);
    seq.b.push_back(seq.a[j] * Rational(fact.den, fact.num));
  }
  return seq;
}

double flemma_check(double s, int n, StateCache& cache) {
  if (n != 0 && n != 1)
    throw std::invalid_argument("flemma_check: n must be 0 or 1");
  auto f = [&](double lam) {
    const PainleveState& st = cache.at(lambda_tilde(lam));
    return 1.0 - std::sqrt(lam / (2.0 - lam)) * std::tanh(0.5 * st.j0(s));
  };
  const double h = cache.config().lambda_stencil_h;
  const int levels = cache.config().fd_richardson_levels;
  double even, odd;
  if (n == 0) {
    even = f(1.0);
    odd = one_sided_fd(f, 1, h, levels).value;
  } else {
    even = one_sided_fd(f, 2, h, levels).value;
    odd = one_sided_fd(f, 3, h, levels).value;
  }
  const double target = (n == 0) ? 1.0 : 0.0;
  return std::abs(even - odd / double(2 * n + 1) - target);
}

DistributionTable build_table(int beta, int m_max, std::vector<double> grid,
                              StateCache& cache, Exec exec, Beta4Route route) {
  if (m_max < 1 || m_max > max_order_m(beta))
    throw std::invalid_argument("build_table: m_max out of range for beta");
  DistributionTable t;
  t.beta = beta;
  t.m_max = m_max;
  t.grid = std::move(grid);
  const int n = static_cast<int>(t.grid.size());
  t.cdf.assign(m_max, std::vector<double>(n, 0.0));
  t.pdf.assign(m_max, std::vector<double>(n, 0.0));

  // Warm every state the FD stencils will touch before going parallel.
  for (int m = 1; m <= m_max; ++m) f_cdf(beta, m, t.grid.front(), cache, route);

  const bool par = exec == Exec::Parallel;
  for (int m = 1; m <= m_max; ++m) {
    std::vector<double>& col = t.cdf[m - 1];
#pragma omp parallel for schedule(static) if (par)
    for (int i = 0; i < n; ++i) col[i] = f_cdf(beta, m, t.grid[i], cache, route);
  }

  // The finite-difference columns (m >= 3) carry ~1e-4 cancellation noise in
  // the far-left tail where the true cdf vanishes. The table contract is a
  // monotone cdf in [0,1] ordered in m, so project onto those constraints and
  // require the projection to stay below the certified FD accuracy.
  double max_adjust = 0;
  for (int m = 1; m <= m_max; ++m) {
    std::vector<double>& col = t.cdf[m - 1];
    double running = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = std::clamp(col[i], 0.0, 1.0);
      if (m > 1) v = std::max(v, t.cdf[m - 2][i]);
      v = std::max(v, running);
      max_adjust = std::max(max_adjust, std::abs(v - col[i]));
      col[i] = v;
      running = v;
    }
  }
  if (max_adjust > 5e-4)
    throw std::runtime_error(
        "build_table: monotone projection exceeded the certified FD accuracy");
  for (int m = 1; m <= m_max; ++m) {
    std::vector<double>& col = t.pdf[m - 1];
    if (m == 1) {
#pragma omp parallel for schedule(static) if (par)
      for (int i = 0; i < n; ++i) col[i] = f_pdf(beta, 1, t.grid[i], cache);
    } else {
      // centered differences of the tabulated cdf column
      const std::vector<double>& F = t.cdf[m - 1];
      for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - 1), hi = std::min(n - 1, i + 1);
        col[i] = (F[hi] - F[lo]) / (t.grid[hi] - t.grid[lo]);
      }
    }
  }
  return t;
}

void export_table_csv(const DistributionTable& t, std::uint64_t config_hash,
                      const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("export_table_csv: cannot open " + path.string());
  char line[256];
  std::snprintf(line, sizeof line, "# twdist table, version=%s, config_hash=%016llx, beta=%d, m_max=%d\n",
                kCodeVersion, static_cast<unsigned long long>(config_hash), t.beta, t.m_max);
  os << line;
  os << "s";
  for (int m = 1; m <= t.m_max; ++m) {
    std::snprintf(line, sizeof line, ",F%d(m=%d),f%d(m=%d)", t.beta, m, t.beta, m);
    os << line;
  }
  os << "\n";
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g", t.grid[i]);
    os << line;
    for (int m = 1; m <= t.m_max; ++m) {
      std::snprintf(line, sizeof line, ",%.17g,%.17g", t.cdf[m - 1][i], t.pdf[m - 1][i]);
      os << line;
    }
    os << "\n";
  }
}

void export_table_json(const DistributionTable& t, std::uint64_t config_hash,
                       const std::filesystem::path& path) {
  nlohmann::json j;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  j["version"] = kCodeVersion;
  j["config_hash"] = hash;
  j["beta"] = t.beta;
  j["m_max"] = t.m_max;
  j["s"] = t.grid;
  for (int m = 1; m <= t.m_max; ++m) {
    j["cdf"][std::to_string(m)] = t.cdf[m - 1];
    j["pdf"][std::to_string(m)] = t.pdf[m - 1];
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("export_table_json: cannot open " + path.string());
  os << j.dump(2) << "\n";
}

}  // namespace twdist
