// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "twdist/special.hpp"

#include "twdist/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace twdist {

namespace {

using quad = __float128;

// Ai(0) and Ai'(0) as hi+lo double pairs, accurate to ~1e-33.
constexpr double kAi0Hi = 0.3550280538878172;
constexpr double kAi0Lo = 2.05233632436212e-17;
constexpr double kAip0Hi = -0.2588194037928068;
constexpr double kAip0Lo = 2.522243111610832e-17;

// u_k coefficients of the Airy asymptotic expansions (DLMF 9.7),
// u_0 = 1, u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)),
// v_k = u_k (6k+1)/(1-6k).
double next_u(double u_prev, int k) {
  return u_prev * double(6 * k - 5) * double(6 * k - 3) * double(6 * k - 1) /
         (216.0 * k * (2 * k - 1));
}

}  // namespace

namespace detail {

// Maclaurin series of Ai and Ai' evaluated in __float128. The two basis
// solutions of y'' = xy and their derivatives are summed term by term;
// only arithmetic is needed, so no quadmath calls.
double airy_series(double x, bool prime) {
  const quad xq = x;
  const quad x3 = xq * xq * xq;
  const quad c1 = quad(kAi0Hi) + quad(kAi0Lo);
  const quad c2 = quad(kAip0Hi) + quad(kAip0Lo);

  // f = sum c_k x^{3k}, g = sum e_k x^{3k+1}; fp, gp are the derivatives.
  quad f = 1, tf = 1;
  quad g = xq, tg = xq;
  quad fp = 0, tfp = xq * xq / 2;  // first nonzero f' term (k=1)
  quad gp = 1, tgp = 1;
  for (int k = 0; k < 300; ++k) {
    tf *= x3 / quad((3 * k + 2) * (3 * k + 3));
    f += tf;
    tg *= x3 / quad((3 * k + 3) * (3 * k + 4));
    g += tg;
    if (k >= 1) tfp *= (quad(k + 1) / quad(k)) * x3 / quad((3 * k + 2) * (3 * k + 3));
    fp += tfp;
    tgp *= x3 / quad((3 * k + 1) * (3 * k + 3));
    gp += tgp;
    quad scale = (f < 0 ? -f : f) + (g < 0 ? -g : g);
    quad t = (tf < 0 ? -tf : tf) + (tg < 0 ? -tg : tg);
    if (t < scale * quad(1e-36) && k > 3) break;
  }
  quad r = prime ? (c1 * fp + c2 * gp) : (c1 * f + c2 * g);
  return double(r);
}

// Decaying branch for x >> 0: Ai ~ e^{-z}/(2 sqrt(pi) x^{1/4}) sum (-1)^k u_k z^-k.
// Truncated at the smallest term.
double airy_asymptotic_right(double x, bool prime) {
  const double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
  double u = 1.0, sum = 1.0, prev = 1.0;
  double sign = -1.0, zk = 1.0;
  for (int k = 1; k < 60; ++k) {
    u = next_u(u, k);
    zk /= zeta;
    double c = prime ? u * (6.0 * k + 1) / (1.0 - 6.0 * k) : u;
    double term = sign * c * zk;
    if (std::abs(term) >= std::abs(prev)) break;
    sum += term;
    prev = term;
    sign = -sign;
  }
  const double pref = 0.5 / std::sqrt(M_PI) * std::exp(-zeta);
  if (prime) return -pref * std::pow(x, 0.25) * sum;
  return pref * std::pow(x, -0.25) * sum;
}

// Oscillatory branch for x << 0 (DLMF 9.7.9 / 9.7.10 with z = -x):
//   Ai(-z)  =  (cos(w) P + sin(w) Q) / (sqrt(pi) z^{1/4})
//   Ai'(-z) =  z^{1/4}/sqrt(pi) (sin(w) R - cos(w) S),   w = zeta - pi/4,
// where P,Q (resp. R,S) are the even/odd u_k (v_k) subseries.
double airy_asymptotic_left(double x, bool prime) {
  const double z = -x;
  const double zeta = 2.0 / 3.0 * std::pow(z, 1.5);
  double us[40];
  us[0] = 1.0;
  for (int k = 1; k < 40; ++k) us[k] = next_u(us[k - 1], k);
  double even = 0, odd = 0;
  double zk = 1.0, prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 40; ++k) {
    double c = us[k];
    if (prime) c *= (k == 0) ? 1.0 : (6.0 * k + 1) / (1.0 - 6.0 * k);
    double term = ((k / 2) % 2 ? -1.0 : 1.0) * c * zk;  // (-1)^{floor(k/2)}
    if (std::abs(term) >= prev) break;
    if (k % 2 == 0)
      even += term;
    else
      odd += term;
    prev = std::abs(term);
    zk /= zeta;
  }
  const double w = zeta - M_PI / 4;
  if (prime)
    return std::pow(z, 0.25) / std::sqrt(M_PI) * (std::sin(w) * even - std::cos(w) * odd);
  return (std::cos(w) * even + std::sin(w) * odd) / (std::sqrt(M_PI) * std::pow(z, 0.25));
}

}  // namespace detail

double airy_ai(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("airy_ai: x must be finite");
  if (x > detail::kAirySeamRight) return detail::airy_asymptotic_right(x, false);
  if (x < detail::kAirySeamLeft) return detail::airy_asymptotic_left(x, false);
  return detail::airy_series(x, false);
}

double airy_ai_prime(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("airy_ai_prime: x must be finite");
  if (x > detail::kAirySeamRight) return detail::airy_asymptotic_right(x, true);
  if (x < detail::kAirySeamLeft) return detail::airy_asymptotic_left(x, true);
  return detail::airy_series(x, true);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton on P_n over (-1,1), Chebyshev-like initial guesses; symmetric pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map from (-1,1); x is the i-th root from the right
    int hi = n - 1 - i;
    rule.nodes[hi] = a + (b - a) * 0.5 * (1.0 + x);
    rule.nodes[i] = a + (b - a) * 0.5 * (1.0 - x);
    rule.weights[i] = rule.weights[hi] = w * 0.5 * (b - a);
  }
  if (n % 2 == 1) {
    // center node of odd rules is exactly the midpoint
    rule.nodes[n / 2] = 0.5 * (a + b);
  }
  return rule;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t id) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (id * 0x632BE59BD9B4E019ULL + 0xD1B54A32D192ED03ULL);
  return splitmix64(s);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : gen_(stream_seed(master_seed, stream_id)) {}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform() {
  return (double(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::chi(int k) {
  if (k < 1) throw std::invalid_argument("RngStream::chi: k must be >= 1");
  if (k <= 16) {
    double s = 0;
    for (int i = 0; i < k; ++i) {
      double z = normal();
      s += z * z;
    }
    return std::sqrt(s);
  }
  return std::sqrt(2.0 * gamma(0.5 * k));
}

double RngStream::gamma(double shape) {
  // Marsaglia-Tsang squeeze; valid for shape >= 1.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace twdist

#ifdef _OPENMP
#include <omp.h>
#endif

namespace twdist {

int max_threads(Exec exec) {
  if (exec == Exec::Serial) return 1;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace twdist
