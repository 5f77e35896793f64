#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "hermrep/errors.hpp"

namespace hermrep {

/// Gauss-Hermite rule in shifted log-weight form.
///
/// log_weights[i] = log(w_i) + x_i^2, so that
///   integral f(x) dx  ~=  sum_i exp(log_weights[i]) * f(x_i)
/// for integrands that already carry Gaussian decay. Raw weights underflow
/// near order 700; the shifted quantity stays representable at any order.
struct QuadratureRule {
  std::vector<double> nodes;        // strictly increasing, antisymmetric
  std::vector<double> log_weights;  // log w_i + x_i^2
  int order = 0;
};

/// Nodes from the eigenvalues of the Jacobi matrix (off-diagonal sqrt(k/2)),
/// polished by Newton steps on the order-N Hermite function; weights from
/// the Christoffel sum of squared Hermite functions, which evaluates the
/// first-eigenvector formula without ever forming an underflowing raw weight.
QuadratureRule gauss_hermite(int order);

/// Orthonormal Hermite function value by the three-term recurrence
///   H_{n+1} = x sqrt(2/(n+1)) H_n - sqrt(n/(n+1)) H_{n-1},
/// seeded by H_0 = pi^{-1/4} e^{-x^2/2}. The recurrence runs with
/// power-of-two rescaling, so values deep under the turning point are
/// recovered even where the seed underflows. n up to 1e5.
double hermite_eval(long n, double x);

/// H_0(x) .. H_{n_max}(x) into out (size n_max+1). Entries whose true
/// magnitude is below the double range come out as 0.
void hermite_values(long n_max, double x, std::span<double> out);

/// alpha-th derivative of H_n via the ladder rule
///   H_n' = sqrt(n/2) H_{n-1} - sqrt((n+1)/2) H_{n+1},
/// expanded alpha-fold into a fan over H_{n-alpha}..H_{n+alpha}. alpha <= 30.
double hermite_deriv(long n, double x, int alpha);

/// Tensor-product Hermite function H_{n_1}(x_1)...H_{n_d}(x_d).
double tensor_eval(std::span<const long> n, std::span<const double> x);

/// sum_i exp(log_weights[i]) * f(x_i): the rule applied to an integrand
/// with built-in Gaussian decay.
template <typename F>
auto quad_integrate(const QuadratureRule& rule, F&& f) {
  using R = decltype(f(0.0));
  R acc{};
  for (int i = 0; i < rule.order; ++i)
    acc += std::exp(rule.log_weights[i]) * f(rule.nodes[i]);
  return acc;
}

namespace detail {

/// Runs the Hermite recurrence at fixed x, calling f(k, mant, exp2) with
/// H_k(x) = ldexp(mant, exp2) for k = 0..n. Rescaling is by exact powers of
/// two, so the mantissa stream is bit-identical to the unscaled recurrence.
template <typename F>
void hermite_scan(long n, double x, F&& f) {
  // Seed in mantissa/exponent form: log H_0 = -x^2/2 - (1/4) log pi.
  static const double kQuarterLogPi = 0.25 * std::log(M_PI);
  const double t = -0.5 * x * x - kQuarterLogPi;
  // Cody-Waite split of log 2 keeps the reduction exact for |e| < 2^20.
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  long e = static_cast<long>(std::floor(t / M_LN2));
  const double r = (t - e * kLn2Hi) - e * kLn2Lo;
  double prev = 0.0;        // H_{k-1} mantissa
  double cur = std::exp(r); // H_k mantissa, k = 0
  f(0L, cur, e);
  for (long k = 0; k < n; ++k) {
    const double dk = static_cast<double>(k);
    double next = x * std::sqrt(2.0 / (dk + 1.0)) * cur -
                  std::sqrt(dk / (dk + 1.0)) * prev;
    prev = cur;
    cur = next;
    const double mag = std::max(std::fabs(cur), std::fabs(prev));
    if (mag > 0x1p500) {
      prev = std::ldexp(prev, -512);
      cur = std::ldexp(cur, -512);
      e += 512;
    } else if (mag > 0.0 && mag < 0x1p-500) {
      prev = std::ldexp(prev, 512);
      cur = std::ldexp(cur, 512);
      e -= 512;
    }
    f(k + 1, cur, e);
  }
}

}  // namespace detail

}  // namespace hermrep
