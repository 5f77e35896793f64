#include "hermrep/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace hermrep {

namespace {

constexpr long kMaxHermiteIndex = 100000;

double ldexp_or_zero(double mant, long e2) {
  if (mant == 0.0 || e2 < -2000) return 0.0;
  if (e2 > 2000) return mant * std::numeric_limits<double>::infinity();
  return std::ldexp(mant, static_cast<int>(e2));
}

}  // namespace

double hermite_eval(long n, double x) {
  if (n < 0) return 0.0;  // H_{-k} := 0
  if (n > kMaxHermiteIndex) throw RangeError("hermite_eval: n beyond 1e5");
  double mant = 0.0;
  long e2 = 0;
  detail::hermite_scan(n, x, [&](long k, double m, long e) {
    if (k == n) {
      mant = m;
      e2 = e;
    }
  });
  return ldexp_or_zero(mant, e2);
}

void hermite_values(long n_max, double x, std::span<double> out) {
  if (n_max < 0) throw RangeError("hermite_values: negative n_max");
  if (n_max > kMaxHermiteIndex) throw RangeError("hermite_values: n beyond 1e5");
  if (static_cast<long>(out.size()) < n_max + 1)
    throw ShapeError("hermite_values: output span too small");
  detail::hermite_scan(n_max, x,
                       [&](long k, double m, long e) { out[k] = ldexp_or_zero(m, e); });
}

double hermite_deriv(long n, double x, int alpha) {
  if (n < 0) return 0.0;
  if (alpha < 0 || alpha > 30)
    throw RangeError("hermite_deriv: alpha must be in [0, 30]");
  if (alpha == 0) return hermite_eval(n, x);
  // Fan coefficients over offsets j in [-alpha, alpha]: index m = n + j.
  const int width = 2 * alpha + 1;
  std::vector<double> gamma(width, 0.0), next(width, 0.0);
  gamma[alpha] = 1.0;  // offset 0
  for (int step = 0; step < alpha; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int j = 0; j < width; ++j) {
      const double c = gamma[j];
      if (c == 0.0) continue;
      const long m = n + (j - alpha);
      if (m < 0) continue;
      // H_m' = sqrt(m/2) H_{m-1} - sqrt((m+1)/2) H_{m+1}
      if (m >= 1) next[j - 1] += c * std::sqrt(0.5 * m);
      next[j + 1] -= c * std::sqrt(0.5 * (m + 1));
    }
    std::swap(gamma, next);
  }
  const long top = n + alpha;
  double acc = 0.0;
  detail::hermite_scan(top, x, [&](long k, double m, long e) {
    const long j = k - n + alpha;
    if (j >= 0 && j < width && gamma[j] != 0.0)
      acc += gamma[j] * ldexp_or_zero(m, e);
  });
  return acc;
}

double tensor_eval(std::span<const long> n, std::span<const double> x) {
  if (n.size() != x.size())
    throw ShapeError("tensor_eval: index and point dimensions differ");
  if (n.empty()) throw ShapeError("tensor_eval: dimension must be >= 1");
  double prod = 1.0;
  for (size_t k = 0; k < n.size(); ++k) prod *= hermite_eval(n[k], x[k]);
  return prod;
}

QuadratureRule gauss_hermite(int order) {
  if (order < 2 || order > 2000)
    throw RangeError("gauss_hermite: order must be in [2, 2000]");

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw InternalError("gauss_hermite: tridiagonal eigensolver did not converge");

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + order);
  std::sort(rule.nodes.begin(), rule.nodes.end());

  // Newton polish on H_order: the exponent of the scaled recurrence cancels
  // in the ratio, so this works at any order.
  for (double& x : rule.nodes) {
    for (int it = 0; it < 3; ++it) {
      double m_nm1 = 0, m_n = 0, m_np1 = 0;
      detail::hermite_scan(order + 1, x, [&](long k, double m, long e) {
        (void)e;
        if (k == order - 1) m_nm1 = m;
        if (k == order) m_n = m;
        if (k == order + 1) m_np1 = m;
      });
      const double deriv = std::sqrt(0.5 * order) * m_nm1 -
                           std::sqrt(0.5 * (order + 1)) * m_np1;
      if (deriv == 0.0) break;
      const double step = m_n / deriv;
      if (!std::isfinite(step) || std::fabs(step) > 0.5) break;
      x -= step;
    }
  }
  std::sort(rule.nodes.begin(), rule.nodes.end());

  // Enforce exact antisymmetry.
  for (int i = 0; i < order / 2; ++i) {
    const double a = 0.5 * (rule.nodes[order - 1 - i] - rule.nodes[i]);
    rule.nodes[order - 1 - i] = a;
    rule.nodes[i] = -a;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

  // w_i = 1 / sum_{k<order} p_k(x_i)^2 in orthonormal-polynomial form;
  // with Hermite functions this reads log w_i + x_i^2 = -log S_i,
  // S_i = sum_{k<order} H_k(x_i)^2, a bounded sum.
  rule.log_weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double s = 0.0;
    detail::hermite_scan(order - 1, rule.nodes[i], [&](long k, double m, long e) {
      (void)k;
      const double v = ldexp_or_zero(m, e);
      s += v * v;
    });
    rule.log_weights[i] = -std::log(s);
  }
  for (int i = 0; i < order / 2; ++i) {
    const double lw = 0.5 * (rule.log_weights[i] + rule.log_weights[order - 1 - i]);
    rule.log_weights[i] = lw;
    rule.log_weights[order - 1 - i] = lw;
  }
  return rule;
}

}  // namespace hermrep
