#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hermrep/errors.hpp"
#include "hermrep/hermite.hpp"
#include "hermrep/weights.hpp"

namespace hermrep {

using Cplx = std::complex<double>;

enum class Provenance { analyzed, synthetic, operator_output };

std::string to_string(Provenance p);

/// Truncated Fourier-Hermite coefficient array over a d-dimensional index
/// box. Immutable by convention after construction: operations return new
/// reps. The truncation-loss scalar accumulates the l2 mass dropped past the
/// top index by box-shifting operators (raise, mul_x, diff).
class HermiteRep {
 public:
  HermiteRep(std::vector<long> shape, Provenance prov);

  int dims() const { return static_cast<int>(shape_.size()); }
  const std::vector<long>& shape() const { return shape_; }
  size_t size() const { return coeffs_.size(); }

  Cplx& operator[](size_t flat) { return coeffs_[flat]; }
  const Cplx& operator[](size_t flat) const { return coeffs_[flat]; }
  Cplx& at(std::span<const long> idx) { return coeffs_[flat_index(idx)]; }
  const Cplx& at(std::span<const long> idx) const {
    return coeffs_[flat_index(idx)];
  }

  size_t flat_index(std::span<const long> idx) const;
  std::vector<long> unflatten(size_t flat) const;

  Provenance provenance() const { return prov_; }
  void set_provenance(Provenance p) { prov_ = p; }
  double truncation_loss() const { return trunc_loss_; }
  void set_truncation_loss(double l) { trunc_loss_ = l; }

  std::span<const Cplx> coeffs() const { return coeffs_; }
  std::span<Cplx> coeffs() { return coeffs_; }

  /// Unit coefficient vector e_n (1-d convenience).
  static HermiteRep unit(long shape, long n);

 private:
  std::vector<long> shape_;
  std::vector<Cplx> coeffs_;
  Provenance prov_;
  double trunc_loss_ = 0.0;
};

/// Positive per-axis scale parameters (theta_1, ..., theta_d).
struct ThetaVector {
  std::vector<double> components;

  ThetaVector() = default;
  explicit ThetaVector(std::vector<double> c) : components(std::move(c)) {}
  explicit ThetaVector(double scalar) : components{scalar} {}
  double sum() const;
};

/// Fourier-Hermite analysis: coeffs[n] = integral phi(x) H_n(x) dx,
/// tensorized quadrature with the same rule on every axis.
/// Requires rule order >= 2*max(shape) + 4.
HermiteRep analyze(const std::function<Cplx(std::span<const double>)>& phi,
                   std::vector<long> shape, const QuadratureRule& rule);

/// Analysis from samples on the rule's tensor grid (row-major over node
/// indices). sample_nodes must coincide with rule.nodes; anything else is an
/// AlignmentError - resampling is never applied silently.
HermiteRep analyze_samples(std::span<const Cplx> samples,
                           std::span<const double> sample_nodes,
                           std::vector<long> shape, const QuadratureRule& rule);

/// Pointwise synthesis sum_n coeffs[n] H_n(x) over the truncation box.
Cplx synthesize(const HermiteRep& rep, std::span<const double> x);

struct NormResult {
  double value;
  bool saturated;  // exponent range exceeded; value is +inf
};

/// The sequence norm (sum_n |a_n|^2 exp[2 sum_k M(theta_k sqrt(n_k))])^{1/2}.
/// Terms are accumulated in descending magnitude with compensation; overflow
/// comes back as +inf with the saturated flag set rather than an exception.
NormResult seq_norm(const HermiteRep& rep, const ThetaVector& theta,
                    const AssociatedFunction& af);

/// Coefficient-space Fourier transform: one factor sqrt(2 pi) i^{n_k} per
/// axis (the Hermite eigenrelation).
HermiteRep fourier(const HermiteRep& rep);

enum class LadderDir { lower, raise };

/// Coefficient-space ladder shift along one axis:
///   lower: out[m] = sqrt(m+1) in[m+1]   (top slot drops out),
///   raise: out[m] = sqrt(m)   in[m-1]   (bottom slot 0; the top input slot
///          overflows the box and is recorded as truncation loss).
HermiteRep ladder(const HermiteRep& rep, LadderDir dir, int axis);

/// Multiplication by x_axis: out[m] = sqrt((m+1)/2) in[m+1] + sqrt(m/2) in[m-1].
HermiteRep mul_x(const HermiteRep& rep, int axis);

/// d/dx_axis: out[m] = sqrt((m+1)/2) in[m+1] - sqrt(m/2) in[m-1].
HermiteRep diff(const HermiteRep& rep, int axis);

/// Bilinear pairing sum_n dual[n] test[n] (no conjugation). Shapes must have
/// equal dimension; the smaller box is zero-extended.
Cplx pairing(const HermiteRep& dual, const HermiteRep& test);

}  // namespace hermrep
