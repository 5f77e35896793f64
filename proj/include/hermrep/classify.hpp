#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hermrep/coeff.hpp"
#include "hermrep/weights.hpp"

namespace hermrep {

enum class ClassifyMode {
  roumieu_some_theta,        // falloff holds for some theta in the grid
  beurling_all_theta,        // falloff holds for every theta in the grid
  dual_roumieu_every_theta,  // growth bound holds for every theta
  dual_beurling_some_theta,  // growth bound holds for some theta
};

enum class ClassVerdict { consistent, violated, inconclusive };

std::string to_string(ClassifyMode m);
std::string to_string(ClassVerdict v);

/// Per-grid-point evaluation record. `interior_peak` / `shell_peak` are the
/// maxima of the log-scale comparison term over the inner half-box and the
/// outer shell; a shell peak well above the interior peak is divergence
/// evidence at that theta.
struct ThetaDetail {
  ThetaVector theta;
  bool pass;
  double log_C;
  double interior_peak;
  double shell_peak;
  bool saturated;
};

/// Membership-type certificate on truncated data. All verdicts are
/// grid-relative: finite data can never certify "for every theta > 0", only
/// consistency with it across the sampled grid.
struct DecayCertificate {
  ClassifyMode mode;
  ClassVerdict verdict;
  std::optional<ThetaVector> theta_witness;
  std::optional<double> constant_C;
  double residual = 0.0;  // log C at the reporting theta (worst log slack)
  std::optional<std::vector<long>> violation_witness;
  std::vector<ThetaDetail> details;

  nlohmann::json to_json() const;
};

/// Coefficients below this magnitude are treated as exact zeros: quadrature
/// round-off corrupts both trend detection and log-log fits below
/// double-precision noise.
inline constexpr double kClassifyNoiseFloor = 1e-14;

/// Falloff-side certificate: |a_n| <= C exp[-sum_k M(theta_k sqrt(n_k))]
/// with finite C and a non-saturating weighted square sum. Mode must be
/// roumieu_some_theta or beurling_all_theta.
DecayCertificate classify_test(const HermiteRep& rep, const WeightSequence& seq,
                               const std::vector<ThetaVector>& theta_grid,
                               ClassifyMode mode);

/// Growth-side certificate: |b_n| <= C exp[+sum_k M(theta_k sqrt(n_k))]
/// with fitted C per theta. Mode must be dual_roumieu_every_theta or
/// dual_beurling_some_theta.
DecayCertificate classify_dual(const HermiteRep& rep, const WeightSequence& seq,
                               const std::vector<ThetaVector>& theta_grid,
                               ClassifyMode mode);

struct GevreyFit {
  double s_hat;
  double fit_quality;  // R^2 of the log(-log|a_n|) vs log n regression
  long points_used;
};

/// Regression estimate of the Gevrey index from one-dimensional coefficient
/// decay |a_n| ~ exp(-c n^{1/(2s)}).
GevreyFit estimate_gevrey_index(const HermiteRep& rep);

}  // namespace hermrep
