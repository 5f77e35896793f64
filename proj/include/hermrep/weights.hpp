#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hermrep/errors.hpp"

namespace hermrep {

enum class SequenceKind { gevrey_log, table };

/// Weight sequence {M_p} generating a Denjoy-Carleman smoothness scale.
///
/// Two kinds: the two-parameter family M_p = p^{sp} * max(1, log p)^{tp}
/// (the log factor is clamped at 1 so that M_0 = M_1 = 1 and all values
/// stay positive; asymptotics are unchanged), or an explicit positive table.
/// All evaluation is done through log M_p: the raw values overflow double
/// precision near p ~ 150.
class WeightSequence {
 public:
  static WeightSequence gevrey_log(double s, double t);
  static WeightSequence table(std::vector<double> values);

  /// log M_p. Throws RangeError for p < 0 or beyond an explicit table.
  double log_value(long p) const;

  /// M_p itself; may overflow to +inf for large p, prefer log_value.
  double value(long p) const;

  SequenceKind kind() const { return kind_; }
  double s() const { return s_; }
  double t() const { return t_; }
  /// Largest valid index + 1 for tables; LONG_MAX-ish for gevrey_log.
  long size() const;

  static WeightSequence from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  WeightSequence() = default;
  SequenceKind kind_ = SequenceKind::gevrey_log;
  double s_ = 1.0, t_ = 0.0;
  std::vector<double> log_table_;
};

enum class Condition { M1, M2, M3prime, M3dprime, M3tprime };

enum class Verdict { holds_up_to_pmax, fails, undecided };

std::string to_string(Condition c);
std::string to_string(Verdict v);

/// Outcome of a finite-range condition check.
///
/// A `fails` verdict carries the witness index at which the inequality was
/// violated. Constants, when present, certify the inequality for all
/// p <= p_max (e.g. A, H for M.2; C, L for M.3''). Everything is evidence
/// up to p_max, never a proof for all p.
struct ConditionCertificate {
  Condition condition;
  Verdict verdict;
  std::optional<long> witness;
  std::map<std::string, double> constants;
  long p_max = 0;
  std::string detail;

  nlohmann::json to_json() const;
};

/// Verify one of the structural conditions numerically over p <= p_max.
///
/// M.1  checks log-convexity index by index.
/// M.2  grid-searches H over {2^k : -10 <= k <= 20} and reports the minimal
///      grid H whose constant A = sup_p M_p / (H^p min_q M_q M_{p-q}) is
///      attained in the first half of the range (no growth trend), together
///      with that A.
/// M.3' reports a three-way converge/diverge/undecided verdict from the
///      partial sum of M_{p-1}/M_p and a ratio-trend heuristic.
/// M.3'' grid-searches L the same way as M.2 and reports C, L.
/// M.3''' evaluates C(L) for a decreasing ladder of L values and reports
///      each C with its growth trend; the verdict is holds_up_to_pmax
///      whenever every sampled C is finite.
ConditionCertificate check_condition(const WeightSequence& seq, Condition which,
                                     long p_max);

/// Memoized evaluator of the associated function
/// M(rho) = sup_p [ p log rho - log M_p ].
///
/// The sup is expanded adaptively: valid for log-convex sequences, where the
/// summand is unimodal in p and the maximizer is monotone in rho. The cache
/// is safe for concurrent reads with serialized inserts.
class AssociatedFunction {
 public:
  struct Result {
    double value;
    long maximizer;
  };

  explicit AssociatedFunction(WeightSequence seq, long hard_cap = (1L << 23));

  /// M(rho) with its maximizer. Throws RangeError for rho <= 0 and CapError
  /// when the maximizer exceeds the hard cap.
  Result eval(double rho) const;

  double operator()(double rho) const { return eval(rho).value; }

  const WeightSequence& sequence() const { return seq_; }

 private:
  WeightSequence seq_;
  long hard_cap_;
  mutable std::map<double, Result> cache_;
  mutable std::shared_mutex mutex_;
};

/// Per-point comparison of log M(rho) against the closed-form exponent
/// (1/s) log rho - (t/s) log log rho of the gevrey_log family.
struct AsymptoticReport {
  struct Point {
    double rho;
    double ratio;  // log M(rho) / reference exponent
  };
  std::vector<Point> points;
  bool stabilizing;  // |ratio-1| non-increasing and small at the last point
};

AsymptoticReport assoc_asymptotic_check(const AssociatedFunction& af, double s,
                                        double t,
                                        const std::vector<double>& rho_grid);

}  // namespace hermrep
