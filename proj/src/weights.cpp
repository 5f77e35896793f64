#include "hermrep/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace hermrep {

WeightSequence WeightSequence::gevrey_log(double s, double t) {
  if (!(s >= 0.5)) throw RangeError("gevrey_log: s must be >= 1/2");
  if (!(t >= 0.0)) throw RangeError("gevrey_log: t must be >= 0");
  WeightSequence w;
  w.kind_ = SequenceKind::gevrey_log;
  w.s_ = s;
  w.t_ = t;
  return w;
}

WeightSequence WeightSequence::table(std::vector<double> values) {
  if (values.empty()) throw RangeError("table: empty sequence");
  if (values[0] != 1.0) throw RangeError("table: M_0 must be exactly 1");
  WeightSequence w;
  w.kind_ = SequenceKind::table;
  w.log_table_.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw RangeError("table: all values must be strictly positive and finite");
    w.log_table_.push_back(std::log(v));
  }
  w.log_table_[0] = 0.0;
  return w;
}

double WeightSequence::log_value(long p) const {
  if (p < 0) throw RangeError("log_value: negative index");
  if (kind_ == SequenceKind::gevrey_log) {
    if (p == 0) return 0.0;
    const double lp = std::log(static_cast<double>(p));
    return s_ * p * lp + t_ * p * std::log(std::max(1.0, lp));
  }
  if (p >= static_cast<long>(log_table_.size()))
    throw RangeError("log_value: index " + std::to_string(p) +
                     " beyond table of size " + std::to_string(log_table_.size()));
  return log_table_[p];
}

double WeightSequence::value(long p) const { return std::exp(log_value(p)); }

long WeightSequence::size() const {
  return kind_ == SequenceKind::table ? static_cast<long>(log_table_.size())
                                      : std::numeric_limits<long>::max();
}

WeightSequence WeightSequence::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gevrey_log")
    return gevrey_log(j.at("s").get<double>(),
                      j.contains("t") ? j.at("t").get<double>() : 0.0);
  if (kind == "table") return table(j.at("values").get<std::vector<double>>());
  throw RangeError("WeightSequence: unknown kind '" + kind + "'");
}

nlohmann::json WeightSequence::to_json() const {
  nlohmann::json j;
  if (kind_ == SequenceKind::gevrey_log) {
    j["kind"] = "gevrey_log";
    j["s"] = s_;
    j["t"] = t_;
  } else {
    j["kind"] = "table";
    std::vector<double> vals;
    vals.reserve(log_table_.size());
    for (double lv : log_table_) vals.push_back(std::exp(lv));
    j["values"] = vals;
  }
  return j;
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::M1: return "M1";
    case Condition::M2: return "M2";
    case Condition::M3prime: return "M3prime";
    case Condition::M3dprime: return "M3dprime";
    case Condition::M3tprime: return "M3tprime";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds_up_to_pmax: return "holds_up_to_pmax";
    case Verdict::fails: return "fails";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

nlohmann::json ConditionCertificate::to_json() const {
  nlohmann::json j;
  j["condition"] = to_string(condition);
  j["verdict"] = to_string(verdict);
  if (witness) j["witness"] = *witness;
  j["constants"] = constants;
  j["p_max"] = p_max;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

namespace {

// Usable check range: tables cannot be evaluated past their end.
long clamp_pmax(const WeightSequence& seq, long p_max, long slack) {
  if (seq.kind() == SequenceKind::table)
    return std::min(p_max, seq.size() - 1 - slack);
  return p_max;
}

ConditionCertificate check_m1(const WeightSequence& seq, long p_max) {
  ConditionCertificate cert{Condition::M1, Verdict::holds_up_to_pmax, {}, {}, p_max, {}};
  cert.p_max = clamp_pmax(seq, p_max, 1);
  const double tol = 1e-9;
  for (long p = 1; p <= cert.p_max; ++p) {
    const double lhs = 2.0 * seq.log_value(p);
    const double rhs = seq.log_value(p - 1) + seq.log_value(p + 1);
    if (lhs > rhs + tol) {
      cert.verdict = Verdict::fails;
      cert.witness = p;
      cert.constants["violation_log_gap"] = lhs - rhs;
      return cert;
    }
  }
  return cert;
}

// log of sup_p M_p / (H^p min_q M_q M_{p-q}) over a prefix range.
double log_A_for(const std::vector<double>& logM, const std::vector<double>& minconv,
                 double logH, long upto) {
  double best = -std::numeric_limits<double>::infinity();
  for (long p = 0; p <= upto; ++p)
    best = std::max(best, logM[p] - p * logH - minconv[p]);
  return best;
}

ConditionCertificate check_m2(const WeightSequence& seq, long p_max) {
  ConditionCertificate cert{Condition::M2, Verdict::undecided, {}, {}, p_max, {}};
  cert.p_max = clamp_pmax(seq, p_max, 0);
  const long P = cert.p_max;
  std::vector<double> logM(P + 1), minconv(P + 1);
  for (long p = 0; p <= P; ++p) logM[p] = seq.log_value(p);
  for (long p = 0; p <= P; ++p) {
    double m = std::numeric_limits<double>::infinity();
    for (long q = 0; q <= p; ++q) m = std::min(m, logM[q] + logM[p - q]);
    minconv[p] = m;
  }
  const double stab_tol = 1e-9;
  for (int k = -10; k <= 20; ++k) {
    const double logH = k * std::log(2.0);
    const double a_half = log_A_for(logM, minconv, logH, P / 2);
    const double a_full = log_A_for(logM, minconv, logH, P);
    if (a_full <= a_half + stab_tol) {
      cert.verdict = Verdict::holds_up_to_pmax;
      cert.constants["H"] = std::exp2(k);
      cert.constants["A"] = std::exp(a_full);
      cert.constants["log_A"] = a_full;
      return cert;
    }
  }
  cert.detail = "no grid H with a stable constant; growth trend persists";
  cert.constants["log_A_at_H_max"] = log_A_for(logM, minconv, 20 * std::log(2.0), P);
  return cert;
}

ConditionCertificate check_m3prime(const WeightSequence& seq, long p_max) {
  ConditionCertificate cert{Condition::M3prime, Verdict::undecided, {}, {}, p_max, {}};
  cert.p_max = clamp_pmax(seq, p_max, 0);
  const long P = std::max<long>(cert.p_max, 16);
  double partial = 0.0;
  for (long p = 1; p <= P; ++p)
    partial += std::exp(seq.log_value(p - 1) - seq.log_value(p));
  cert.constants["partial_sum"] = partial;

  // Tail regression of log r_p against log p, r_p = M_{p-1}/M_p. The decay
  // exponent sigma = -slope decides all-but-borderline cases; the borderline
  // band falls back to the trend of u_p = p * r_p (harmonic comparison).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long cnt = 0;
  for (long p = P / 2; p <= P; p += std::max<long>(1, P / 200)) {
    const double x = std::log(static_cast<double>(p));
    const double y = seq.log_value(p - 1) - seq.log_value(p);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double sigma = -slope;
  cert.constants["tail_sigma"] = sigma;
  const double eps = 0.15;
  if (sigma >= 1.0 + eps) {
    cert.verdict = Verdict::holds_up_to_pmax;
    cert.detail = "converge";
    return cert;
  }
  if (sigma <= 1.0 - eps) {
    cert.verdict = Verdict::fails;
    cert.witness = P;
    cert.detail = "diverge";
    return cert;
  }
  auto u_at = [&](long p) {
    return p * std::exp(seq.log_value(p - 1) - seq.log_value(p));
  };
  const double u1 = u_at(std::max<long>(2, P / 4));
  const double u3 = u_at(P);
  cert.constants["u_quarter"] = u1;
  cert.constants["u_end"] = u3;
  if (u3 >= 0.9 * u1 && u3 > 1e-6) {
    cert.verdict = Verdict::fails;
    cert.witness = P;
    cert.detail = "diverge (harmonic-type tail)";
  } else {
    cert.detail = "undecided (sigma near 1, tail trend inconclusive)";
  }
  return cert;
}

// log of sup_p p^{p/2} / (L^p M_p); also reports whether the sup is attained
// in the first half of the range (no boundary growth).
struct SupC {
  double log_C;
  bool stable;
};

SupC log_C_for(const WeightSequence& seq, double logL, long P) {
  double half = -std::numeric_limits<double>::infinity();
  double full = half;
  for (long p = 0; p <= P; ++p) {
    const double lp = p == 0 ? 0.0 : 0.5 * p * std::log(static_cast<double>(p));
    const double v = lp - p * logL - seq.log_value(p);
    if (p <= P / 2) half = std::max(half, v);
    full = std::max(full, v);
  }
  return {full, full <= half + 1e-9};
}

ConditionCertificate check_m3dprime(const WeightSequence& seq, long p_max) {
  ConditionCertificate cert{Condition::M3dprime, Verdict::undecided, {}, {}, p_max, {}};
  cert.p_max = clamp_pmax(seq, p_max, 0);
  for (int k = -10; k <= 20; ++k) {
    const SupC c = log_C_for(seq, k * std::log(2.0), cert.p_max);
    if (c.stable) {
      cert.verdict = Verdict::holds_up_to_pmax;
      cert.constants["L"] = std::exp2(k);
      cert.constants["C"] = std::exp(c.log_C);
      cert.constants["log_C"] = c.log_C;
      return cert;
    }
  }
  cert.detail = "no grid L with a stable constant; growth trend persists";
  return cert;
}

ConditionCertificate check_m3tprime(const WeightSequence& seq, long p_max) {
  ConditionCertificate cert{Condition::M3tprime, Verdict::holds_up_to_pmax, {}, {}, p_max, {}};
  cert.p_max = clamp_pmax(seq, p_max, 0);
  bool all_finite = true;
  bool all_stable = true;
  for (int k = 0; k >= -10; --k) {
    const SupC c = log_C_for(seq, k * std::log(2.0), cert.p_max);
    const std::string tag = "L_2^" + std::to_string(k);
    cert.constants["log_C_at_" + tag] = c.log_C;
    cert.constants["stable_at_" + tag] = c.stable ? 1.0 : 0.0;
    all_finite = all_finite && std::isfinite(c.log_C);
    all_stable = all_stable && c.stable;
  }
  if (!all_finite) {
    cert.verdict = Verdict::undecided;
    cert.detail = "constant overflowed for some sampled L";
  } else if (!all_stable) {
    cert.detail =
        "holds up to p_max for every sampled L; C(L) still growing at the "
        "boundary for small L";
  }
  return cert;
}

}  // namespace

ConditionCertificate check_condition(const WeightSequence& seq, Condition which,
                                     long p_max) {
  if (p_max < 4) throw RangeError("check_condition: p_max must be >= 4");
  switch (which) {
    case Condition::M1: return check_m1(seq, p_max);
    case Condition::M2: return check_m2(seq, p_max);
    case Condition::M3prime: return check_m3prime(seq, p_max);
    case Condition::M3dprime: return check_m3dprime(seq, p_max);
    case Condition::M3tprime: return check_m3tprime(seq, p_max);
  }
  throw RangeError("check_condition: unknown condition");
}

AssociatedFunction::AssociatedFunction(WeightSequence seq, long hard_cap)
    : seq_(std::move(seq)), hard_cap_(hard_cap) {}

AssociatedFunction::Result AssociatedFunction::eval(double rho) const {
  if (!(rho > 0.0)) throw RangeError("assoc_eval: rho must be positive");
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(rho);
    if (it != cache_.end()) return it->second;
  }
  const double log_rho = std::log(rho);
  // p = 0 term is p log rho - log M_0 = 0.
  Result best{0.0, 0};
  const long limit =
      seq_.kind() == SequenceKind::table ? seq_.size() - 1 : hard_cap_;
  // Stop once the unimodal summand has fallen well below the running best
  // for a sustained run past the maximizer.
  const long run = 64;
  const double drop = 40.0;  // log-scale; e^-40 is far below any tolerance
  for (long p = 1; p <= limit; ++p) {
    const double term = p * log_rho - seq_.log_value(p);
    if (term > best.value) best = {term, p};
    if (p > best.maximizer + run && term < best.value - drop) break;
    if (p == limit && seq_.kind() != SequenceKind::table)
      throw CapError("assoc_eval: maximizer exceeds hard cap " +
                     std::to_string(hard_cap_) + " at rho = " +
                     std::to_string(rho) + " (best so far at p = " +
                     std::to_string(best.maximizer) + ")");
  }
  std::unique_lock lock(mutex_);
  cache_.emplace(rho, best);
  return best;
}

AsymptoticReport assoc_asymptotic_check(const AssociatedFunction& af, double s,
                                        double t,
                                        const std::vector<double>& rho_grid) {
  if (af.sequence().kind() != SequenceKind::gevrey_log)
    throw RangeError("assoc_asymptotic_check: gevrey_log sequences only");
  AsymptoticReport rep;
  for (double rho : rho_grid) {
    if (!(rho >= 100.0))
      throw RangeError("assoc_asymptotic_check: grid values must be >= 100");
    const double m = af.eval(rho).value;
    const double ref =
        std::log(rho) / s - (t / s) * std::log(std::log(rho));
    rep.points.push_back({rho, std::log(m) / ref});
  }
  rep.stabilizing = false;
  if (!rep.points.empty()) {
    const double first = std::abs(rep.points.front().ratio - 1.0);
    const double last = std::abs(rep.points.back().ratio - 1.0);
    rep.stabilizing = last <= first + 1e-9 && last < 0.35;
  }
  return rep;
}

}  // namespace hermrep
