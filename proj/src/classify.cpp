#include "hermrep/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace hermrep {

std::string to_string(ClassifyMode m) {
  switch (m) {
    case ClassifyMode::roumieu_some_theta: return "roumieu_some_theta";
    case ClassifyMode::beurling_all_theta: return "beurling_all_theta";
    case ClassifyMode::dual_roumieu_every_theta: return "dual_roumieu_every_theta";
    case ClassifyMode::dual_beurling_some_theta: return "dual_beurling_some_theta";
  }
  return "?";
}

std::string to_string(ClassVerdict v) {
  switch (v) {
    case ClassVerdict::consistent: return "consistent";
    case ClassVerdict::violated: return "violated";
    case ClassVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

nlohmann::json DecayCertificate::to_json() const {
  nlohmann::json j;
  j["mode"] = to_string(mode);
  j["verdict"] = to_string(verdict);
  j["grid_relative"] = true;
  if (theta_witness) j["theta_witness"] = theta_witness->components;
  if (constant_C) j["constant_C"] = *constant_C;
  j["residual"] = residual;
  if (violation_witness) j["violation_witness"] = *violation_witness;
  nlohmann::json det = nlohmann::json::array();
  for (const auto& d : details) {
    det.push_back({{"theta", d.theta.components},
                   {"pass", d.pass},
                   {"log_C", d.log_C},
                   {"interior_peak", d.interior_peak},
                   {"shell_peak", d.shell_peak},
                   {"saturated", d.saturated}});
  }
  j["per_theta"] = det;
  return j;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Shell peak must exceed the interior peak by this log margin before we call
// the trend divergent.
constexpr double kTrendMargin = 2.302585092994046;  // log 10
// Saturation threshold for log of sum |a_n|^2 exp[2 sum M].
constexpr double kSaturationLog = 368.0;

struct GridEval {
  bool pass;
  double log_C;
  double interior_peak;
  double shell_peak;
  bool saturated;
  std::vector<long> argmax;  // index achieving the overall peak
};

// sign = +1: falloff comparison l_n = log|a_n| + sum M (C-fit for the bound
// |a_n| <= C exp[-sum M]); sign = -1: growth comparison u_n = log|a_n| - sum M.
GridEval eval_at_theta(const HermiteRep& rep, const AssociatedFunction& af,
                       const ThetaVector& theta, int sign, bool with_sum) {
  const int d = rep.dims();
  std::vector<std::vector<double>> wt(d);
  for (int k = 0; k < d; ++k) {
    wt[k].resize(rep.shape()[k]);
    wt[k][0] = 0.0;
    for (long m = 1; m < rep.shape()[k]; ++m)
      wt[k][m] =
          af.eval(theta.components[k] * std::sqrt(static_cast<double>(m))).value;
  }
  GridEval ev{true, -kInf, -kInf, -kInf, false, {}};
  double sum_top = -kInf, sum_acc = 0.0;
  std::vector<double> sum_terms;
  std::vector<long> idx(d);
  for (size_t flat = 0; flat < rep.size(); ++flat) {
    const double mag = std::abs(rep[flat]);
    if (mag <= kClassifyNoiseFloor) continue;
    size_t rem = flat;
    bool shell = false;
    double w = 0.0;
    for (int k = d; k-- > 0;) {
      const long nk = static_cast<long>(rem % static_cast<size_t>(rep.shape()[k]));
      rem /= static_cast<size_t>(rep.shape()[k]);
      idx[k] = nk;
      shell = shell || (2 * nk > rep.shape()[k]);
      w += wt[k][nk];
    }
    const double l = std::log(mag) + sign * w;
    if (l > ev.log_C) {
      ev.log_C = l;
      ev.argmax = idx;
    }
    if (shell)
      ev.shell_peak = std::max(ev.shell_peak, l);
    else
      ev.interior_peak = std::max(ev.interior_peak, l);
    if (with_sum) sum_terms.push_back(2.0 * l);
  }
  if (ev.log_C == -kInf) {
    // nothing above the noise floor: trivially consistent
    ev.log_C = -kInf;
    ev.pass = true;
    return ev;
  }
  if (with_sum) {
    std::sort(sum_terms.begin(), sum_terms.end(), std::greater<>());
    sum_top = sum_terms.front();
    for (double t : sum_terms) sum_acc += std::exp(t - sum_top);
    ev.saturated = sum_top + std::log(sum_acc) > kSaturationLog;
  }
  const bool trend_ok =
      ev.shell_peak == -kInf || ev.shell_peak <= ev.interior_peak + kTrendMargin;
  ev.pass = trend_ok && !ev.saturated && std::isfinite(ev.log_C);
  return ev;
}

void check_precondition(const HermiteRep& rep,
                        const std::vector<ThetaVector>& grid) {
  if (grid.empty()) throw RangeError("classify: theta grid must be nonempty");
  for (long n : rep.shape())
    if (n < 16) throw RangeError("classify: rep needs >= 16 coefficients per axis");
  for (const auto& th : grid) {
    if (static_cast<int>(th.components.size()) != rep.dims())
      throw ShapeError("classify: theta dimension mismatch");
    for (double t : th.components)
      if (!(t > 0.0)) throw RangeError("classify: theta components must be positive");
  }
}

bool all_zero(const HermiteRep& rep) {
  for (size_t i = 0; i < rep.size(); ++i)
    if (std::abs(rep[i]) > kClassifyNoiseFloor) return false;
  return true;
}

const ThetaVector& extreme_theta(const std::vector<ThetaVector>& grid, bool largest) {
  auto cmp = [](const ThetaVector& a, const ThetaVector& b) {
    return a.sum() < b.sum();
  };
  return largest ? *std::max_element(grid.begin(), grid.end(), cmp)
                 : *std::min_element(grid.begin(), grid.end(), cmp);
}

DecayCertificate classify_impl(const HermiteRep& rep, const WeightSequence& seq,
                               const std::vector<ThetaVector>& grid,
                               ClassifyMode mode) {
  check_precondition(rep, grid);
  const bool falloff = mode == ClassifyMode::roumieu_some_theta ||
                       mode == ClassifyMode::beurling_all_theta;
  const bool need_all = mode == ClassifyMode::beurling_all_theta ||
                        mode == ClassifyMode::dual_roumieu_every_theta;
  DecayCertificate cert;
  cert.mode = mode;

  if (all_zero(rep)) {
    cert.verdict = ClassVerdict::consistent;
    cert.theta_witness = extreme_theta(grid, true);
    cert.constant_C = 0.0;
    cert.residual = -kInf;
    return cert;
  }

  AssociatedFunction af(seq);
  const int sign = falloff ? +1 : -1;
  std::vector<GridEval> evals;
  evals.reserve(grid.size());
  for (const auto& th : grid) {
    GridEval ev = eval_at_theta(rep, af, th, sign, falloff);
    cert.details.push_back({th, ev.pass, ev.log_C, ev.interior_peak,
                            ev.shell_peak, ev.saturated});
    evals.push_back(std::move(ev));
  }

  // Reporting theta: for falloff the bound gets harder as theta grows, for
  // growth it gets harder as theta shrinks.
  auto order_key = [&](size_t i) {
    const double s = grid[i].sum();
    return falloff ? s : -s;
  };
  std::vector<size_t> order(grid.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return order_key(a) < order_key(b); });

  size_t passes = 0;
  for (const auto& ev : evals) passes += ev.pass;
  const bool ok = need_all ? passes == grid.size() : passes > 0;

  if (ok) {
    cert.verdict = ClassVerdict::consistent;
    // hardest passing grid point: largest theta for falloff, smallest for
    // growth; for "some theta" modes this is the strongest witness.
    size_t best = order[0];
    for (size_t i : order)
      if (evals[i].pass) best = i;
    cert.theta_witness = grid[best];
    cert.constant_C = std::exp(evals[best].log_C);
    cert.residual = evals[best].log_C;
  } else {
    // Most lenient grid point that still fails pins the witness index.
    size_t lenient = order[0];
    for (size_t i : order)
      if (!evals[i].pass) {
        lenient = i;
        break;
      }
    cert.verdict = ClassVerdict::violated;
    cert.violation_witness = evals[lenient].argmax;
    cert.residual = evals[lenient].log_C;
    if (evals[lenient].argmax.empty())
      cert.verdict = ClassVerdict::inconclusive;
  }
  return cert;
}

}  // namespace

DecayCertificate classify_test(const HermiteRep& rep, const WeightSequence& seq,
                               const std::vector<ThetaVector>& theta_grid,
                               ClassifyMode mode) {
  if (mode != ClassifyMode::roumieu_some_theta &&
      mode != ClassifyMode::beurling_all_theta)
    throw RangeError("classify_test: mode must be a falloff mode");
  return classify_impl(rep, seq, theta_grid, mode);
}

DecayCertificate classify_dual(const HermiteRep& rep, const WeightSequence& seq,
                               const std::vector<ThetaVector>& theta_grid,
                               ClassifyMode mode) {
  if (mode != ClassifyMode::dual_roumieu_every_theta &&
      mode != ClassifyMode::dual_beurling_some_theta)
    throw RangeError("classify_dual: mode must be a dual mode");
  return classify_impl(rep, seq, theta_grid, mode);
}

GevreyFit estimate_gevrey_index(const HermiteRep& rep) {
  if (rep.dims() != 1)
    throw ShapeError("estimate_gevrey_index: one-dimensional reps only");
  long nonzero = 0;
  for (size_t i = 0; i < rep.size(); ++i)
    if (rep[i] != Cplx{0.0, 0.0}) ++nonzero;
  if (nonzero < 32)
    throw InsufficientDataError(
        "estimate_gevrey_index: need >= 32 nonzero coefficients");

  // log(-log|a_n|) against log n over the reliable window.
  std::vector<double> xs, ys;
  for (long n = 2; n < rep.shape()[0]; ++n) {
    const double mag = std::abs(rep[static_cast<size_t>(n)]);
    if (mag <= kClassifyNoiseFloor) continue;
    const double neg_log = -std::log(mag);
    if (neg_log <= 0.02) continue;  // not yet in the decay regime
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(neg_log));
  }
  if (xs.size() < 8)
    throw InsufficientDataError(
        "estimate_gevrey_index: too few coefficients in the decay window");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i];
    sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i]; syy += ys[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double r_num = n * sxy - sx * sy;
  const double r_den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  const double r2 = r_den > 0 ? (r_num / r_den) * (r_num / r_den) : 0.0;
  if (!(slope > 0))
    throw InsufficientDataError("estimate_gevrey_index: no decay trend");
  return {1.0 / (2.0 * slope), r2, static_cast<long>(xs.size())};
}

}  // namespace hermrep
