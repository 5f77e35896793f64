#include "hermrep/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hermrep {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::analyzed: return "analyzed";
    case Provenance::synthetic: return "synthetic";
    case Provenance::operator_output: return "operator-output";
  }
  return "?";
}

HermiteRep::HermiteRep(std::vector<long> shape, Provenance prov)
    : shape_(std::move(shape)), prov_(prov) {
  if (shape_.empty()) throw ShapeError("HermiteRep: dimension must be >= 1");
  size_t total = 1;
  for (long n : shape_) {
    if (n <= 0) throw ShapeError("HermiteRep: shape entries must be positive");
    total *= static_cast<size_t>(n);
    if (total > (1u << 28)) throw ShapeError("HermiteRep: truncation box too large");
  }
  coeffs_.assign(total, Cplx{0.0, 0.0});
}

size_t HermiteRep::flat_index(std::span<const long> idx) const {
  if (idx.size() != shape_.size())
    throw ShapeError("HermiteRep: index dimension mismatch");
  size_t flat = 0;
  for (size_t k = 0; k < shape_.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape_[k])
      throw RangeError("HermiteRep: index outside truncation box");
    flat = flat * static_cast<size_t>(shape_[k]) + static_cast<size_t>(idx[k]);
  }
  return flat;
}

std::vector<long> HermiteRep::unflatten(size_t flat) const {
  std::vector<long> idx(shape_.size());
  for (size_t k = shape_.size(); k-- > 0;) {
    idx[k] = static_cast<long>(flat % static_cast<size_t>(shape_[k]));
    flat /= static_cast<size_t>(shape_[k]);
  }
  return idx;
}

HermiteRep HermiteRep::unit(long shape, long n) {
  HermiteRep rep({shape}, Provenance::synthetic);
  const long i[] = {n};
  rep.at(i) = Cplx{1.0, 0.0};
  return rep;
}

double ThetaVector::sum() const {
  return std::accumulate(components.begin(), components.end(), 0.0);
}

namespace {

// Basis matrix B[n][i] = H_n(x_i) * exp(log_weight_i), one scan per node.
std::vector<double> basis_matrix(long n_top, const QuadratureRule& rule) {
  const long cols = rule.order;
  std::vector<double> b(static_cast<size_t>(n_top + 1) * cols);
  for (long i = 0; i < cols; ++i) {
    const double w = std::exp(rule.log_weights[i]);
    detail::hermite_scan(n_top, rule.nodes[i], [&](long k, double m, long e) {
      const double v =
          (m == 0.0 || e < -2000) ? 0.0 : std::ldexp(m, static_cast<int>(e));
      b[static_cast<size_t>(k) * cols + i] = v * w;
    });
  }
  return b;
}

// Contract the leading axis of a row-major tensor with a basis matrix:
// out[n, rest] = sum_i B[n][i] in[i, rest].
void contract_axis(const std::vector<double>& B, long rows, long cols,
                   const std::vector<Cplx>& in, size_t rest,
                   std::vector<Cplx>& out) {
  out.assign(static_cast<size_t>(rows) * rest, Cplx{0.0, 0.0});
  for (long n = 0; n < rows; ++n) {
    Cplx* dst = out.data() + static_cast<size_t>(n) * rest;
    for (long i = 0; i < cols; ++i) {
      const double w = B[static_cast<size_t>(n) * cols + i];
      if (w == 0.0) continue;
      const Cplx* src = in.data() + static_cast<size_t>(i) * rest;
      for (size_t r = 0; r < rest; ++r) dst[r] += w * src[r];
    }
  }
}

void check_rule_order(const std::vector<long>& shape, const QuadratureRule& rule) {
  const long nmax = *std::max_element(shape.begin(), shape.end());
  if (rule.order < 2 * nmax + 4)
    throw RangeError("analyze: rule order must be >= 2*max(shape)+4");
}

std::vector<Cplx> analyze_core(std::vector<Cplx> values,
                               const std::vector<long>& shape,
                               const QuadratureRule& rule) {
  // values: row-major over the node grid, axis 0 outermost. Repeatedly
  // contract the leading axis and rotate it to the back; after d rounds the
  // layout is row-major over the coefficient box in original axis order.
  const int d = static_cast<int>(shape.size());
  std::vector<Cplx> buf;
  for (int axis = 0; axis < d; ++axis) {
    const long rows = shape[axis];
    const long cols = rule.order;
    size_t rest = 1;
    for (int k = axis + 1; k < d; ++k) rest *= static_cast<size_t>(rule.order);
    for (int k = 0; k < axis; ++k) rest *= static_cast<size_t>(shape[k]);
    // current layout: [axis nodes][later axes nodes][earlier axes coeffs]
    const auto B = basis_matrix(rows - 1, rule);
    contract_axis(B, rows, cols, values, rest, buf);
    // rotate leading axis to the back
    std::vector<Cplx> rotated(buf.size());
    const size_t lead = static_cast<size_t>(rows);
    const size_t stride = buf.size() / lead;
    for (size_t n = 0; n < lead; ++n)
      for (size_t r = 0; r < stride; ++r)
        rotated[r * lead + n] = buf[n * stride + r];
    values = std::move(rotated);
  }
  return values;
}

}  // namespace

HermiteRep analyze(const std::function<Cplx(std::span<const double>)>& phi,
                   std::vector<long> shape, const QuadratureRule& rule) {
  check_rule_order(shape, rule);
  const int d = static_cast<int>(shape.size());
  size_t grid = 1;
  for (int k = 0; k < d; ++k) grid *= static_cast<size_t>(rule.order);
  std::vector<Cplx> values(grid);
  std::vector<long> idx(d, 0);
  std::vector<double> x(d);
  for (size_t flat = 0; flat < grid; ++flat) {
    size_t rem = flat;
    for (int k = d; k-- > 0;) {
      idx[k] = static_cast<long>(rem % static_cast<size_t>(rule.order));
      rem /= static_cast<size_t>(rule.order);
    }
    for (int k = 0; k < d; ++k) x[k] = rule.nodes[idx[k]];
    const Cplx v = phi(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DataError("analyze: non-finite sample at a quadrature node");
    values[flat] = v;
  }
  auto coeffs = analyze_core(std::move(values), shape, rule);
  HermiteRep rep(shape, Provenance::analyzed);
  std::copy(coeffs.begin(), coeffs.end(), rep.coeffs().begin());
  return rep;
}

HermiteRep analyze_samples(std::span<const Cplx> samples,
                           std::span<const double> sample_nodes,
                           std::vector<long> shape, const QuadratureRule& rule) {
  check_rule_order(shape, rule);
  if (sample_nodes.size() != rule.nodes.size())
    throw AlignmentError("analyze_samples: node count differs from the rule");
  for (size_t i = 0; i < sample_nodes.size(); ++i) {
    const double a = sample_nodes[i], b = rule.nodes[i];
    if (std::fabs(a - b) > 1e-15 * std::max(1.0, std::fabs(b)))
      throw AlignmentError("analyze_samples: sample grid is not aligned with "
                           "the quadrature nodes; resample the input");
  }
  size_t grid = 1;
  for (size_t k = 0; k < shape.size(); ++k) grid *= rule.nodes.size();
  if (samples.size() != grid)
    throw AlignmentError("analyze_samples: sample count does not cover the node grid");
  for (const Cplx& v : samples)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DataError("analyze_samples: non-finite sample");
  auto coeffs = analyze_core(std::vector<Cplx>(samples.begin(), samples.end()),
                             shape, rule);
  HermiteRep rep(shape, Provenance::analyzed);
  std::copy(coeffs.begin(), coeffs.end(), rep.coeffs().begin());
  return rep;
}

Cplx synthesize(const HermiteRep& rep, std::span<const double> x) {
  const int d = rep.dims();
  if (static_cast<int>(x.size()) != d)
    throw ShapeError("synthesize: point dimension mismatch");
  // Per-axis value tables, then one pass over the box.
  std::vector<std::vector<double>> vals(d);
  for (int k = 0; k < d; ++k) {
    vals[k].resize(rep.shape()[k]);
    hermite_values(rep.shape()[k] - 1, x[k], vals[k]);
  }
  Cplx acc{0.0, 0.0};
  std::vector<long> idx(d, 0);
  const size_t total = rep.size();
  for (size_t flat = 0; flat < total; ++flat) {
    const Cplx c = rep[flat];
    if (c != Cplx{0.0, 0.0}) {
      size_t rem = flat;
      double h = 1.0;
      for (int k = d; k-- > 0;) {
        const long nk = static_cast<long>(rem % static_cast<size_t>(rep.shape()[k]));
        rem /= static_cast<size_t>(rep.shape()[k]);
        h *= vals[k][nk];
      }
      acc += c * h;
    }
  }
  return acc;
}

namespace {

// M(theta sqrt(m)) per axis; m = 0 contributes 0 by the p = 0 convention.
std::vector<double> weight_table(long n, double theta, const AssociatedFunction& af) {
  std::vector<double> w(n);
  w[0] = 0.0;
  for (long m = 1; m < n; ++m)
    w[m] = af.eval(theta * std::sqrt(static_cast<double>(m))).value;
  return w;
}

}  // namespace

NormResult seq_norm(const HermiteRep& rep, const ThetaVector& theta,
                    const AssociatedFunction& af) {
  const int d = rep.dims();
  if (static_cast<int>(theta.components.size()) != d)
    throw ShapeError("seq_norm: theta dimension mismatch");
  for (double t : theta.components)
    if (!(t > 0.0)) throw RangeError("seq_norm: theta components must be positive");
  std::vector<std::vector<double>> wt(d);
  for (int k = 0; k < d; ++k)
    wt[k] = weight_table(rep.shape()[k], theta.components[k], af);

  // Log-scale terms 2 log|a_n| + 2 sum_k M(theta_k sqrt(n_k)).
  std::vector<double> terms;
  terms.reserve(rep.size());
  for (size_t flat = 0; flat < rep.size(); ++flat) {
    const Cplx c = rep[flat];
    const double a2 = std::norm(c);
    if (a2 == 0.0) continue;
    if (!std::isfinite(a2)) throw DataError("seq_norm: non-finite coefficient");
    double lw = 0.0;
    size_t rem = flat;
    for (int k = d; k-- > 0;) {
      const long nk = static_cast<long>(rem % static_cast<size_t>(rep.shape()[k]));
      rem /= static_cast<size_t>(rep.shape()[k]);
      lw += wt[k][nk];
    }
    terms.push_back(std::log(a2) + 2.0 * lw);
  }
  if (terms.empty()) return {0.0, false};
  std::sort(terms.begin(), terms.end(), std::greater<>());
  const double top = terms.front();
  // Compensated descending-order sum of exp(term - top).
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double y = std::exp(t - top) - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  const double log_norm = 0.5 * (top + std::log(sum));
  if (log_norm > std::log(std::numeric_limits<double>::max()) - 1.0)
    return {std::numeric_limits<double>::infinity(), true};
  return {std::exp(log_norm), false};
}

HermiteRep fourier(const HermiteRep& rep) {
  const int d = rep.dims();
  static const Cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const double scale = std::pow(2.0 * M_PI, 0.5 * d);
  HermiteRep out(rep.shape(), Provenance::operator_output);
  out.set_truncation_loss(rep.truncation_loss());
  for (size_t flat = 0; flat < rep.size(); ++flat) {
    size_t rem = flat;
    long total = 0;
    for (int k = d; k-- > 0;) {
      total += static_cast<long>(rem % static_cast<size_t>(rep.shape()[k]));
      rem /= static_cast<size_t>(rep.shape()[k]);
    }
    out[flat] = rep[flat] * kIPow[total & 3] * scale;
  }
  return out;
}

namespace {

// Apply a tridiagonal-in-one-axis map: out[m] = lo(m) in[m+1] + hi(m) in[m-1].
// Returns the l2 magnitude of what fell off the top of the box.
template <typename Lo, typename Hi>
HermiteRep axis_shift(const HermiteRep& rep, int axis, Lo lo, Hi hi,
                      double top_factor) {
  const int d = rep.dims();
  if (axis < 0 || axis >= d) throw ShapeError("axis out of range");
  const long n = rep.shape()[axis];
  size_t inner = 1;  // stride of the axis
  for (int k = axis + 1; k < d; ++k) inner *= static_cast<size_t>(rep.shape()[k]);
  size_t outer = rep.size() / (inner * static_cast<size_t>(n));

  HermiteRep out(rep.shape(), Provenance::operator_output);
  double dropped_sq = 0.0;
  for (size_t o = 0; o < outer; ++o) {
    for (size_t i = 0; i < inner; ++i) {
      const size_t base = o * static_cast<size_t>(n) * inner + i;
      for (long m = 0; m < n; ++m) {
        Cplx v{0.0, 0.0};
        const double cl = lo(m);
        if (cl != 0.0 && m + 1 < n) v += cl * rep[base + (m + 1) * inner];
        const double ch = hi(m);
        if (ch != 0.0 && m >= 1) v += ch * rep[base + (m - 1) * inner];
        out[base + m * inner] = v;
      }
      if (top_factor != 0.0)
        dropped_sq += std::norm(rep[base + (n - 1) * inner]);
    }
  }
  out.set_truncation_loss(rep.truncation_loss() +
                          std::fabs(top_factor) * std::sqrt(dropped_sq));
  return out;
}

}  // namespace

namespace {

void check_axis(const HermiteRep& rep, int axis) {
  if (axis < 0 || axis >= rep.dims())
    throw ShapeError("axis out of range for rep of dimension " +
                     std::to_string(rep.dims()));
}

}  // namespace

HermiteRep ladder(const HermiteRep& rep, LadderDir dir, int axis) {
  check_axis(rep, axis);
  if (dir == LadderDir::lower) {
    return axis_shift(
        rep, axis, [](long m) { return std::sqrt(static_cast<double>(m + 1)); },
        [](long) { return 0.0; }, 0.0);
  }
  const long n = rep.shape()[axis];
  return axis_shift(
      rep, axis, [](long) { return 0.0; },
      [](long m) { return std::sqrt(static_cast<double>(m)); },
      std::sqrt(static_cast<double>(n)));
}

HermiteRep mul_x(const HermiteRep& rep, int axis) {
  check_axis(rep, axis);
  const long n = rep.shape()[axis];
  return axis_shift(
      rep, axis, [](long m) { return std::sqrt(0.5 * (m + 1)); },
      [](long m) { return std::sqrt(0.5 * m); }, std::sqrt(0.5 * n));
}

HermiteRep diff(const HermiteRep& rep, int axis) {
  check_axis(rep, axis);
  const long n = rep.shape()[axis];
  return axis_shift(
      rep, axis, [](long m) { return std::sqrt(0.5 * (m + 1)); },
      [](long m) { return -std::sqrt(0.5 * m); }, std::sqrt(0.5 * n));
}

Cplx pairing(const HermiteRep& dual, const HermiteRep& test) {
  if (dual.dims() != test.dims())
    throw ShapeError("pairing: dimension mismatch");
  const int d = dual.dims();
  std::vector<long> common(d);
  for (int k = 0; k < d; ++k)
    common[k] = std::min(dual.shape()[k], test.shape()[k]);
  // Collect products over the common box, then sum compensated in
  // descending magnitude: the exponential weights upstream create extreme
  // dynamic range.
  std::vector<Cplx> prods;
  size_t total = 1;
  for (long c : common) total *= static_cast<size_t>(c);
  prods.reserve(total);
  std::vector<long> idx(d, 0);
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int k = d; k-- > 0;) {
      idx[k] = static_cast<long>(rem % static_cast<size_t>(common[k]));
      rem /= static_cast<size_t>(common[k]);
    }
    const Cplx p = dual.at(idx) * test.at(idx);
    if (p != Cplx{0.0, 0.0}) prods.push_back(p);
  }
  std::sort(prods.begin(), prods.end(), [](const Cplx& a, const Cplx& b) {
    return std::norm(a) > std::norm(b);
  });
  Cplx sum{0.0, 0.0}, comp{0.0, 0.0};
  for (const Cplx& p : prods) {
    const Cplx y = p - comp;
    const Cplx s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

}  // namespace hermrep
