#include "signature.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace sigpath {

namespace {

// out[(u,v)] += x[u] * y[v]
void tensor_accum(std::span<double> out, std::span<const double> x, std::span<const double> y) {
  std::size_t idx = 0;
  for (double xu : x) {
    for (double yv : y) out[idx++] += xu * yv;
  }
}

// out[u] += scale * sum_v g[(u,v)] * b[v]
void contract_right_accum(std::span<double> out, std::span<const double> g,
                          std::span<const double> b, double scale) {
  std::size_t db = b.size();
  for (std::size_t u = 0; u < out.size(); ++u) {
    double s = 0.0;
    const double* row = g.data() + u * db;
    for (std::size_t v = 0; v < db; ++v) s += row[v] * b[v];
    out[u] += scale * s;
  }
}

// out[v] += scale * sum_u g[(u,v)] * a[u]
void contract_left_accum(std::span<double> out, std::span<const double> g,
                         std::span<const double> a, double scale) {
  std::size_t db = out.size();
  for (std::size_t u = 0; u < a.size(); ++u) {
    double au = scale * a[u];
    const double* row = g.data() + u * db;
    for (std::size_t v = 0; v < db; ++v) out[v] += row[v] * au;
  }
}

void check_pair(const TruncatedSignature& a, const TruncatedSignature& b) {
  if (a.dim() != b.dim() || a.depth() != b.depth()) {
    throw std::invalid_argument("signature: dimension/depth mismatch");
  }
}

// a <- a * b (Chen product); descending k keeps the original lower levels of
// a available for the cross terms
void chen_mul_inplace(TruncatedSignature& a, const TruncatedSignature& b) {
  check_pair(a, b);
  for (int k = a.depth(); k >= 1; --k) {
    auto out = a.level(k);
    for (int i = 1; i < k; ++i) tensor_accum(out, a.level(i), b.level(k - i));
    auto bk = b.level(k);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += bk[t];
  }
}

}  // namespace

void PiecewiseLinearPath::validate() const {
  if (knots() > 0 && dim == 0) {
    throw std::invalid_argument("path: dimension must be >= 1");
  }
  if (values.size() != knots() * dim) {
    throw std::invalid_argument("path: value matrix shape mismatch");
  }
  for (std::size_t i = 1; i < params.size(); ++i) {
    if (params[i] < params[i - 1]) {
      throw std::invalid_argument("path: parameters not nondecreasing");
    }
  }
}

std::size_t signature_size(std::size_t dim, int depth, std::size_t budget) {
  if (dim < 1) throw std::invalid_argument("signature: dimension must be >= 1");
  if (depth < 1 || depth > kMaxDepth) {
    throw std::invalid_argument("signature: depth must be in 1.." + std::to_string(kMaxDepth));
  }
  std::size_t total = 0, power = 1;
  for (int k = 1; k <= depth; ++k) {
    if (power > budget / dim) {
      throw std::invalid_argument("signature: coefficient budget exceeded");
    }
    power *= dim;
    total += power;
    if (total > budget) {
      throw std::invalid_argument("signature: coefficient budget exceeded");
    }
  }
  return total;
}

TruncatedSignature::TruncatedSignature(std::size_t dim, int depth) : dim_(dim), depth_(depth) {
  signature_size(dim, depth);
  offsets_.resize(depth + 1, 0);
  std::size_t power = 1;
  for (int k = 1; k <= depth; ++k) {
    power *= dim;
    offsets_[k] = offsets_[k - 1] + power;
  }
  data_.assign(offsets_[depth], 0.0);
}

std::span<double> TruncatedSignature::level(int k) {
  return {data_.data() + offsets_[k - 1], offsets_[k] - offsets_[k - 1]};
}

std::span<const double> TruncatedSignature::level(int k) const {
  return {data_.data() + offsets_[k - 1], offsets_[k] - offsets_[k - 1]};
}

TruncatedSignature sig_segment(std::span<const double> delta, int depth) {
  std::size_t d = delta.size();
  TruncatedSignature s(d, depth);
  auto l1 = s.level(1);
  for (std::size_t j = 0; j < d; ++j) l1[j] = delta[j];
  for (int k = 2; k <= depth; ++k) {
    auto prev = s.level(k - 1);
    auto cur = s.level(k);
    double inv = 1.0 / static_cast<double>(k);
    std::size_t idx = 0;
    for (double pu : prev) {
      for (double dj : delta) cur[idx++] = pu * dj * inv;
    }
  }
  return s;
}

TruncatedSignature chen_mul(const TruncatedSignature& a, const TruncatedSignature& b) {
  TruncatedSignature out = a;
  chen_mul_inplace(out, b);
  return out;
}

TruncatedSignature signature(const PiecewiseLinearPath& path, int depth) {
  path.validate();
  if (path.knots() < 1) throw std::invalid_argument("signature: path needs at least one knot");
  TruncatedSignature acc(path.dim, depth);
  std::vector<double> delta(path.dim);
  for (std::size_t j = 0; j + 1 < path.knots(); ++j) {
    for (std::size_t c = 0; c < path.dim; ++c) delta[c] = path.value(j + 1, c) - path.value(j, c);
    chen_mul_inplace(acc, sig_segment(delta, depth));
  }
  return acc;
}

TruncatedSignature oracle_signature(const PiecewiseLinearPath& path, int depth,
                                    std::size_t steps) {
  path.validate();
  if (steps < 1) throw std::invalid_argument("oracle_signature: steps must be >= 1");
  std::size_t d = path.dim;
  TruncatedSignature out(d, depth);
  std::size_t n = path.knots();
  if (n < 2) return out;

  // Cells are distributed over segments by value-space arc length so a cell
  // never straddles a knot; the signature does not depend on the
  // parameterisation, so integrating in segment-index parameter is exact.
  std::vector<double> arc(n - 1, 0.0);
  double total_arc = 0.0;
  for (std::size_t seg = 0; seg + 1 < n; ++seg) {
    double s2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      double dv = path.value(seg + 1, c) - path.value(seg, c);
      s2 += dv * dv;
    }
    arc[seg] = std::sqrt(s2);
    total_arc += arc[seg];
  }
  if (total_arc == 0.0) return out;

  // running level values at the current grid node, cell midpoint and cell end;
  // level 0 is the constant 1
  std::vector<std::vector<double>> node(depth + 1), mid(depth + 1), end(depth + 1);
  node[0] = {1.0};
  mid[0] = {1.0};
  end[0] = {1.0};
  std::size_t power = 1;
  for (int k = 1; k <= depth; ++k) {
    power *= d;
    node[k].assign(power, 0.0);
    mid[k].assign(power, 0.0);
    end[k].assign(power, 0.0);
  }
  std::vector<double> df(d), weight;

  for (std::size_t seg = 0; seg + 1 < n; ++seg) {
    if (arc[seg] == 0.0) continue;
    auto cells = static_cast<std::size_t>(
        std::llround(static_cast<double>(steps) * arc[seg] / total_arc));
    if (cells < 1) cells = 1;
    for (std::size_t c = 0; c < d; ++c) {
      df[c] = (path.value(seg + 1, c) - path.value(seg, c)) / static_cast<double>(cells);
    }
    for (std::size_t cell = 0; cell < cells; ++cell) {
      for (int k = 1; k <= depth; ++k) {
        const auto& g0 = node[k - 1];
        const auto& g1 = mid[k - 1];
        const auto& g2 = end[k - 1];
        std::size_t wlen = g0.size();
        weight.resize(wlen);
        // int over [start, mid] of the quadratic through (g0, g1, g2)
        for (std::size_t u = 0; u < wlen; ++u) {
          weight[u] = (5.0 * g0[u] + 8.0 * g1[u] - g2[u]) / 24.0;
        }
        std::size_t idx = 0;
        for (std::size_t u = 0; u < wlen; ++u) {
          for (std::size_t j = 0; j < d; ++j, ++idx) mid[k][idx] = node[k][idx] + weight[u] * df[j];
        }
        // Simpson over the full cell
        for (std::size_t u = 0; u < wlen; ++u) weight[u] = (g0[u] + 4.0 * g1[u] + g2[u]) / 6.0;
        idx = 0;
        for (std::size_t u = 0; u < wlen; ++u) {
          for (std::size_t j = 0; j < d; ++j, ++idx) end[k][idx] = node[k][idx] + weight[u] * df[j];
        }
      }
      for (int k = 1; k <= depth; ++k) node[k] = end[k];
    }
  }
  for (int k = 1; k <= depth; ++k) {
    auto lv = out.level(k);
    for (std::size_t t = 0; t < lv.size(); ++t) lv[t] = node[k][t];
  }
  return out;
}

double levy_area(const PiecewiseLinearPath& path, std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("levy_area: channels must differ");
  if (i >= path.dim || j >= path.dim) throw std::invalid_argument("levy_area: channel out of range");
  TruncatedSignature sig = signature(path, 2);
  auto l2 = sig.level(2);
  return 0.5 * (l2[i * path.dim + j] - l2[j * path.dim + i]);
}

namespace {

// reverse-mode through T_k = T_{k-1} (x) delta / k given upstream gradients
// on every level of the segment exponential
void segment_exp_backward(const TruncatedSignature& seg_exp, std::span<const double> delta,
                          const TruncatedSignature& upstream, std::span<double> gdelta) {
  int depth = seg_exp.depth();
  std::vector<double> gcur(upstream.level(depth).begin(), upstream.level(depth).end());
  for (int k = depth; k >= 2; --k) {
    double inv = 1.0 / static_cast<double>(k);
    contract_left_accum(gdelta, gcur, seg_exp.level(k - 1), inv);
    auto up = upstream.level(k - 1);
    std::vector<double> gprev(up.begin(), up.end());
    contract_right_accum(gprev, gcur, delta, inv);
    gcur = std::move(gprev);
  }
  for (std::size_t j = 0; j < gdelta.size(); ++j) gdelta[j] += gcur[j];
}

}  // namespace

std::vector<double> signature_backward(const PiecewiseLinearPath& path, int depth,
                                       const TruncatedSignature& upstream) {
  path.validate();
  if (path.knots() < 1) {
    throw std::invalid_argument("signature_backward: path needs at least one knot");
  }
  if (upstream.dim() != path.dim || upstream.depth() != depth) {
    throw std::invalid_argument("signature_backward: upstream shape mismatch");
  }
  std::size_t d = path.dim;
  std::size_t n = path.knots();
  std::vector<double> grad(n * d, 0.0);
  if (n < 2) return grad;
  std::size_t m = n - 1;

  // forward: retain segment exponentials and prefix signatures
  std::vector<TruncatedSignature> seg_exp;
  std::vector<TruncatedSignature> prefix;  // prefix[j] = signature of the first j segments
  seg_exp.reserve(m);
  prefix.reserve(m);
  TruncatedSignature acc(d, depth);
  std::vector<double> delta(d);
  for (std::size_t j = 0; j < m; ++j) {
    prefix.push_back(acc);
    for (std::size_t c = 0; c < d; ++c) delta[c] = path.value(j + 1, c) - path.value(j, c);
    seg_exp.push_back(sig_segment(delta, depth));
    chen_mul_inplace(acc, seg_exp.back());
  }

  // reverse through P_{j+1} = P_j (x) E_j
  TruncatedSignature g = upstream;
  std::vector<double> gdelta(d);
  for (std::size_t j = m; j-- > 0;) {
    TruncatedSignature gp(d, depth), ge(d, depth);
    for (int k = 1; k <= depth; ++k) {
      auto gk = g.level(k);
      {
        auto gpk = gp.level(k);
        auto gek = ge.level(k);
        for (std::size_t t = 0; t < gk.size(); ++t) {
          gpk[t] += gk[t];  // E contributes its level 0
          gek[t] += gk[t];  // P contributes its level 0
        }
      }
      for (int i = 1; i < k; ++i) {
        contract_right_accum(gp.level(i), gk, seg_exp[j].level(k - i), 1.0);
        contract_left_accum(ge.level(k - i), gk, prefix[j].level(i), 1.0);
      }
    }
    for (std::size_t c = 0; c < d; ++c) {
      delta[c] = path.value(j + 1, c) - path.value(j, c);
      gdelta[c] = 0.0;
    }
    segment_exp_backward(seg_exp[j], delta, ge, gdelta);
    for (std::size_t c = 0; c < d; ++c) {
      grad[(j + 1) * d + c] += gdelta[c];
      grad[j * d + c] -= gdelta[c];
    }
    g = std::move(gp);
  }
  return grad;
}

PiecewiseLinearPath time_augment(const PiecewiseLinearPath& path) {
  path.validate();
  PiecewiseLinearPath out;
  out.dim = path.dim + 1;
  out.params = path.params;
  out.values.reserve(path.knots() * out.dim);
  for (std::size_t k = 0; k < path.knots(); ++k) {
    out.values.push_back(path.params[k]);
    for (std::size_t c = 0; c < path.dim; ++c) out.values.push_back(path.value(k, c));
  }
  return out;
}

}  // namespace sigpath
