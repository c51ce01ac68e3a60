// Truncated signature transform of piecewise-linear paths.
//
// A depth-N signature over d channels is stored as dense coefficient arrays,
// one per level k = 1..N, each of length d^k. Multi-indices (i_1..i_k) are
// enumerated row-major: index = ((i_1*d + i_2)*d + ...)*d + i_k.
// Forward evaluation folds segment exponentials with Chen's identity;
// oracle_signature integrates the iterated integrals numerically and exists
// as an independent cross-check.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sigpath {

struct PiecewiseLinearPath {
  std::size_t dim = 0;
  std::vector<double> params;  // nondecreasing knot parameters, length n
  std::vector<double> values;  // n x dim, row-major

  std::size_t knots() const { return params.size(); }
  double value(std::size_t k, std::size_t ch) const { return values[k * dim + ch]; }
  double& value(std::size_t k, std::size_t ch) { return values[k * dim + ch]; }
  void validate() const;
};

class TruncatedSignature {
 public:
  TruncatedSignature() = default;
  TruncatedSignature(std::size_t dim, int depth);  // zero coefficients

  std::size_t dim() const { return dim_; }
  int depth() const { return depth_; }

  std::span<double> level(int k);
  std::span<const double> level(int k) const;
  std::size_t level_size(int k) const { return offsets_[k] - offsets_[k - 1]; }

  // all levels concatenated, level 1 first
  std::vector<double>& coeffs() { return data_; }
  const std::vector<double>& coeffs() const { return data_; }

 private:
  std::size_t dim_ = 0;
  int depth_ = 0;
  std::vector<std::size_t> offsets_;  // depth+1 entries, offsets_[0] == 0
  std::vector<double> data_;
};

inline constexpr int kMaxDepth = 6;
inline constexpr std::size_t kDefaultCoeffBudget = std::size_t{1} << 22;

// total coefficient count sum_{k=1..depth} dim^k; throws if it exceeds budget
std::size_t signature_size(std::size_t dim, int depth,
                           std::size_t budget = kDefaultCoeffBudget);

// exponential of a linear segment: level k = delta^(tensor k) / k!
TruncatedSignature sig_segment(std::span<const double> delta, int depth);

// Chen's identity: level k of a*b = sum_{i+j=k} a_i (x) b_j, level 0 == 1
TruncatedSignature chen_mul(const TruncatedSignature& a, const TruncatedSignature& b);

// left fold of chen_mul over segment exponentials; a single knot gives the
// zero signature of the constant path
TruncatedSignature signature(const PiecewiseLinearPath& path, int depth);

// Iterated-integral quadrature on a fine grid: level k integrates the
// level-(k-1) partial signature against df with a Simpson-type cell rule,
// cells never straddling a knot. Independent test oracle, exact for
// piecewise-linear paths up to level 4.
TruncatedSignature oracle_signature(const PiecewiseLinearPath& path, int depth,
                                    std::size_t steps = 10000);

// (S^(i,j) - S^(j,i)) / 2: signed area against the endpoint chord
double levy_area(const PiecewiseLinearPath& path, std::size_t i, std::size_t j);

// Reverse-mode derivative of <upstream, signature(path)> with respect to the
// knot values; result is knots x dim, row-major. Knot parameters are never
// read, so their gradient is identically zero.
std::vector<double> signature_backward(const PiecewiseLinearPath& path, int depth,
                                       const TruncatedSignature& upstream);

// prepends the knot parameter as channel 0
PiecewiseLinearPath time_augment(const PiecewiseLinearPath& path);

}  // namespace sigpath
