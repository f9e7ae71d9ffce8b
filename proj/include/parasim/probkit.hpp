#pragma once

// Exact discrete probability containers and information measures.
//
// Every quantity is in bits and computed by direct summation over dense
// tables; nothing here samples.  Containers are immutable once built and
// validate on construction: entries must be finite and non-negative, and the
// total mass must lie within kNormTolerance of one.  Small drift inside the
// tolerance is renormalized away, anything larger is rejected.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace parasim {

inline constexpr double kNormTolerance = 1e-9;

/// One-dimensional distribution.
class Dist1 {
 public:
  explicit Dist1(std::vector<double> p);

  static Dist1 uniform(std::size_t k);
  static Dist1 point_mass(std::size_t k, std::size_t at);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }

  friend bool operator==(const Dist1&, const Dist1&) = default;

 private:
  std::vector<double> p_;
};

/// Row-major joint distribution over two variables.
class Dist2 {
 public:
  Dist2(std::size_t rows, std::size_t cols, std::vector<double> p);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return p_[i * cols_ + j]; }
  std::span<const double> values() const { return p_; }

  friend bool operator==(const Dist2&, const Dist2&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> p_;
};

/// Row-major joint distribution over three variables; the last axis varies
/// fastest.
class Dist3 {
 public:
  Dist3(std::array<std::size_t, 3> shape, std::vector<double> p);

  const std::array<std::size_t, 3>& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return p_[(i * shape_[1] + j) * shape_[2] + k];
  }
  std::span<const double> values() const { return p_; }

  friend bool operator==(const Dist3&, const Dist3&) = default;

 private:
  std::array<std::size_t, 3> shape_;
  std::vector<double> p_;
};

enum class Axis : std::size_t { First = 0, Second = 1, Third = 2 };

// Marginals.
Dist1 marginal(const Dist2& d, Axis keep);
Dist1 marginal(const Dist3& d, Axis keep);
Dist2 marginal_pair(const Dist3& d, Axis drop);
Dist2 transpose(const Dist2& d);

// Shannon entropy with 0 log 0 = 0.
double entropy(const Dist1& d);
double entropy(const Dist2& d);
double entropy(const Dist3& d);

/// I(A;B) of a two-way joint.
double mutual_information(const Dist2& j);

/// I(A;B) of two axes of a three-way joint, the remaining axis summed out.
double mutual_information(const Dist3& j, Axis a, Axis b);

/// I(A;(B,C)) where A is `single` and (B,C) are the other two axes.
double mutual_information_with_rest(const Dist3& j, Axis single);

/// I(A;B|C) = sum_c p(c) I(A;B|C=c).  Throws UsageError when axes collide.
double conditional_mutual_information(const Dist3& j, Axis a, Axis b, Axis given);

/// D(a || b).  Throws UsageError on shape mismatch and AbsoluteContinuityError
/// when a has mass where b has none.
double kl_divergence(const Dist1& a, const Dist1& b);
double kl_divergence(const Dist2& a, const Dist2& b);

/// Jensen-Shannon divergence in bits, bounded by 1.
double js_divergence(const Dist1& a, const Dist1& b);

namespace detail {
// Unchecked kernels over raw probability vectors, shared with hot paths.
double entropy_bits(std::span<const double> p);
double js_divergence_bits(std::span<const double> a, std::span<const double> b);
}  // namespace detail

}  // namespace parasim
