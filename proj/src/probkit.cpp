#include "parasim/probkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "parasim/errors.hpp"

namespace parasim {

namespace {

void check_and_normalize(std::vector<double>& p, const char* what) {
  if (p.empty()) {
    throw ValidationError(fmt::format("{}: empty distribution", what));
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw ValidationError(fmt::format("{}: entry {} is {} (must be finite and >= 0)", what, i, p[i]));
    }
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError(fmt::format("{}: total mass {:.17g} differs from 1 by more than {}", what, total,
                                      kNormTolerance));
  }
  if (total != 1.0) {
    for (double& v : p) v /= total;
  }
}

double plogp_sum(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

std::size_t idx(Axis a) { return static_cast<std::size_t>(a); }

void require_distinct(Axis a, Axis b) {
  if (a == b) throw UsageError("axes must be distinct");
}

// Remaining axis when two distinct ones are given.
Axis third_axis(Axis a, Axis b) {
  return static_cast<Axis>(3 - idx(a) - idx(b));
}

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

// ---------------------------------------------------------------------------

Dist1::Dist1(std::vector<double> p) : p_(std::move(p)) { check_and_normalize(p_, "Dist1"); }

Dist1 Dist1::uniform(std::size_t k) {
  if (k == 0) throw ValidationError("Dist1: empty distribution");
  return Dist1(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Dist1 Dist1::point_mass(std::size_t k, std::size_t at) {
  if (at >= k) throw UsageError("Dist1::point_mass: index out of range");
  std::vector<double> p(k, 0.0);
  p[at] = 1.0;
  return Dist1(std::move(p));
}

Dist2::Dist2(std::size_t rows, std::size_t cols, std::vector<double> p)
    : rows_(rows), cols_(cols), p_(std::move(p)) {
  if (p_.size() != rows_ * cols_) {
    throw UsageError(fmt::format("Dist2: {} values for shape {}x{}", p_.size(), rows_, cols_));
  }
  check_and_normalize(p_, "Dist2");
}

Dist3::Dist3(std::array<std::size_t, 3> shape, std::vector<double> p) : shape_(shape), p_(std::move(p)) {
  if (p_.size() != shape_[0] * shape_[1] * shape_[2]) {
    throw UsageError(
        fmt::format("Dist3: {} values for shape {}x{}x{}", p_.size(), shape_[0], shape_[1], shape_[2]));
  }
  check_and_normalize(p_, "Dist3");
}

// ---------------------------------------------------------------------------

Dist1 marginal(const Dist2& d, Axis keep) {
  if (keep == Axis::Third) throw UsageError("Dist2 has no third axis");
  std::vector<double> m(keep == Axis::First ? d.rows() : d.cols(), 0.0);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      m[keep == Axis::First ? i : j] += d(i, j);
    }
  }
  return Dist1(std::move(m));
}

Dist1 marginal(const Dist3& d, Axis keep) {
  const auto& s = d.shape();
  std::vector<double> m(s[idx(keep)], 0.0);
  for (std::size_t i = 0; i < s[0]; ++i) {
    for (std::size_t j = 0; j < s[1]; ++j) {
      for (std::size_t k = 0; k < s[2]; ++k) {
        const std::array<std::size_t, 3> at{i, j, k};
        m[at[idx(keep)]] += d(i, j, k);
      }
    }
  }
  return Dist1(std::move(m));
}

Dist2 marginal_pair(const Dist3& d, Axis drop) {
  const auto& s = d.shape();
  std::array<std::size_t, 2> keep{};
  std::size_t n = 0;
  for (std::size_t a = 0; a < 3; ++a) {
    if (a != idx(drop)) keep[n++] = a;
  }
  std::vector<double> m(s[keep[0]] * s[keep[1]], 0.0);
  for (std::size_t i = 0; i < s[0]; ++i) {
    for (std::size_t j = 0; j < s[1]; ++j) {
      for (std::size_t k = 0; k < s[2]; ++k) {
        const std::array<std::size_t, 3> at{i, j, k};
        m[at[keep[0]] * s[keep[1]] + at[keep[1]]] += d(i, j, k);
      }
    }
  }
  return Dist2(s[keep[0]], s[keep[1]], std::move(m));
}

Dist2 transpose(const Dist2& d) {
  std::vector<double> t(d.rows() * d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) t[j * d.rows() + i] = d(i, j);
  }
  return Dist2(d.cols(), d.rows(), std::move(t));
}

// ---------------------------------------------------------------------------

double entropy(const Dist1& d) { return plogp_sum(d.values()); }
double entropy(const Dist2& d) { return plogp_sum(d.values()); }
double entropy(const Dist3& d) { return plogp_sum(d.values()); }

double mutual_information(const Dist2& j) {
  const Dist1 a = marginal(j, Axis::First);
  const Dist1 b = marginal(j, Axis::Second);
  double info = 0.0;
  for (std::size_t x = 0; x < j.rows(); ++x) {
    for (std::size_t y = 0; y < j.cols(); ++y) {
      const double p = j(x, y);
      if (p > 0.0) info += p * std::log2(p / (a[x] * b[y]));
    }
  }
  return clamp_nonneg(info);
}

double mutual_information(const Dist3& j, Axis a, Axis b) {
  require_distinct(a, b);
  const Dist2 pair = marginal_pair(j, third_axis(a, b));
  // marginal_pair keeps axes in ascending order; MI is symmetric anyway.
  return mutual_information(pair);
}

double mutual_information_with_rest(const Dist3& j, Axis single) {
  const auto& s = j.shape();
  const Dist1 a = marginal(j, single);
  const Dist2 rest = marginal_pair(j, single);
  double info = 0.0;
  for (std::size_t i = 0; i < s[0]; ++i) {
    for (std::size_t k1 = 0; k1 < s[1]; ++k1) {
      for (std::size_t k2 = 0; k2 < s[2]; ++k2) {
        const double p = j(i, k1, k2);
        if (p <= 0.0) continue;
        const std::array<std::size_t, 3> at{i, k1, k2};
        std::array<std::size_t, 2> r{};
        std::size_t n = 0;
        for (std::size_t ax = 0; ax < 3; ++ax) {
          if (ax != idx(single)) r[n++] = at[ax];
        }
        info += p * std::log2(p / (a[at[idx(single)]] * rest(r[0], r[1])));
      }
    }
  }
  return clamp_nonneg(info);
}

double conditional_mutual_information(const Dist3& j, Axis a, Axis b, Axis given) {
  require_distinct(a, b);
  require_distinct(a, given);
  require_distinct(b, given);
  const auto& s = j.shape();
  const Dist1 pc = marginal(j, given);
  // p(a,c) and p(b,c) stored as [a][c] / [b][c] tables.
  std::vector<double> pac(s[idx(a)] * s[idx(given)], 0.0);
  std::vector<double> pbc(s[idx(b)] * s[idx(given)], 0.0);
  const std::size_t nc = s[idx(given)];
  for (std::size_t i = 0; i < s[0]; ++i) {
    for (std::size_t k1 = 0; k1 < s[1]; ++k1) {
      for (std::size_t k2 = 0; k2 < s[2]; ++k2) {
        const std::array<std::size_t, 3> at{i, k1, k2};
        const double p = j(i, k1, k2);
        pac[at[idx(a)] * nc + at[idx(given)]] += p;
        pbc[at[idx(b)] * nc + at[idx(given)]] += p;
      }
    }
  }
  double info = 0.0;
  for (std::size_t i = 0; i < s[0]; ++i) {
    for (std::size_t k1 = 0; k1 < s[1]; ++k1) {
      for (std::size_t k2 = 0; k2 < s[2]; ++k2) {
        const double p = j(i, k1, k2);
        if (p <= 0.0) continue;
        const std::array<std::size_t, 3> at{i, k1, k2};
        const std::size_t c = at[idx(given)];
        info += p * std::log2(p * pc[c] / (pac[at[idx(a)] * nc + c] * pbc[at[idx(b)] * nc + c]));
      }
    }
  }
  return clamp_nonneg(info);
}

namespace {

double kl_kernel(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0.0) continue;
    if (b[i] <= 0.0) {
      throw AbsoluteContinuityError(
          fmt::format("kl_divergence: cell {} has mass {} but reference mass 0", i, a[i]));
    }
    d += a[i] * std::log2(a[i] / b[i]);
  }
  return clamp_nonneg(d);
}

}  // namespace

double kl_divergence(const Dist1& a, const Dist1& b) {
  if (a.size() != b.size()) throw UsageError("kl_divergence: shape mismatch");
  return kl_kernel(a.values(), b.values());
}

double kl_divergence(const Dist2& a, const Dist2& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("kl_divergence: shape mismatch");
  return kl_kernel(a.values(), b.values());
}

double js_divergence(const Dist1& a, const Dist1& b) {
  if (a.size() != b.size()) throw UsageError("js_divergence: shape mismatch");
  return detail::js_divergence_bits(a.values(), b.values());
}

namespace detail {

double entropy_bits(std::span<const double> p) { return plogp_sum(p); }

double js_divergence_bits(std::span<const double> a, std::span<const double> b) {
  double mix = 0.0;
  double ha = 0.0;
  double hb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double m = 0.5 * (a[i] + b[i]);
    if (m > 0.0) mix -= m * std::log2(m);
    if (a[i] > 0.0) ha -= a[i] * std::log2(a[i]);
    if (b[i] > 0.0) hb -= b[i] * std::log2(b[i]);
  }
  const double jsd = mix - 0.5 * (ha + hb);
  return std::clamp(jsd, 0.0, 1.0);
}

}  // namespace detail

}  // namespace parasim
