#include "parasim/message_counts.hpp"

#include <algorithm>
#include <cmath>

#include "parasim/errors.hpp"

namespace parasim {

namespace {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

MessageCounts::MessageCounts(std::size_t alphabet_size, std::vector<double> state_weights)
    : s_(alphabet_size), w_(std::move(state_weights)), c_(s_ * s_, 0.0), rows_(s_, 0.0) {
  if (s_ == 0 || w_.empty()) throw UsageError("MessageCounts: empty alphabet or state set");
}

void MessageCounts::clear() {
  std::fill(c_.begin(), c_.end(), 0.0);
  std::fill(rows_.begin(), rows_.end(), 0.0);
  total_ = cell_term_ = row_term_ = 0.0;
}

void MessageCounts::bump(std::size_t x, std::size_t y, double delta) {
  double& c = c_[x * s_ + y];
  cell_term_ -= xlog2x(c);
  c += delta;
  if (c < 0.5e-12 && c > -0.5e-12) c = 0.0;
  cell_term_ += xlog2x(c);
}

void MessageCounts::bump_row(std::size_t x, double delta) {
  double& r = rows_[x];
  row_term_ -= xlog2x(r);
  r += delta;
  if (r < 0.5e-12 && r > -0.5e-12) r = 0.0;
  row_term_ += xlog2x(r);
}

void MessageCounts::add_edge(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, double sign) {
  for (std::size_t mu = 0; mu < w_.size(); ++mu) {
    const double d = sign * w_[mu];
    bump(a[mu], b[mu], d);
    bump(b[mu], a[mu], d);
    bump_row(a[mu], d);
    bump_row(b[mu], d);
    total_ += 2.0 * d;
  }
}

void MessageCounts::change_symbol(std::size_t state, std::uint32_t from, std::uint32_t to,
                                  std::span<const std::uint32_t> neighbor_symbols) {
  if (from == to) return;
  const double w = w_[state];
  for (std::uint32_t y : neighbor_symbols) {
    bump(from, y, -w);
    bump(y, from, -w);
    bump(to, y, w);
    bump(y, to, w);
  }
  // Row y loses w at (y, from) and gains it back at (y, to).
  const double moved = w * static_cast<double>(neighbor_symbols.size());
  bump_row(from, -moved);
  bump_row(to, moved);
}

double MessageCounts::mutual_information() const { return mutual_information(c_, s_); }

double MessageCounts::mutual_information(std::span<const double> cells, std::size_t s) {
  // Rows and total are re-derived from the cells so the result depends on the
  // table alone, not on the update history.
  std::vector<double> rows(s, 0.0);
  double total = 0.0;
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = 0; y < s; ++y) rows[x] += cells[x * s + y];
    total += rows[x];
  }
  if (total <= 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t x = 0; x < s; ++x) {
    if (rows[x] <= 0.0) continue;
    for (std::size_t y = 0; y < s; ++y) {
      const double c = cells[x * s + y];
      if (c > 0.0) sum += c * std::log2(c * total / (rows[x] * rows[y]));
    }
  }
  const double info = sum / total;
  return info < 0.0 ? 0.0 : info;
}

double MessageCounts::tracked_mutual_information() const {
  if (total_ <= 0.0) return 0.0;
  return std::log2(total_) + (cell_term_ - 2.0 * row_term_) / total_;
}

void MessageCounts::resync() {
  std::fill(rows_.begin(), rows_.end(), 0.0);
  total_ = 0.0;
  cell_term_ = 0.0;
  for (std::size_t x = 0; x < s_; ++x) {
    for (std::size_t y = 0; y < s_; ++y) {
      const double c = c_[x * s_ + y];
      rows_[x] += c;
      cell_term_ += xlog2x(c);
    }
    total_ += rows_[x];
  }
  row_term_ = 0.0;
  for (double r : rows_) row_term_ += xlog2x(r);
}

void MessageCounts::merge(const MessageCounts& other) {
  if (other.s_ != s_ || other.w_ != w_) throw UsageError("MessageCounts::merge: incompatible tables");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += other.c_[k];
  resync();
}

}  // namespace parasim
