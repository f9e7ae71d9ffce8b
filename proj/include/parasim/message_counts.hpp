#pragma once

// Unnormalized message-pair counts for deterministic codes on edge-uniform
// graphs.
//
// Every undirected edge (a, b) contributes, for each state mu, weight w_mu to
// cell (a(mu), b(mu)) and to cell (b(mu), a(mu)), where w_mu = M * p(mu).  With
// a uniform prior every weight is exactly 1, so the table holds integers and
// the normalized joint is counts / total.  This is the same p(x, x') that
// joint_messages() builds, without the N x N graph and the validation pass.
//
// Two mutual-information readings are offered.  mutual_information() sums
// the table from scratch in a fixed order and is what fitness values are
// built from.  tracked_mutual_information() is maintained in O(1) per cell
// update from
//
//     I = log2 T + (sum_ij c_ij log2 c_ij - 2 sum_i r_i log2 r_i) / T
//
// (row sums equal column sums because the table is symmetric) and is used to
// rank candidate moves during local search; resync() clears its drift.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace parasim {

class MessageCounts {
 public:
  MessageCounts(std::size_t alphabet_size, std::vector<double> state_weights);

  std::size_t alphabet_size() const { return s_; }
  std::size_t num_states() const { return w_.size(); }
  double total() const { return total_; }
  double count(std::size_t x, std::size_t y) const { return c_[x * s_ + y]; }
  const std::vector<double>& cells() const { return c_; }

  void clear();

  /// Adds (sign = +1) or removes (sign = -1) both orientations of an edge
  /// between agents whose per-state symbols are `a` and `b`.
  void add_edge(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, double sign = 1.0);

  /// One agent switches its symbol at `state` from `from` to `to`.
  /// `neighbor_symbols` are the symbols its neighbours emit at that state.
  void change_symbol(std::size_t state, std::uint32_t from, std::uint32_t to,
                     std::span<const std::uint32_t> neighbor_symbols);

  double mutual_information() const;
  double tracked_mutual_information() const;
  void resync();

  /// Adds another table cell-wise (same alphabet and weights).
  void merge(const MessageCounts& other);

  /// Mutual information of a raw symmetric s x s count table.
  static double mutual_information(std::span<const double> cells, std::size_t s);

 private:
  void bump(std::size_t x, std::size_t y, double delta);
  void bump_row(std::size_t x, double delta);

  std::size_t s_;
  std::vector<double> w_;
  std::vector<double> c_;
  std::vector<double> rows_;
  double total_ = 0.0;
  double cell_term_ = 0.0;  // sum c log2 c
  double row_term_ = 0.0;   // sum r log2 r
};

}  // namespace parasim
