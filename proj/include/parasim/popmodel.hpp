#pragma once

// Agents, codes, interaction structure and the joint distributions they
// induce.
//
// The generative model: an environment state mu is drawn from the prior, an
// ordered pair of agents (sender, receiver) is drawn from the interaction
// graph, and each agent emits a message symbol through its own code.  Every
// joint built here is an exact sum over that model.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parasim/probkit.hpp"

namespace parasim {

class Environment {
 public:
  explicit Environment(Dist1 prior);
  static Environment uniform(std::size_t num_states);

  std::size_t num_states() const { return prior_.size(); }
  const Dist1& prior() const { return prior_; }

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  Dist1 prior_;
};

/// A (state, symbol) probability with symbol as the sparse key.
struct SymbolMass {
  std::uint32_t symbol;
  double prob;
  friend bool operator==(const SymbolMass&, const SymbolMass&) = default;
};

/// Row-stochastic map from environment states to message symbols.
///
/// Construction does not enforce row normalization so that a malformed code
/// read from disk can still be inspected by validate(); every consumer that
/// needs a well-formed model goes through validate() first.
class Code {
 public:
  Code(std::size_t num_states, std::size_t alphabet_size, std::vector<double> table);

  /// One symbol per state.
  static Code deterministic(std::span<const std::uint32_t> symbols, std::size_t alphabet_size);

  std::size_t num_states() const { return num_states_; }
  std::size_t alphabet_size() const { return alphabet_size_; }
  double prob(std::size_t state, std::size_t symbol) const { return table_[state * alphabet_size_ + symbol]; }
  std::span<const double> row(std::size_t state) const {
    return {table_.data() + state * alphabet_size_, alphabet_size_};
  }
  std::span<const SymbolMass> support(std::size_t state) const { return support_[state]; }

  bool is_deterministic() const { return !symbols_.empty(); }
  /// Per-state symbols of a deterministic code; empty otherwise.
  std::span<const std::uint32_t> symbols() const { return symbols_; }

  /// Same code over a larger (or equal) alphabet; new symbols get zero mass.
  Code with_alphabet(std::size_t alphabet_size) const;

  const std::vector<double>& table() const { return table_; }

  friend bool operator==(const Code& a, const Code& b) {
    return a.num_states_ == b.num_states_ && a.alphabet_size_ == b.alphabet_size_ && a.table_ == b.table_;
  }

 private:
  std::size_t num_states_;
  std::size_t alphabet_size_;
  std::vector<double> table_;
  std::vector<std::vector<SymbolMass>> support_;
  std::vector<std::uint32_t> symbols_;
};

struct AgentId {
  std::size_t index = 0;
  friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

/// Undirected edge with the probability carried by each of its two ordered
/// pairs.
struct WeightedEdge {
  std::size_t a;
  std::size_t b;
  double weight;
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Joint probability p(sender, receiver) over ordered agent pairs.
class InteractionGraph {
 public:
  /// Dense N x N weights, row-major.  Not validated here; see validate().
  InteractionGraph(std::size_t num_agents, std::vector<double> weights);

  /// Every listed undirected edge gets 1/(2|E|) on each ordered pair.
  /// Duplicate edges are collapsed.  Self-edges are rejected.
  static InteractionGraph edge_uniform(std::size_t num_agents,
                                       std::span<const std::pair<std::size_t, std::size_t>> edges);

  /// Complete graph without self-loops.
  static InteractionGraph well_mixed(std::size_t num_agents);

  std::size_t size() const { return n_; }
  double weight(std::size_t a, std::size_t b) const { return w_[a * n_ + b]; }
  /// p(Theta = a) = sum_b w(a, b).
  double marginal(std::size_t a) const;

  /// Edges with positive weight, a < b, in lexicographic order.  For a
  /// symmetric graph weight equals w(a,b) = w(b,a).
  const std::vector<WeightedEdge>& edges() const { return edges_; }
  const std::vector<std::size_t>& neighbors(std::size_t a) const { return neighbors_[a]; }
  std::size_t degree(std::size_t a) const { return neighbors_[a].size(); }

  /// Undirected edge list with positive weight (a < b).
  std::vector<std::pair<std::size_t, std::size_t>> edge_pairs() const;

  const std::vector<double>& weights() const { return w_; }

  friend bool operator==(const InteractionGraph& a, const InteractionGraph& b) {
    return a.n_ == b.n_ && a.w_ == b.w_;
  }

 private:
  std::size_t n_;
  std::vector<double> w_;
  std::vector<WeightedEdge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

class Population {
 public:
  Population(Environment environment, std::size_t alphabet_size, std::vector<Code> codes,
             std::vector<AgentId> parasites, InteractionGraph graph);

  const Environment& environment() const { return env_; }
  std::size_t num_states() const { return env_.num_states(); }
  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t size() const { return codes_.size(); }

  const std::vector<Code>& codes() const { return codes_; }
  const Code& code(AgentId id) const { return codes_.at(id.index); }
  /// Sorted, unique.
  const std::vector<AgentId>& parasites() const { return parasites_; }
  bool is_parasite(AgentId id) const;
  std::vector<AgentId> hosts() const;

  const InteractionGraph& graph() const { return graph_; }

  Population with_codes(std::vector<Code> codes) const;
  Population with_graph(InteractionGraph graph) const;
  /// Re-expresses every code over a larger alphabet.
  Population with_alphabet(std::size_t alphabet_size) const;

  friend bool operator==(const Population&, const Population&) = default;

 private:
  Environment env_;
  std::size_t alphabet_size_;
  std::vector<Code> codes_;
  std::vector<AgentId> parasites_;
  InteractionGraph graph_;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string rule;
  std::string message;
  std::optional<std::size_t> agent;
  std::optional<std::size_t> row;
  std::optional<std::size_t> cell;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks every population invariant and reports all violations.
ValidationReport validate(const Population& pop);

/// Throws ValidationError carrying the report text if validate() fails.
void require_valid(const Population& pop);

// ---------------------------------------------------------------------------
// Joint distributions

enum class Role { Sender, Receiver };

struct RoleCondition {
  Role role;
  AgentId agent;
};

/// p(x, x') over the global alphabet.
Dist2 joint_messages(const Population& pop);

/// p(mu, x, x'), optionally conditioned on Theta = agent (Sender) or
/// Theta' = agent (Receiver).
Dist3 joint_messages_env(const Population& pop, std::optional<RoleCondition> condition = std::nullopt);

/// p(theta, x, x') with theta the sender.
Dist3 joint_agent_messages(const Population& pop);

// ---------------------------------------------------------------------------
// Code constructors

/// The four deterministic 4-state, 2-symbol codes.  Phi1/Phi2 carry the first
/// bit of the state, Phi3/Phi4 the second; Phi2 and Phi4 are Phi1 and Phi3
/// with the two symbols swapped.
enum class ToyCode { Phi1, Phi2, Phi3, Phi4 };

Code toy_code(ToyCode type);

/// Moves all mass from symbol x to symbol x + offset (offset may be
/// negative).  Throws UsageError when a used symbol would leave the alphabet.
Code synonym_shift(const Code& code, std::int64_t offset);

}  // namespace parasim
