#pragma once

// Named measures over a population, all in bits and all exact.
//
//   mutual understanding   I(X; X')
//   environmental info     I(mu; X, X' | Theta = agent)
//   identifiability        I(Theta; X, X')
//   blend-in divergence    D( p(X, X' | Theta = parasite) || p(X, X') )
//   missing information    I(mu; X' | X, Theta' = parasite)
//   sensor information     I(mu; X | Theta = agent)

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "parasim/popmodel.hpp"

namespace parasim {

struct ParasiteMeasures {
  AgentId agent;
  double blend_kl = 0.0;
  double missing_info = 0.0;
  double sensor_info = 0.0;
  double env_info = 0.0;
};

struct MeasureReport {
  double mutual_understanding = 0.0;
  std::vector<double> per_agent_env_info;
  double avg_env_info = 0.0;
  double identifiability = 0.0;
  std::vector<ParasiteMeasures> parasites;
};

/// Symmetric matrix of code distances with a zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t n, std::vector<double> d);
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  const std::vector<double>& values() const { return d_; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

double mutual_understanding(const Population& pop);
double env_info(const Population& pop, AgentId agent);
double sensor_info(const Population& pop, AgentId agent);
double identifiability(const Population& pop);
double blend_kl(const Population& pop, AgentId parasite);
double missing_info(const Population& pop, AgentId parasite);

/// p(theta)-weighted mean of env_info over all agents, i.e.
/// I(mu; X, X' | Theta).
double avg_env_info(const Population& pop);

/// Mutual understanding restricted to ordered pairs with at least one
/// endpoint in `members`.
double group_mutual_understanding(const Population& pop, std::span<const AgentId> members);

MeasureReport measure(const Population& pop);

/// sqrt( sum_mu JSD(a(.|mu), b(.|mu)) ); ranges over [0, sqrt(M)].
double code_distance(const Code& a, const Code& b);
DistanceMatrix distance_matrix(const Population& pop);
DistanceMatrix distance_matrix(std::span<const Code> codes);

// ---------------------------------------------------------------------------
// Structure

struct CodeType {
  std::size_t id;                  // global type index
  std::vector<AgentId> members;
};

struct Component {
  std::vector<AgentId> agents;
  std::vector<std::size_t> type_ids;  // sorted global type ids present
  std::vector<std::size_t> type_sizes;  // members per type, same order
  bool bipartite_by_type = false;
};

struct StructureReport {
  std::vector<Component> components;
  std::vector<CodeType> types;
  std::vector<std::size_t> agent_component;
  std::vector<std::size_t> agent_type;
};

/// Connected components of the positive-weight graph, agents grouped into
/// code types, and whether each component's type-quotient graph is bipartite
/// (no edge joins two agents of one type and the types are 2-colourable).
StructureReport analyze_structure(const Population& pop);

/// Groups codes by equality: exact for deterministic codes, per-row
/// L-infinity below 1e-9 otherwise.  Returns the type index of each code.
std::vector<std::size_t> group_code_types(std::span<const Code> codes);

/// Message marginal p(x) over senders not in `exclude`.
Dist1 symbol_usage(const Population& pop, std::span<const AgentId> exclude = {});

/// Symbols the given agent emits with positive probability, ascending.
std::vector<std::size_t> used_symbols(const Code& code);

/// Host message mass on symbols that some parasite emits.
double parasite_symbol_mass(const Population& pop);

}  // namespace parasim
