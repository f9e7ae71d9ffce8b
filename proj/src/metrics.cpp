#include "parasim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/bipartite.hpp>
#include <boost/graph/connected_components.hpp>
#include <fmt/format.h>

#include "parasim/errors.hpp"

namespace parasim {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> d) : n_(n), d_(std::move(d)) {
  if (d_.size() != n_ * n_) throw UsageError("distance matrix: size mismatch");
}

namespace {

void require_agent(const Population& pop, AgentId a) {
  if (a.index >= pop.size()) {
    throw UsageError(fmt::format("agent {} outside population of {}", a.index, pop.size()));
  }
}

}  // namespace

double mutual_understanding(const Population& pop) { return mutual_information(joint_messages(pop)); }

double env_info(const Population& pop, AgentId agent) {
  require_agent(pop, agent);
  return mutual_information_with_rest(joint_messages_env(pop, RoleCondition{Role::Sender, agent}), Axis::First);
}

double sensor_info(const Population& pop, AgentId agent) {
  require_agent(pop, agent);
  const auto& prior = pop.environment().prior();
  const Code& c = pop.code(agent);
  const std::size_t s = pop.alphabet_size();
  std::vector<double> p(pop.num_states() * s, 0.0);
  for (std::size_t mu = 0; mu < pop.num_states(); ++mu) {
    for (const auto& sm : c.support(mu)) p[mu * s + sm.symbol] += prior[mu] * sm.prob;
  }
  return mutual_information(Dist2(pop.num_states(), s, std::move(p)));
}

double identifiability(const Population& pop) {
  return mutual_information_with_rest(joint_agent_messages(pop), Axis::First);
}

double blend_kl(const Population& pop, AgentId parasite) {
  require_agent(pop, parasite);
  const Dist2 cond = marginal_pair(joint_messages_env(pop, RoleCondition{Role::Sender, parasite}), Axis::First);
  // The population joint is a mixture that includes the conditional with
  // weight p(parasite) > 0, so it covers every cell the conditional uses.
  return kl_divergence(cond, joint_messages(pop));
}

double missing_info(const Population& pop, AgentId parasite) {
  require_agent(pop, parasite);
  const Dist3 j = joint_messages_env(pop, RoleCondition{Role::Receiver, parasite});
  return conditional_mutual_information(j, Axis::First, Axis::Third, Axis::Second);
}

double avg_env_info(const Population& pop) {
  require_valid(pop);
  double total = 0.0;
  for (std::size_t a = 0; a < pop.size(); ++a) {
    total += pop.graph().marginal(a) * env_info(pop, {a});
  }
  return total;
}

double group_mutual_understanding(const Population& pop, std::span<const AgentId> members) {
  require_valid(pop);
  std::vector<char> in(pop.size(), 0);
  for (const auto& a : members) {
    require_agent(pop, a);
    in[a.index] = 1;
  }
  const std::size_t s = pop.alphabet_size();
  const auto& g = pop.graph();
  const auto& prior = pop.environment().prior();
  std::vector<double> p(s * s, 0.0);
  double mass = 0.0;
  for (const auto& e : g.edges()) {
    if (!in[e.a] && !in[e.b]) continue;
    for (auto [from, to] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      const double w = g.weight(from, to);
      mass += w;
      for (std::size_t mu = 0; mu < pop.num_states(); ++mu) {
        for (const auto& xa : pop.codes()[from].support(mu)) {
          for (const auto& xb : pop.codes()[to].support(mu)) {
            p[xa.symbol * s + xb.symbol] += w * prior[mu] * xa.prob * xb.prob;
          }
        }
      }
    }
  }
  if (mass <= 0.0) throw DegenerateConditioningError("group has no interactions");
  for (double& v : p) v /= mass;
  return mutual_information(Dist2(s, s, std::move(p)));
}

MeasureReport measure(const Population& pop) {
  require_valid(pop);
  MeasureReport r;
  r.mutual_understanding = mutual_understanding(pop);
  r.per_agent_env_info.reserve(pop.size());
  for (std::size_t a = 0; a < pop.size(); ++a) {
    const double e = env_info(pop, {a});
    r.per_agent_env_info.push_back(e);
    r.avg_env_info += pop.graph().marginal(a) * e;
  }
  r.identifiability = identifiability(pop);
  for (const auto& p : pop.parasites()) {
    ParasiteMeasures pm;
    pm.agent = p;
    pm.blend_kl = blend_kl(pop, p);
    pm.missing_info = missing_info(pop, p);
    pm.sensor_info = sensor_info(pop, p);
    pm.env_info = r.per_agent_env_info[p.index];
    r.parasites.push_back(pm);
  }
  return r;
}

// ---------------------------------------------------------------------------

double code_distance(const Code& a, const Code& b) {
  if (a.num_states() != b.num_states() || a.alphabet_size() != b.alphabet_size()) {
    throw UsageError("code_distance: codes differ in shape");
  }
  if (a.is_deterministic() && b.is_deterministic()) {
    // JSD of two point masses is 0 when they coincide and exactly 1 bit
    // otherwise.
    std::size_t differing = 0;
    for (std::size_t mu = 0; mu < a.num_states(); ++mu) differing += a.symbols()[mu] != b.symbols()[mu];
    return std::sqrt(static_cast<double>(differing));
  }
  double total = 0.0;
  for (std::size_t mu = 0; mu < a.num_states(); ++mu) total += detail::js_divergence_bits(a.row(mu), b.row(mu));
  return std::sqrt(total);
}

DistanceMatrix distance_matrix(std::span<const Code> codes) {
  const std::size_t n = codes.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = code_distance(codes[i], codes[j]);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return DistanceMatrix(n, std::move(d));
}

DistanceMatrix distance_matrix(const Population& pop) { return distance_matrix(std::span<const Code>(pop.codes())); }

// ---------------------------------------------------------------------------

namespace {

bool same_code(const Code& a, const Code& b) {
  if (a.num_states() != b.num_states() || a.alphabet_size() != b.alphabet_size()) return false;
  if (a.is_deterministic() && b.is_deterministic()) {
    return std::equal(a.symbols().begin(), a.symbols().end(), b.symbols().begin());
  }
  for (std::size_t mu = 0; mu < a.num_states(); ++mu) {
    const auto ra = a.row(mu);
    const auto rb = b.row(mu);
    for (std::size_t x = 0; x < ra.size(); ++x) {
      if (std::abs(ra[x] - rb[x]) >= 1e-9) return false;
    }
  }
  return true;
}

using UGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;

}  // namespace

std::vector<std::size_t> group_code_types(std::span<const Code> codes) {
  std::vector<std::size_t> type(codes.size());
  std::vector<std::size_t> reps;
  // Deterministic codes hash on their symbol vectors; the rest fall back to a
  // linear scan over representatives.
  std::map<std::vector<std::uint32_t>, std::size_t> by_symbols;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const Code& c = codes[i];
    if (c.is_deterministic()) {
      std::vector<std::uint32_t> key(c.symbols().begin(), c.symbols().end());
      key.push_back(static_cast<std::uint32_t>(c.alphabet_size()));
      auto [it, fresh] = by_symbols.try_emplace(std::move(key), reps.size());
      if (fresh) reps.push_back(i);
      type[i] = it->second;
      continue;
    }
    std::size_t found = reps.size();
    for (std::size_t t = 0; t < reps.size(); ++t) {
      if (!codes[reps[t]].is_deterministic() && same_code(codes[reps[t]], c)) {
        found = t;
        break;
      }
    }
    if (found == reps.size()) reps.push_back(i);
    type[i] = found;
  }
  return type;
}

StructureReport analyze_structure(const Population& pop) {
  require_valid(pop);
  const std::size_t n = pop.size();
  const auto& g = pop.graph();

  UGraph ug(n);
  for (const auto& e : g.edges()) boost::add_edge(e.a, e.b, ug);
  std::vector<int> comp(n);
  const int ncomp = boost::connected_components(ug, comp.data());

  StructureReport rep;
  rep.agent_type = group_code_types(std::span<const Code>(pop.codes()));
  rep.agent_component.assign(comp.begin(), comp.end());

  const std::size_t ntypes = n == 0 ? 0 : *std::max_element(rep.agent_type.begin(), rep.agent_type.end()) + 1;
  rep.types.resize(ntypes);
  for (std::size_t t = 0; t < ntypes; ++t) rep.types[t].id = t;
  for (std::size_t a = 0; a < n; ++a) rep.types[rep.agent_type[a]].members.push_back({a});

  rep.components.resize(static_cast<std::size_t>(ncomp));
  for (std::size_t a = 0; a < n; ++a) rep.components[rep.agent_component[a]].agents.push_back({a});

  for (auto& c : rep.components) {
    std::map<std::size_t, std::size_t> sizes;
    for (const auto& a : c.agents) ++sizes[rep.agent_type[a.index]];
    std::map<std::size_t, std::size_t> local;
    for (const auto& [t, count] : sizes) {
      local[t] = c.type_ids.size();
      c.type_ids.push_back(t);
      c.type_sizes.push_back(count);
    }

    bool intra_type_edge = false;
    std::set<std::pair<std::size_t, std::size_t>> quotient_edges;
    for (const auto& a : c.agents) {
      for (std::size_t b : g.neighbors(a.index)) {
        const std::size_t ta = rep.agent_type[a.index];
        const std::size_t tb = rep.agent_type[b];
        if (ta == tb) {
          intra_type_edge = true;
        } else {
          quotient_edges.insert({std::min(local[ta], local[tb]), std::max(local[ta], local[tb])});
        }
      }
    }
    if (intra_type_edge) {
      c.bipartite_by_type = false;
      continue;
    }
    UGraph q(c.type_ids.size());
    for (auto [u, v] : quotient_edges) boost::add_edge(u, v, q);
    c.bipartite_by_type = boost::is_bipartite(q);
  }
  return rep;
}

Dist1 symbol_usage(const Population& pop, std::span<const AgentId> exclude) {
  require_valid(pop);
  std::vector<char> skip(pop.size(), 0);
  for (const auto& a : exclude) {
    require_agent(pop, a);
    skip[a.index] = 1;
  }
  const auto& prior = pop.environment().prior();
  std::vector<double> p(pop.alphabet_size(), 0.0);
  double mass = 0.0;
  for (std::size_t a = 0; a < pop.size(); ++a) {
    if (skip[a]) continue;
    const double pa = pop.graph().marginal(a);
    mass += pa;
    for (std::size_t mu = 0; mu < pop.num_states(); ++mu) {
      for (const auto& sm : pop.codes()[a].support(mu)) p[sm.symbol] += pa * prior[mu] * sm.prob;
    }
  }
  if (mass <= 0.0) throw UsageError("symbol_usage: every sender excluded");
  for (double& v : p) v /= mass;
  return Dist1(std::move(p));
}

double parasite_symbol_mass(const Population& pop) {
  std::vector<char> used(pop.alphabet_size(), 0);
  for (const auto& p : pop.parasites()) {
    for (std::size_t s : used_symbols(pop.code(p))) used[s] = 1;
  }
  const Dist1 usage = symbol_usage(pop, pop.parasites());
  double mass = 0.0;
  for (std::size_t s = 0; s < usage.size(); ++s) {
    if (used[s]) mass += usage[s];
  }
  return mass;
}

std::vector<std::size_t> used_symbols(const Code& code) {
  std::set<std::size_t> s;
  for (std::size_t mu = 0; mu < code.num_states(); ++mu) {
    for (const auto& sm : code.support(mu)) s.insert(sm.symbol);
  }
  return {s.begin(), s.end()};
}

}  // namespace parasim
