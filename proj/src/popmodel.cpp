#include "parasim/popmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "parasim/errors.hpp"

namespace parasim {

Environment::Environment(Dist1 prior) : prior_(std::move(prior)) {
  if (prior_.size() < 2) {
    throw ValidationError(fmt::format("environment needs at least 2 states, got {}", prior_.size()));
  }
}

Environment Environment::uniform(std::size_t num_states) { return Environment(Dist1::uniform(num_states)); }

// ---------------------------------------------------------------------------

Code::Code(std::size_t num_states, std::size_t alphabet_size, std::vector<double> table)
    : num_states_(num_states), alphabet_size_(alphabet_size), table_(std::move(table)) {
  if (table_.size() != num_states_ * alphabet_size_) {
    throw UsageError(fmt::format("code table has {} entries, expected {}x{}", table_.size(), num_states_,
                                 alphabet_size_));
  }
  support_.resize(num_states_);
  bool deterministic = num_states_ > 0;
  std::vector<std::uint32_t> symbols;
  symbols.reserve(num_states_);
  for (std::size_t m = 0; m < num_states_; ++m) {
    for (std::size_t x = 0; x < alphabet_size_; ++x) {
      const double p = table_[m * alphabet_size_ + x];
      if (p != 0.0) support_[m].push_back({static_cast<std::uint32_t>(x), p});
    }
    if (support_[m].size() == 1 && support_[m][0].prob == 1.0) {
      symbols.push_back(support_[m][0].symbol);
    } else {
      deterministic = false;
    }
  }
  if (deterministic) symbols_ = std::move(symbols);
}

Code Code::deterministic(std::span<const std::uint32_t> symbols, std::size_t alphabet_size) {
  std::vector<double> table(symbols.size() * alphabet_size, 0.0);
  for (std::size_t m = 0; m < symbols.size(); ++m) {
    if (symbols[m] >= alphabet_size) {
      throw UsageError(fmt::format("symbol {} outside alphabet of size {}", symbols[m], alphabet_size));
    }
    table[m * alphabet_size + symbols[m]] = 1.0;
  }
  return Code(symbols.size(), alphabet_size, std::move(table));
}

Code Code::with_alphabet(std::size_t alphabet_size) const {
  if (alphabet_size < alphabet_size_) {
    for (std::size_t m = 0; m < num_states_; ++m) {
      for (const auto& sm : support_[m]) {
        if (sm.symbol >= alphabet_size) {
          throw UsageError(fmt::format("symbol {} does not fit alphabet of size {}", sm.symbol, alphabet_size));
        }
      }
    }
  }
  std::vector<double> table(num_states_ * alphabet_size, 0.0);
  for (std::size_t m = 0; m < num_states_; ++m) {
    for (const auto& sm : support_[m]) table[m * alphabet_size + sm.symbol] = sm.prob;
  }
  return Code(num_states_, alphabet_size, std::move(table));
}

// ---------------------------------------------------------------------------

InteractionGraph::InteractionGraph(std::size_t num_agents, std::vector<double> weights)
    : n_(num_agents), w_(std::move(weights)), neighbors_(num_agents) {
  if (w_.size() != n_ * n_) {
    throw UsageError(fmt::format("interaction matrix has {} entries, expected {}x{}", w_.size(), n_, n_));
  }
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) {
      const double wab = w_[a * n_ + b];
      const double wba = w_[b * n_ + a];
      if (wab > 0.0 || wba > 0.0) {
        edges_.push_back({a, b, wab});
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
      }
    }
  }
}

InteractionGraph InteractionGraph::edge_uniform(std::size_t num_agents,
                                                std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::set<std::pair<std::size_t, std::size_t>> unique;
  for (auto [a, b] : edges) {
    if (a >= num_agents || b >= num_agents) {
      throw UsageError(fmt::format("edge ({}, {}) outside population of {}", a, b, num_agents));
    }
    if (a == b) throw UsageError(fmt::format("self-interaction excluded: edge ({}, {})", a, b));
    unique.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<double> w(num_agents * num_agents, 0.0);
  if (!unique.empty()) {
    const double each = 1.0 / (2.0 * static_cast<double>(unique.size()));
    for (auto [a, b] : unique) {
      w[a * num_agents + b] = each;
      w[b * num_agents + a] = each;
    }
  }
  return InteractionGraph(num_agents, std::move(w));
}

InteractionGraph InteractionGraph::well_mixed(std::size_t num_agents) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < num_agents; ++a) {
    for (std::size_t b = a + 1; b < num_agents; ++b) edges.emplace_back(a, b);
  }
  return edge_uniform(num_agents, edges);
}

double InteractionGraph::marginal(std::size_t a) const {
  double s = 0.0;
  for (std::size_t b = 0; b < n_; ++b) s += w_[a * n_ + b];
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> InteractionGraph::edge_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.emplace_back(e.a, e.b);
  return out;
}

// ---------------------------------------------------------------------------

Population::Population(Environment environment, std::size_t alphabet_size, std::vector<Code> codes,
                       std::vector<AgentId> parasites, InteractionGraph graph)
    : env_(std::move(environment)),
      alphabet_size_(alphabet_size),
      codes_(std::move(codes)),
      parasites_(std::move(parasites)),
      graph_(std::move(graph)) {
  std::sort(parasites_.begin(), parasites_.end());
  parasites_.erase(std::unique(parasites_.begin(), parasites_.end()), parasites_.end());
}

bool Population::is_parasite(AgentId id) const {
  return std::binary_search(parasites_.begin(), parasites_.end(), id);
}

std::vector<AgentId> Population::hosts() const {
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (!is_parasite({i})) out.push_back({i});
  }
  return out;
}

Population Population::with_codes(std::vector<Code> codes) const {
  return Population(env_, alphabet_size_, std::move(codes), parasites_, graph_);
}

Population Population::with_graph(InteractionGraph graph) const {
  return Population(env_, alphabet_size_, codes_, parasites_, std::move(graph));
}

Population Population::with_alphabet(std::size_t alphabet_size) const {
  std::vector<Code> codes;
  codes.reserve(codes_.size());
  for (const auto& c : codes_) codes.push_back(c.with_alphabet(alphabet_size));
  return Population(env_, alphabet_size, std::move(codes), parasites_, graph_);
}

// ---------------------------------------------------------------------------

std::string ValidationReport::to_string() const {
  if (ok()) return "ok\n";
  std::string out = fmt::format("{} violation(s)\n", violations.size());
  for (const auto& v : violations) {
    out += fmt::format("  [{}]", v.rule);
    if (v.agent) out += fmt::format(" agent={}", *v.agent);
    if (v.row) out += fmt::format(" row={}", *v.row);
    if (v.cell) out += fmt::format(" cell={}", *v.cell);
    out += " " + v.message + "\n";
  }
  return out;
}

ValidationReport validate(const Population& pop) {
  ValidationReport rep;
  auto add = [&](std::string rule, std::string msg, std::optional<std::size_t> agent = std::nullopt,
                 std::optional<std::size_t> row = std::nullopt, std::optional<std::size_t> cell = std::nullopt) {
    rep.violations.push_back({std::move(rule), std::move(msg), agent, row, cell});
  };

  const std::size_t n = pop.size();
  const std::size_t m = pop.num_states();
  const std::size_t s = pop.alphabet_size();

  if (n == 0) add("population.empty", "population has no agents");
  if (s == 0) add("population.alphabet", "alphabet size must be positive");

  for (std::size_t a = 0; a < n; ++a) {
    const Code& c = pop.codes()[a];
    if (c.num_states() != m) {
      add("code.states", fmt::format("code has {} states, environment has {}", c.num_states(), m), a);
      continue;
    }
    if (c.alphabet_size() != s) {
      add("code.alphabet", fmt::format("code alphabet {} differs from population alphabet {}", c.alphabet_size(), s),
          a);
      continue;
    }
    for (std::size_t r = 0; r < m; ++r) {
      double total = 0.0;
      for (std::size_t x = 0; x < s; ++x) {
        const double p = c.prob(r, x);
        if (!std::isfinite(p) || p < 0.0) {
          add("code.negative", fmt::format("probability {} must be finite and >= 0", p), a, r, x);
        } else {
          total += p;
        }
      }
      if (std::abs(total - 1.0) > kNormTolerance) {
        add("code.normalization", fmt::format("row sums to {:.12g}, expected 1", total), a, r);
      }
    }
  }

  for (const auto& p : pop.parasites()) {
    if (p.index >= n) add("parasite.range", fmt::format("parasite id {} outside population of {}", p.index, n));
  }

  const auto& g = pop.graph();
  if (g.size() != n) {
    add("graph.dimension", fmt::format("graph has {} agents, population has {}", g.size(), n));
    return rep;
  }
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double w = g.weight(a, b);
      if (!std::isfinite(w) || w < 0.0) {
        add("graph.negative", fmt::format("interaction probability {} must be finite and >= 0", w), a, b);
        continue;
      }
      total += w;
      if (a == b && w != 0.0) {
        add("graph.self_interaction", fmt::format("self-interaction excluded (weight {})", w), a, b);
      }
      if (b > a && std::abs(w - g.weight(b, a)) > 1e-15) {
        add("graph.symmetry",
            fmt::format("interactions are symmetrical: w({},{})={} but w({},{})={}", a, b, w, b, a, g.weight(b, a)), a,
            b);
      }
    }
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    add("graph.normalization", fmt::format("interaction probabilities sum to {:.12g}, expected 1", total));
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (g.marginal(a) <= 0.0) add("graph.isolated", "agent has no interactions", a);
  }
  return rep;
}

void require_valid(const Population& pop) {
  auto rep = validate(pop);
  if (rep.ok()) return;
  // Isolated agents are the one defect that only bites when a measure
  // conditions on them; report it under its own type.
  const bool only_isolated = std::all_of(rep.violations.begin(), rep.violations.end(),
                                         [](const Violation& v) { return v.rule == "graph.isolated"; });
  if (only_isolated) throw DegenerateConditioningError("invalid population: " + rep.to_string());
  throw ValidationError("invalid population: " + rep.to_string());
}

// ---------------------------------------------------------------------------

namespace {

// Adds w * p(mu) * c_a(x|mu) * c_b(x'|mu) over all mu into a dense S x S table.
void accumulate_pair(const Code& ca, const Code& cb, const Dist1& prior, double w, std::size_t s,
                     std::vector<double>& out) {
  for (std::size_t mu = 0; mu < prior.size(); ++mu) {
    const double base = w * prior[mu];
    if (base == 0.0) continue;
    for (const auto& xa : ca.support(mu)) {
      for (const auto& xb : cb.support(mu)) out[xa.symbol * s + xb.symbol] += base * xa.prob * xb.prob;
    }
  }
}

}  // namespace

Dist2 joint_messages(const Population& pop) {
  require_valid(pop);
  const std::size_t s = pop.alphabet_size();
  const auto& g = pop.graph();
  const auto& prior = pop.environment().prior();
  std::vector<double> p(s * s, 0.0);
  for (const auto& e : g.edges()) {
    accumulate_pair(pop.codes()[e.a], pop.codes()[e.b], prior, g.weight(e.a, e.b), s, p);
    accumulate_pair(pop.codes()[e.b], pop.codes()[e.a], prior, g.weight(e.b, e.a), s, p);
  }
  return Dist2(s, s, std::move(p));
}

Dist3 joint_messages_env(const Population& pop, std::optional<RoleCondition> condition) {
  require_valid(pop);
  const std::size_t m = pop.num_states();
  const std::size_t s = pop.alphabet_size();
  const auto& g = pop.graph();
  const auto& prior = pop.environment().prior();
  const auto& codes = pop.codes();
  std::vector<double> p(m * s * s, 0.0);

  auto add_ordered = [&](std::size_t sender, std::size_t receiver, double w) {
    for (std::size_t mu = 0; mu < m; ++mu) {
      const double base = w * prior[mu];
      if (base == 0.0) continue;
      for (const auto& xa : codes[sender].support(mu)) {
        for (const auto& xb : codes[receiver].support(mu)) {
          p[(mu * s + xa.symbol) * s + xb.symbol] += base * xa.prob * xb.prob;
        }
      }
    }
  };

  if (!condition) {
    for (const auto& e : g.edges()) {
      add_ordered(e.a, e.b, g.weight(e.a, e.b));
      add_ordered(e.b, e.a, g.weight(e.b, e.a));
    }
    return Dist3({m, s, s}, std::move(p));
  }

  const std::size_t who = condition->agent.index;
  if (who >= pop.size()) throw UsageError(fmt::format("agent {} outside population", who));
  double mass = 0.0;
  for (std::size_t other : g.neighbors(who)) {
    mass += condition->role == Role::Sender ? g.weight(who, other) : g.weight(other, who);
  }
  if (mass <= 0.0) {
    throw DegenerateConditioningError(fmt::format("agent {} has no interactions to condition on", who));
  }
  for (std::size_t other : g.neighbors(who)) {
    if (condition->role == Role::Sender) {
      add_ordered(who, other, g.weight(who, other) / mass);
    } else {
      add_ordered(other, who, g.weight(other, who) / mass);
    }
  }
  return Dist3({m, s, s}, std::move(p));
}

Dist3 joint_agent_messages(const Population& pop) {
  require_valid(pop);
  const std::size_t n = pop.size();
  const std::size_t s = pop.alphabet_size();
  const auto& g = pop.graph();
  const auto& prior = pop.environment().prior();
  std::vector<double> p(n * s * s, 0.0);
  std::vector<double> block(s * s);
  for (const auto& e : g.edges()) {
    for (auto [from, to] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      std::fill(block.begin(), block.end(), 0.0);
      accumulate_pair(pop.codes()[from], pop.codes()[to], prior, g.weight(from, to), s, block);
      for (std::size_t k = 0; k < s * s; ++k) p[from * s * s + k] += block[k];
    }
  }
  return Dist3({n, s, s}, std::move(p));
}

// ---------------------------------------------------------------------------

Code toy_code(ToyCode type) {
  // Symbol 0 is x1, symbol 1 is x2; states are listed 1..4.
  static constexpr std::uint32_t kPhi[4][4] = {
      {1, 1, 0, 0},  // phi1: {1,2} -> x2, {3,4} -> x1
      {0, 0, 1, 1},  // phi2
      {0, 1, 0, 1},  // phi3: {1,3} -> x1, {2,4} -> x2
      {1, 0, 1, 0},  // phi4
  };
  const auto& row = kPhi[static_cast<int>(type)];
  return Code::deterministic(std::span<const std::uint32_t>(row, 4), 2);
}

Code synonym_shift(const Code& code, std::int64_t offset) {
  const std::size_t s = code.alphabet_size();
  std::vector<double> table(code.num_states() * s, 0.0);
  for (std::size_t mu = 0; mu < code.num_states(); ++mu) {
    for (const auto& sm : code.support(mu)) {
      const std::int64_t target = static_cast<std::int64_t>(sm.symbol) + offset;
      if (target < 0 || target >= static_cast<std::int64_t>(s)) {
        throw UsageError(fmt::format("shift out of range: symbol {} + {} outside alphabet of size {}", sm.symbol,
                                     offset, s));
      }
      table[mu * s + static_cast<std::size_t>(target)] = sm.prob;
    }
  }
  return Code(code.num_states(), s, std::move(table));
}

}  // namespace parasim
