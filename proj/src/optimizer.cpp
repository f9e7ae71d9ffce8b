#include "parasim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "parasim/errors.hpp"
#include "parasim/message_counts.hpp"
#include "parasim/metrics.hpp"

namespace parasim {

std::string to_string(Goal g) {
  switch (g) {
    case Goal::Baseline: return "baseline";
    case Goal::Attack: return "attack";
    case Goal::Response: return "response";
  }
  return "unknown";
}

void GAConfig::check() const {
  if (population_size < 2) throw UsageError("population_size must be at least 2");
  if (max_generations < 1) throw UsageError("max_generations must be at least 1");
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
    throw UsageError("mutation_rate must lie in [0, 1]");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw UsageError("crossover_rate must lie in [0, 1]");
  if (tournament_size < 1) throw UsageError("tournament_size must be at least 1");
  if (elitism_count >= population_size) throw UsageError("elitism_count must be below population_size");
  if (stall_generations < 1) throw UsageError("stall_generations must be at least 1");
  if (!(init_link_probability >= 0.0 && init_link_probability <= 1.0)) {
    throw UsageError("init_link_probability must lie in [0, 1]");
  }
}

namespace {

// +1 when larger fitness is better.
double direction(Goal g) { return g == Goal::Attack ? -1.0 : 1.0; }

bool better(Goal g, double a, double b) { return direction(g) * (a - b) > 0.0; }

std::vector<std::uint32_t> deterministic_symbols(const Code& c, std::size_t agent) {
  if (!c.is_deterministic()) {
    throw UsageError(fmt::format("agent {} has a non-deterministic code; the optimizer needs one symbol per state", agent));
  }
  return {c.symbols().begin(), c.symbols().end()};
}

}  // namespace

// ---------------------------------------------------------------------------
// Layout, encode, decode

GenomeLayout make_layout(const Population& base, Goal goal, const EvolveOptions& opts) {
  const std::size_t n = base.size();
  GenomeLayout l;
  l.goal = goal;
  l.num_agents = n;
  l.num_states = base.num_states();
  l.symbol_bound = opts.symbol_bound == 0 ? base.alphabet_size() : opts.symbol_bound;
  if (l.symbol_bound > base.alphabet_size()) {
    throw UsageError(fmt::format("symbol bound {} exceeds alphabet {}", l.symbol_bound, base.alphabet_size()));
  }
  if (l.symbol_bound > 65536) throw UsageError("symbol bound above 65536");

  const bool has_parasites = !base.parasites().empty();
  if (goal == Goal::Baseline && has_parasites) throw UsageError("baseline optimization expects no parasites");
  if (goal != Goal::Baseline && !has_parasites) {
    throw UsageError(fmt::format("{} optimization needs at least one parasite", to_string(goal)));
  }

  std::vector<char> parasite(n, 0);
  for (const auto& p : base.parasites()) parasite[p.index] = 1;

  for (std::size_t a = 0; a < n; ++a) {
    const bool coded = goal == Goal::Baseline || (goal == Goal::Attack) == static_cast<bool>(parasite[a]);
    if (coded) l.coded_agents.push_back(a);
  }

  const auto base_edges = base.graph().edge_pairs();
  switch (goal) {
    case Goal::Baseline:
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) l.link_pairs.emplace_back(a, b);
      }
      break;
    case Goal::Attack:
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          if (!parasite[a] && !parasite[b]) continue;
          if (parasite[a] && parasite[b] && !opts.parasite_links_between_parasites) continue;
          l.link_pairs.emplace_back(a, b);
        }
      }
      for (const auto& e : base_edges) {
        if (!parasite[e.first] && !parasite[e.second]) l.fixed_edges.push_back(e);
      }
      break;
    case Goal::Response:
      if (opts.free_structure) {
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) l.link_pairs.emplace_back(a, b);
        }
      } else {
        l.fixed_edges = base_edges;
      }
      break;
  }

  l.agent_links.resize(n);
  for (std::size_t k = 0; k < l.link_pairs.size(); ++k) {
    l.agent_links[l.link_pairs[k].first].push_back(k);
    l.agent_links[l.link_pairs[k].second].push_back(k);
  }
  return l;
}

namespace {

void check_shape(const Genome& g, const GenomeLayout& l) {
  if (g.symbols.size() != l.symbol_genes() || g.links.size() != l.link_pairs.size()) {
    throw UsageError("genome does not match layout");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> decoded_edges(const Genome& g, const GenomeLayout& l) {
  auto edges = l.fixed_edges;
  for (std::size_t k = 0; k < g.links.size(); ++k) {
    if (g.links[k]) edges.push_back(l.link_pairs[k]);
  }
  return edges;
}

std::vector<std::size_t> degrees(const Genome& g, const GenomeLayout& l) {
  std::vector<std::size_t> deg(l.num_agents, 0);
  for (const auto& [a, b] : l.fixed_edges) {
    ++deg[a];
    ++deg[b];
  }
  for (std::size_t k = 0; k < g.links.size(); ++k) {
    if (!g.links[k]) continue;
    ++deg[l.link_pairs[k].first];
    ++deg[l.link_pairs[k].second];
  }
  return deg;
}

}  // namespace

Population decode(const Genome& g, const GenomeLayout& l, const Population& base) {
  check_shape(g, l);
  std::vector<Code> codes = base.codes();
  std::vector<std::uint32_t> syms(l.num_states);
  for (std::size_t k = 0; k < l.coded_agents.size(); ++k) {
    for (std::size_t mu = 0; mu < l.num_states; ++mu) syms[mu] = g.symbols[k * l.num_states + mu];
    codes[l.coded_agents[k]] = Code::deterministic(syms, base.alphabet_size());
  }
  const auto edges = decoded_edges(g, l);
  return Population(base.environment(), base.alphabet_size(), std::move(codes), base.parasites(),
                    InteractionGraph::edge_uniform(l.num_agents, edges));
}

Genome encode(const Population& pop, const GenomeLayout& l) {
  Genome g;
  g.goal = l.goal;
  g.symbols.reserve(l.symbol_genes());
  for (std::size_t a : l.coded_agents) {
    for (std::uint32_t s : deterministic_symbols(pop.codes()[a], a)) {
      if (s >= l.symbol_bound) throw UsageError(fmt::format("agent {} uses symbol {} outside the bound", a, s));
      g.symbols.push_back(static_cast<std::uint16_t>(s));
    }
  }
  g.links.resize(l.link_pairs.size());
  for (std::size_t k = 0; k < l.link_pairs.size(); ++k) {
    g.links[k] = pop.graph().weight(l.link_pairs[k].first, l.link_pairs[k].second) > 0.0;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Operators

Genome random_genome(const GenomeLayout& l, double link_probability, Rng& rng) {
  Genome g;
  g.goal = l.goal;
  g.symbols.resize(l.symbol_genes());
  for (auto& s : g.symbols) s = static_cast<std::uint16_t>(rng.uniform_index(l.symbol_bound));
  g.links.resize(l.link_pairs.size());
  for (auto& b : g.links) b = rng.bernoulli(link_probability);
  return g;
}

Genome mutate(const Genome& g, const GenomeLayout& l, double rate, Rng& rng) {
  check_shape(g, l);
  Genome out = g;
  for (auto& s : out.symbols) {
    if (rng.bernoulli(rate)) s = static_cast<std::uint16_t>(rng.uniform_index(l.symbol_bound));
  }
  for (auto& b : out.links) {
    if (rng.bernoulli(rate)) b = static_cast<std::uint8_t>(rng.uniform_index(2));
  }
  return out;
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng) {
  if (a.symbols.size() != b.symbols.size() || a.links.size() != b.links.size() || a.goal != b.goal) {
    throw UsageError("crossover: genomes differ in shape");
  }
  Genome x = a;
  Genome y = b;
  auto swap_genes = [&rng](auto& u, auto& v) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (i % 64 == 0) mask = rng.next();
      if ((mask >> (i % 64)) & 1U) std::swap(u[i], v[i]);
    }
  };
  swap_genes(x.symbols, y.symbols);
  swap_genes(x.links, y.links);
  return {std::move(x), std::move(y)};
}

Genome repair(const Genome& g, const GenomeLayout& l, Rng& rng) {
  check_shape(g, l);
  Genome out = g;
  auto deg = degrees(out, l);
  for (std::size_t a = 0; a < l.num_agents; ++a) {
    if (deg[a] > 0 || l.agent_links[a].empty()) continue;
    const std::size_t k = l.agent_links[a][rng.uniform_index(l.agent_links[a].size())];
    out.links[k] = 1;
    ++deg[l.link_pairs[k].first];
    ++deg[l.link_pairs[k].second];
  }
  return out;
}

bool converged(const RunHistory& h, const GAConfig& cfg) {
  const auto& r = h.records;
  if (r.size() >= cfg.max_generations) return true;
  if (r.size() <= cfg.stall_generations) return false;
  return std::abs(r.back().best_fitness - r[r.size() - 1 - cfg.stall_generations].best_fitness) <= 1e-9;
}

// ---------------------------------------------------------------------------
// Fitness

FitnessEvaluator::FitnessEvaluator(const Population& base, const GenomeLayout& layout)
    : layout_(layout), alphabet_(base.alphabet_size()) {
  const std::size_t m = base.num_states();
  const auto& prior = base.environment().prior();
  for (std::size_t mu = 0; mu < m; ++mu) state_weights_.push_back(static_cast<double>(m) * prior[mu]);

  slot_of_agent_.assign(layout_.num_agents, -1);
  for (std::size_t k = 0; k < layout_.coded_agents.size(); ++k) {
    slot_of_agent_[layout_.coded_agents[k]] = static_cast<std::ptrdiff_t>(k);
  }
  base_symbols_.resize(layout_.num_agents);
  for (std::size_t a = 0; a < layout_.num_agents; ++a) {
    if (slot_of_agent_[a] < 0) base_symbols_[a] = deterministic_symbols(base.codes()[a], a);
  }

  static_cells_.assign(alphabet_ * alphabet_, 0.0);
  for (const auto& [a, b] : layout_.fixed_edges) {
    if (slot_of_agent_[a] >= 0 || slot_of_agent_[b] >= 0) {
      dynamic_fixed_edges_.emplace_back(a, b);
      continue;
    }
    for (std::size_t mu = 0; mu < m; ++mu) {
      static_cells_[base_symbols_[a][mu] * alphabet_ + base_symbols_[b][mu]] += state_weights_[mu];
      static_cells_[base_symbols_[b][mu] * alphabet_ + base_symbols_[a][mu]] += state_weights_[mu];
    }
  }
}

std::vector<std::vector<std::uint32_t>> FitnessEvaluator::symbols_of(const Genome& g) const {
  auto syms = base_symbols_;
  const std::size_t m = layout_.num_states;
  for (std::size_t k = 0; k < layout_.coded_agents.size(); ++k) {
    syms[layout_.coded_agents[k]].assign(g.symbols.begin() + static_cast<std::ptrdiff_t>(k * m),
                                          g.symbols.begin() + static_cast<std::ptrdiff_t>((k + 1) * m));
  }
  return syms;
}

double FitnessEvaluator::operator()(const Genome& g) const {
  check_shape(g, layout_);
  const std::size_t m = layout_.num_states;
  const std::size_t s = alphabet_;
  std::vector<double> cells = static_cells_;

  auto sym = [&](std::size_t agent, std::size_t mu) -> std::uint32_t {
    const std::ptrdiff_t slot = slot_of_agent_[agent];
    return slot < 0 ? base_symbols_[agent][mu] : g.symbols[static_cast<std::size_t>(slot) * m + mu];
  };
  auto add = [&](std::size_t a, std::size_t b) {
    for (std::size_t mu = 0; mu < m; ++mu) {
      const std::uint32_t x = sym(a, mu);
      const std::uint32_t y = sym(b, mu);
      cells[x * s + y] += state_weights_[mu];
      cells[y * s + x] += state_weights_[mu];
    }
  };
  for (const auto& [a, b] : dynamic_fixed_edges_) add(a, b);
  for (std::size_t k = 0; k < g.links.size(); ++k) {
    if (g.links[k]) add(layout_.link_pairs[k].first, layout_.link_pairs[k].second);
  }
  return MessageCounts::mutual_information(cells, s);
}

// ---------------------------------------------------------------------------
// Local search

std::size_t improve(Genome& g, const GenomeLayout& layout, const FitnessEvaluator& eval, std::size_t max_sweeps,
                    LinkMoves links, double min_link_gain) {
  check_shape(g, layout);
  const std::size_t m = layout.num_states;
  const double dir = direction(layout.goal);
  constexpr double kMinGain = 1e-10;

  auto syms = eval.symbols_of(g);
  std::vector<std::vector<std::size_t>> adj(layout.num_agents);
  for (const auto& [a, b] : layout.fixed_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (std::size_t k = 0; k < g.links.size(); ++k) {
    if (!g.links[k]) continue;
    adj[layout.link_pairs[k].first].push_back(layout.link_pairs[k].second);
    adj[layout.link_pairs[k].second].push_back(layout.link_pairs[k].first);
  }

  MessageCounts counts(eval.alphabet_, eval.state_weights_);
  for (std::size_t a = 0; a < layout.num_agents; ++a) {
    for (std::size_t b : adj[a]) {
      if (a < b) counts.add_edge(syms[a], syms[b]);
    }
  }
  counts.resync();

  auto erase_neighbor = [&adj](std::size_t a, std::size_t b) {
    auto& v = adj[a];
    v.erase(std::find(v.begin(), v.end(), b));
  };

  std::vector<std::uint32_t> ns;
  std::size_t sweeps = 0;
  while (sweeps < max_sweeps) {
    ++sweeps;
    bool changed = false;

    for (std::size_t k = 0; k < layout.coded_agents.size(); ++k) {
      const std::size_t a = layout.coded_agents[k];
      if (adj[a].empty()) continue;
      for (std::size_t mu = 0; mu < m; ++mu) {
        ns.clear();
        for (std::size_t b : adj[a]) ns.push_back(syms[b][mu]);
        const std::uint32_t cur = syms[a][mu];
        const double here = counts.tracked_mutual_information();
        double best_gain = kMinGain;
        std::uint32_t best = cur;
        for (std::uint32_t y = 0; y < layout.symbol_bound; ++y) {
          if (y == cur) continue;
          counts.change_symbol(mu, cur, y, ns);
          const double gain = dir * (counts.tracked_mutual_information() - here);
          counts.change_symbol(mu, y, cur, ns);
          if (gain > best_gain) {
            best_gain = gain;
            best = y;
          }
        }
        if (best != cur) {
          counts.change_symbol(mu, cur, best, ns);
          syms[a][mu] = best;
          g.symbols[k * m + mu] = static_cast<std::uint16_t>(best);
          changed = true;
        }
      }
    }

    for (std::size_t k = 0; links != LinkMoves::None && k < g.links.size(); ++k) {
      const auto [a, b] = layout.link_pairs[k];
      const bool on = g.links[k] != 0;
      if (!on && links == LinkMoves::RemoveOnly) continue;
      // Never leave an agent without interactions.
      if (on && (adj[a].size() < 2 || adj[b].size() < 2)) continue;
      const double sign = on ? -1.0 : 1.0;
      const double here = counts.tracked_mutual_information();
      counts.add_edge(syms[a], syms[b], sign);
      const double gain = dir * (counts.tracked_mutual_information() - here);
      if (gain > min_link_gain) {
        g.links[k] = on ? 0 : 1;
        if (on) {
          erase_neighbor(a, b);
          erase_neighbor(b, a);
        } else {
          adj[a].push_back(b);
          adj[b].push_back(a);
        }
        changed = true;
      } else {
        counts.add_edge(syms[a], syms[b], -sign);
      }
    }

    counts.resync();
    if (!changed) break;
  }
  return sweeps;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

std::vector<std::string> diagnostic_names(Goal goal) {
  switch (goal) {
    case Goal::Baseline: return {"mutual_understanding", "edges"};
    case Goal::Attack:
      return {"mutual_understanding", "blend_kl", "missing_info", "parasite_sensor_info", "parasite_env_info"};
    case Goal::Response: return {"mutual_understanding", "blend_kl", "parasite_symbol_mass"};
  }
  return {};
}

std::vector<double> diagnostics(const Population& pop, Goal goal) {
  const double mu = mutual_understanding(pop);
  if (goal == Goal::Baseline) return {mu, static_cast<double>(pop.graph().edges().size())};

  double kl = 0.0;
  double missing = 0.0;
  double sensor = 0.0;
  double env = 0.0;
  const auto& ps = pop.parasites();
  for (const auto& p : ps) {
    kl += blend_kl(pop, p);
    if (goal == Goal::Attack) {
      missing += missing_info(pop, p);
      sensor += sensor_info(pop, p);
      env += env_info(pop, p);
    }
  }
  const auto np = static_cast<double>(ps.size());
  if (goal == Goal::Attack) return {mu, kl / np, missing / np, sensor / np, env / np};
  return {mu, kl / np, parasite_symbol_mass(pop)};
}

template <typename F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  jobs = std::min(jobs, count);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += jobs) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

std::size_t tournament(const std::vector<double>& fitness, Goal goal, std::size_t size, Rng& rng) {
  std::size_t best = rng.uniform_index(fitness.size());
  for (std::size_t i = 1; i < size; ++i) {
    const std::size_t c = rng.uniform_index(fitness.size());
    if (better(goal, fitness[c], fitness[best])) best = c;
  }
  return best;
}

}  // namespace

EvolveResult evolve(const Population& base, Goal goal, const GAConfig& cfg, const EvolveOptions& opts) {
  cfg.check();
  require_valid(base);
  const GenomeLayout layout = make_layout(base, goal, opts);
  const FitnessEvaluator eval(base, layout);
  const std::size_t len = layout.genome_length();
  if (len == 0) throw UsageError("nothing to optimize: empty genome");
  const double rate = cfg.mutation_rate.value_or(1.0 / static_cast<double>(len));
  const std::size_t jobs = opts.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : opts.jobs;
  const std::size_t np = cfg.population_size;

  std::vector<Genome> pop(np);
  {
    Genome seed_genome;
    if (goal == Goal::Response) seed_genome = encode(base, layout);
    for (std::size_t i = 0; i < np; ++i) {
      Rng rng = Rng::stream(cfg.seed, 0, i);
      if (goal == Goal::Response) {
        pop[i] = i == 0 ? seed_genome : mutate(seed_genome, layout, std::max(rate, 1.0 / static_cast<double>(len)), rng);
      } else {
        pop[i] = random_genome(layout, cfg.init_link_probability, rng);
      }
      pop[i] = repair(pop[i], layout, rng);
    }
  }
  std::vector<double> fit(np);
  parallel_for(np, jobs, [&](std::size_t i) { fit[i] = eval(pop[i]); });

  EvolveResult result{decode(pop[0], layout, base), pop[0], fit[0], {}};
  result.history.diagnostic_names = diagnostic_names(goal);
  Genome diag_genome;
  std::vector<double> diag;

  std::vector<std::size_t> order(np);
  for (std::size_t gen = 0;; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return better(goal, fit[a], fit[b]); });
    const std::size_t best = order.front();
    if (gen == 0 || better(goal, fit[best], result.fitness)) {
      result.genome = pop[best];
      result.fitness = fit[best];
    }
    if (!(diag_genome == result.genome) || diag.empty()) {
      diag_genome = result.genome;
      diag = diagnostics(decode(diag_genome, layout, base), goal);
    }
    GenerationRecord rec;
    rec.generation = gen;
    rec.best_fitness = result.fitness;
    rec.mean_fitness = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(np);
    rec.diagnostics = diag;
    result.history.records.push_back(rec);
    if (opts.progress) opts.progress(rec);
    if (converged(result.history, cfg)) break;

    // The improved leader enters the next generation as its first elite.
    if (cfg.local_search_sweeps > 0) {
      improve(pop[best], layout, eval, cfg.local_search_sweeps, cfg.local_search_links,
              cfg.local_search_link_gain);
      fit[best] = eval(pop[best]);
    }
    std::vector<Genome> next(np);
    for (std::size_t e = 0; e < cfg.elitism_count; ++e) next[e] = pop[order[e]];
    const std::size_t pairs = (np - cfg.elitism_count + 1) / 2;
    parallel_for(pairs, jobs, [&](std::size_t p) {
      Rng rng = Rng::stream(cfg.seed, gen + 1, p);
      const Genome& pa = pop[tournament(fit, goal, cfg.tournament_size, rng)];
      const Genome& pb = pop[tournament(fit, goal, cfg.tournament_size, rng)];
      std::pair<Genome, Genome> kids =
          rng.bernoulli(cfg.crossover_rate) ? crossover(pa, pb, rng) : std::pair<Genome, Genome>{pa, pb};
      const std::size_t i = cfg.elitism_count + 2 * p;
      next[i] = repair(mutate(kids.first, layout, rate, rng), layout, rng);
      if (i + 1 < np) next[i + 1] = repair(mutate(kids.second, layout, rate, rng), layout, rng);
    });
    pop = std::move(next);
    const std::vector<double> old_fit = fit;
    for (std::size_t e = 0; e < cfg.elitism_count; ++e) fit[e] = old_fit[order[e]];
    parallel_for(np - cfg.elitism_count, jobs,
                 [&](std::size_t i) { fit[cfg.elitism_count + i] = eval(pop[cfg.elitism_count + i]); });
  }

  result.best = decode(result.genome, layout, base);
  return result;
}

EvolveResult evolve_with_restarts(const Population& base, Goal goal, const GAConfig& cfg, std::size_t restarts,
                                  const EvolveOptions& opts) {
  if (restarts == 0) throw UsageError("restarts must be at least 1");
  std::optional<EvolveResult> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    GAConfig c = cfg;
    if (r > 0) c.seed = splitmix64(cfg.seed + r);
    EvolveResult res = evolve(base, goal, c, opts);
    if (!best || better(goal, res.fitness, best->fitness)) best = std::move(res);
  }
  return std::move(*best);
}

}  // namespace parasim
