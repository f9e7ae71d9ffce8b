#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "parasim/errors.hpp"
#include "parasim/metrics.hpp"
#include "parasim/optimizer.hpp"
#include "parasim/scenarios.hpp"

using namespace parasim;

namespace {

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

const Code phi1 = toy_code(ToyCode::Phi1);
const Code phi2 = toy_code(ToyCode::Phi2);
const Code phi3 = toy_code(ToyCode::Phi3);
const Code phi4 = toy_code(ToyCode::Phi4);

Population hosts(std::vector<Code> codes, const Edges& edges) {
  const std::size_t n = codes.size();
  return Population(Environment::uniform(4), 2, std::move(codes), {}, InteractionGraph::edge_uniform(n, edges));
}

Population zero_template(std::size_t n, std::size_t m, std::size_t s) {
  const std::vector<std::uint32_t> zeros(m, 0);
  return Population(Environment::uniform(m), s, std::vector<Code>(n, Code::deterministic(zeros, s)), {},
                    InteractionGraph::well_mixed(n));
}

RunHistory flat_history(std::size_t length, double value) {
  RunHistory h;
  for (std::size_t g = 0; g < length; ++g) h.records.push_back({g, value, value, {}});
  return h;
}

}  // namespace

TEST_CASE("config validation") {
  GAConfig ok;
  CHECK_NOTHROW(ok.check());
  GAConfig c = ok;
  c.population_size = 1;
  CHECK_THROWS_AS(c.check(), UsageError);
  c = ok;
  c.crossover_rate = 1.5;
  CHECK_THROWS_AS(c.check(), UsageError);
  c = ok;
  c.mutation_rate = -0.1;
  CHECK_THROWS_AS(c.check(), UsageError);
  c = ok;
  c.elitism_count = c.population_size;
  CHECK_THROWS_AS(c.check(), UsageError);
}

TEST_CASE("layouts follow the goal") {
  const auto base = zero_template(4, 2, 2);
  const auto l = make_layout(base, Goal::Baseline);
  CHECK(l.coded_agents.size() == 4);
  CHECK(l.link_pairs.size() == 6);
  CHECK(l.genome_length() == 14);
  CHECK_THROWS_AS(make_layout(base, Goal::Attack), UsageError);

  const auto attacked = append_parasites(hosts({phi1, phi1, phi3, phi3}, {{0, 1}, {2, 3}}), 2, 2);
  const auto a = make_layout(attacked, Goal::Attack);
  CHECK(a.coded_agents == std::vector<std::size_t>{4, 5});
  CHECK(a.fixed_edges == Edges{{0, 1}, {2, 3}});
  CHECK(a.link_pairs.size() == 9);
  EvolveOptions apart;
  apart.parasite_links_between_parasites = false;
  CHECK(make_layout(attacked, Goal::Attack, apart).link_pairs.size() == 8);
  CHECK_THROWS_AS(make_layout(attacked, Goal::Baseline), UsageError);

  const auto r = make_layout(attacked, Goal::Response);
  CHECK(r.coded_agents.size() == 4);
  CHECK(r.link_pairs.empty());
  CHECK(r.fixed_edges.size() == attacked.graph().edges().size());
}

TEST_CASE("encode and decode are inverse") {
  const auto base = two_subpopulation_scenario(phi2);
  const auto l = make_layout(base, Goal::Attack);
  const Genome g = encode(base, l);
  CHECK(decode(g, l, base) == base);
  const auto r = make_layout(base, Goal::Response);
  CHECK(decode(encode(base, r), r, base) == base);
}

TEST_CASE("mutation") {
  const auto base = zero_template(4, 4, 2);
  const auto l = make_layout(base, Goal::Baseline);
  Rng rng(1);
  const Genome g = random_genome(l, 0.5, rng);
  CHECK(mutate(g, l, 0.0, rng) == g);

  std::size_t ones = 0, total = 0;
  for (int t = 0; t < 200; ++t) {
    const Genome m = mutate(g, l, 1.0, rng);
    for (auto s : m.symbols) {
      CHECK(s < 2);
      ones += s;
      ++total;
    }
  }
  CHECK(static_cast<double>(ones) / static_cast<double>(total) == doctest::Approx(0.5).epsilon(0.05));

  Rng a(9), b(9);
  CHECK(mutate(g, l, 0.3, a) == mutate(g, l, 0.3, b));
}

TEST_CASE("crossover") {
  const auto base = zero_template(5, 3, 4);
  const auto l = make_layout(base, Goal::Baseline);
  Rng rng(2);
  const Genome x = random_genome(l, 0.5, rng), y = random_genome(l, 0.5, rng);
  auto same = crossover(x, x, rng);
  CHECK(same.first == x);
  CHECK(same.second == x);

  Rng a(4), b(4);
  const auto c1 = crossover(x, y, a), c2 = crossover(x, y, b);
  CHECK(c1 == c2);
  for (std::size_t i = 0; i < x.symbols.size(); ++i) {
    const bool straight = c1.first.symbols[i] == x.symbols[i] && c1.second.symbols[i] == y.symbols[i];
    const bool swapped = c1.first.symbols[i] == y.symbols[i] && c1.second.symbols[i] == x.symbols[i];
    CHECK((straight || swapped));
  }
  Genome shorter = y;
  shorter.links.pop_back();
  CHECK_THROWS_AS(crossover(x, shorter, rng), UsageError);
}

TEST_CASE("repair") {
  const auto base = zero_template(4, 2, 2);
  const auto l = make_layout(base, Goal::Baseline);
  Rng rng(3);

  Genome ok = random_genome(l, 1.0, rng);
  CHECK(repair(ok, l, rng) == ok);

  // Only (0,1) and (1,2) present: agent 3 is isolated.
  Genome g = ok;
  std::fill(g.links.begin(), g.links.end(), 0);
  for (std::size_t k = 0; k < l.link_pairs.size(); ++k) {
    if (l.link_pairs[k] == std::pair<std::size_t, std::size_t>{0, 1} ||
        l.link_pairs[k] == std::pair<std::size_t, std::size_t>{1, 2}) {
      g.links[k] = 1;
    }
  }
  const Genome fixed = repair(g, l, rng);
  const auto before = std::count(g.links.begin(), g.links.end(), 1);
  CHECK(std::count(fixed.links.begin(), fixed.links.end(), 1) == before + 1);
  CHECK(validate(decode(fixed, l, base)).ok());

  const auto pair = zero_template(2, 2, 2);
  const auto pl = make_layout(pair, Goal::Baseline);
  Genome empty = random_genome(pl, 0.0, rng);
  CHECK(repair(empty, pl, rng).links == std::vector<std::uint8_t>{1});
}

TEST_CASE("convergence") {
  GAConfig cfg;
  cfg.stall_generations = 5;
  cfg.max_generations = 100;
  CHECK(converged(flat_history(6, 1.0), cfg));

  RunHistory rising;
  for (std::size_t g = 0; g < 20; ++g) rising.records.push_back({g, double(g), 0.0, {}});
  CHECK_FALSE(converged(rising, cfg));

  RunHistory at_max;
  for (std::size_t g = 0; g < 100; ++g) at_max.records.push_back({g, double(g), 0.0, {}});
  CHECK(converged(at_max, cfg));
}

TEST_CASE("baseline on 4 agents reaches the exhaustive optimum") {
  // Exhaustive: every code assignment over 2 states and 2 symbols and every
  // graph without isolated agents.
  const auto base = zero_template(4, 2, 2);
  const auto l = make_layout(base, Goal::Baseline);
  const FitnessEvaluator eval(base, l);
  double best = 0.0;
  Genome g{Goal::Baseline, std::vector<std::uint16_t>(l.symbol_genes()), std::vector<std::uint8_t>(l.link_pairs.size())};
  for (unsigned codes = 0; codes < (1u << l.symbol_genes()); ++codes) {
    for (std::size_t i = 0; i < l.symbol_genes(); ++i) g.symbols[i] = (codes >> i) & 1u;
    for (unsigned links = 1; links < (1u << l.link_pairs.size()); ++links) {
      for (std::size_t k = 0; k < l.link_pairs.size(); ++k) g.links[k] = (links >> k) & 1u;
      if (!validate(decode(g, l, base)).ok()) continue;
      best = std::max(best, eval(g));
    }
  }
  CHECK(best == doctest::Approx(1.0));

  const EvolveResult r = evolve_with_restarts(base, Goal::Baseline, GAConfig{}, 5);
  CHECK(r.fitness == doctest::Approx(best).epsilon(1e-12));
  CHECK(mutual_understanding(r.best) == doctest::Approx(r.fitness).epsilon(1e-12));
  // One shared code or two types split across every edge both reach the optimum.
  for (const auto& c : analyze_structure(r.best).components) CHECK((c.type_ids.size() == 1 || c.bipartite_by_type));
}

TEST_CASE("attack on a phi1 pair uses phi2 on one edge") {
  const auto base = append_parasites(hosts({phi1, phi1}, {{0, 1}}), 1, 2);
  const EvolveResult r = evolve_with_restarts(base, Goal::Attack, GAConfig{}, 5);
  CHECK(r.fitness == 0.0);
  CHECK(r.best.code({2}) == phi2);
  CHECK(r.best.graph().degree(2) == 1);
}

TEST_CASE("zero-understanding attacks on two subpopulations") {
  const auto hosts4 = hosts({phi1, phi1, phi3, phi3}, {{0, 1}, {2, 3}});
  // Exhaustive over the 16 parasite codes and 15 nonempty link sets.
  std::vector<std::pair<unsigned, unsigned>> zero;
  for (unsigned c = 0; c < 16; ++c) {
    std::vector<std::uint32_t> sym(4);
    for (unsigned m = 0; m < 4; ++m) sym[m] = (c >> m) & 1u;
    for (unsigned e = 1; e < 16; ++e) {
      Edges edges = {{0, 1}, {2, 3}};
      for (std::size_t k = 0; k < 4; ++k) {
        if ((e >> k) & 1u) edges.emplace_back(k, 4);
      }
      std::vector<Code> codes = hosts4.codes();
      codes.push_back(Code::deterministic(sym, 2));
      const Population pop(Environment::uniform(4), 2, codes, {AgentId{4}}, InteractionGraph::edge_uniform(5, edges));
      if (mutual_understanding(pop) < 1e-12) zero.emplace_back(c, e);
    }
  }
  // phi2 needs both phi1 agents, phi4 both phi3 agents; either may add one
  // agent of the other pair or link to all four.
  const std::vector<std::pair<unsigned, unsigned>> expected = {{5, 0xc}, {5, 0xd}, {5, 0xe}, {5, 0xf},
                                                               {12, 0x3}, {12, 0x7}, {12, 0xb}, {12, 0xf}};
  CHECK(zero == expected);

  const auto base = append_parasites(hosts4, 1, 2);
  const EvolveResult r = evolve_with_restarts(base, Goal::Attack, GAConfig{}, 5);
  CHECK(r.fitness == 0.0);
  CHECK((r.best.code({4}) == phi2 || r.best.code({4}) == phi4));
}

TEST_CASE("two parasites can silence the two-subpopulation toy") {
  const auto base = append_parasites(hosts({phi1, phi1, phi3, phi3}, {{0, 1}, {2, 3}}), 2, 2);
  const EvolveResult r = evolve_with_restarts(base, Goal::Attack, GAConfig{}, 5);
  CHECK(r.fitness == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("response restores understanding around a phi2 parasite") {
  const auto attacked = Population(Environment::uniform(4), 4,
                                   {phi1.with_alphabet(4), phi1.with_alphabet(4), phi2.with_alphabet(4)}, {AgentId{2}},
                                   InteractionGraph::edge_uniform(3, Edges{{0, 1}, {1, 2}}));
  CHECK(mutual_understanding(attacked) == 0.0);
  const EvolveResult r = evolve_with_restarts(attacked, Goal::Response, GAConfig{}, 5);
  CHECK(r.fitness >= 1.0);
  CHECK(r.best.graph() == attacked.graph());
  CHECK(r.best.code({2}) == attacked.code({2}));
}

TEST_CASE("runs are deterministic across worker counts and monotone") {
  const auto base = zero_template(12, 4, 4);
  GAConfig cfg;
  cfg.population_size = 30;
  cfg.max_generations = 40;
  cfg.local_search_sweeps = 3;
  EvolveOptions one, many;
  many.jobs = 3;
  const EvolveResult a = evolve(base, Goal::Baseline, cfg, one);
  const EvolveResult b = evolve(base, Goal::Baseline, cfg, many);
  CHECK(a.genome == b.genome);
  REQUIRE(a.history.records.size() == b.history.records.size());
  for (std::size_t g = 0; g < a.history.records.size(); ++g) {
    CHECK(a.history.records[g].best_fitness == b.history.records[g].best_fitness);
    CHECK(a.history.records[g].mean_fitness == b.history.records[g].mean_fitness);
    if (g > 0) CHECK(a.history.records[g].best_fitness >= a.history.records[g - 1].best_fitness);
  }
  CHECK(validate(a.best).ok());

  const auto attacked = append_parasites(a.best, 2, 8);
  const EvolveResult p = evolve(attacked, Goal::Attack, cfg, one);
  for (std::size_t g = 1; g < p.history.records.size(); ++g) {
    CHECK(p.history.records[g].best_fitness <= p.history.records[g - 1].best_fitness);
  }
}

TEST_CASE("decoded random genomes validate after repair") {
  const auto base = append_parasites(zero_template(6, 3, 3), 2, 5);
  const auto l = make_layout(base, Goal::Attack);
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const Genome g = repair(random_genome(l, rng.uniform01() * 0.3, rng), l, rng);
    CHECK(validate(decode(g, l, base)).ok());
  }
}

TEST_CASE("the evaluator equals the exact measure") {
  const auto base = append_parasites(zero_template(6, 3, 3), 2, 5);
  const auto l = make_layout(base, Goal::Attack);
  const FitnessEvaluator eval(base, l);
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const Genome g = repair(random_genome(l, 0.4, rng), l, rng);
    CHECK(eval(g) == doctest::Approx(mutual_understanding(decode(g, l, base))).epsilon(1e-12));
  }
}
