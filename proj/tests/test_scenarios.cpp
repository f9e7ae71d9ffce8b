#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "parasim/errors.hpp"
#include "parasim/scenarios.hpp"
#include "parasim/snapshot.hpp"

using namespace parasim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "parasim_scenarios_test" / name;
  fs::remove_all(p);
  return p;
}

ScenarioConfig small(ScenarioKind kind, const fs::path& out) {
  ScenarioConfig c;
  c.kind = kind;
  c.agents = 8;
  c.states = 4;
  c.host_symbols = 4;
  c.parasite_symbols = 8;
  c.synonym_agents = 8;
  c.type_counts = {1, 2};
  c.seed = 3;
  c.output = out;
  c.ga.population_size = 12;
  c.ga.max_generations = 12;
  c.ga.stall_generations = 6;
  c.ga.init_link_probability = 0.3;
  c.ga.local_search_sweeps = 2;
  c.ga.seed = c.seed;
  return c;
}

bool same_files(const fs::path& a, const fs::path& b, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (read_text(a / n) != read_text(b / n)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse_scenario_config(R"(# comment
[scenario]
kind = attack
agents = 32
parasites = 2
type_counts = 1, 2, 8
output = somewhere

[ga]
population_size = 30
mutation_rate = 0.01
local_search_links = none
)");
  CHECK(c.kind == ScenarioKind::Attack);
  CHECK(c.agents == 32);
  CHECK(c.parasites == 2);
  CHECK(c.type_counts == std::vector<std::size_t>{1, 2, 8});
  CHECK(c.output == fs::path("somewhere"));
  CHECK(c.ga.population_size == 30);
  CHECK(c.ga.mutation_rate == 0.01);
  CHECK(c.ga.local_search_links == LinkMoves::None);

  CHECK(c.to_json()["kind"] == "attack");
  CHECK(!c.to_json().contains("output"));
  CHECK(parse_scenario_config("[scenario]\n").to_json()["ga"]["mutation_rate"] == "auto");

  CHECK_THROWS_AS(parse_scenario_config("[scenario]\nagnets = 3\n"), UsageError);
  CHECK_THROWS_AS(parse_scenario_config("[gaa]\nseed = 3\n"), UsageError);
  CHECK_THROWS_AS(parse_scenario_config("[scenario]\nkind = bogus\n"), UsageError);
  CHECK_THROWS_AS(parse_scenario_config("[scenario]\nagents = -4\n"), UsageError);
  CHECK_THROWS_AS(parse_scenario_config("[ga]\ncrossover_rate = 2\n"), UsageError);
  CHECK_THROWS_AS(load_scenario_config("/nonexistent/x.cfg"), UsageError);

  for (const char* name : {"baseline", "attack", "multi", "respond", "synonyms", "toy"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_scenario_config(fs::path(PARASIM_SOURCE_DIR) / "configs" / (std::string(name) + ".cfg")));
  }
}

TEST_CASE("shift probe leaves parasite-free populations unchanged") {
  const Code phi1 = toy_code(ToyCode::Phi1);
  const std::vector<std::pair<std::size_t, std::size_t>> edges = {{0, 1}, {1, 2}};
  const Population pop(Environment::uniform(4), 2, {phi1, phi1, phi1}, {}, InteractionGraph::edge_uniform(3, edges));
  const ShiftProbe p = apply_shift_probe(pop, 16);
  CHECK(p.before == doctest::Approx(p.after).epsilon(1e-12));
  CHECK(pop.alphabet_size() == 2);
}

TEST_CASE("append_parasites") {
  const Code phi1 = toy_code(ToyCode::Phi1);
  const std::vector<std::pair<std::size_t, std::size_t>> edges = {{0, 1}};
  const Population hosts(Environment::uniform(4), 2, {phi1, phi1}, {}, InteractionGraph::edge_uniform(2, edges));
  const Population p = append_parasites(hosts, 2, 4);
  CHECK(p.size() == 4);
  CHECK(p.alphabet_size() == 4);
  CHECK(p.parasites().size() == 2);
  CHECK(validate(p).ok());
  CHECK_THROWS_AS(append_parasites(hosts, 0, 4), UsageError);
  CHECK_THROWS_AS(append_parasites(hosts.with_alphabet(4), 1, 2), UsageError);
}

TEST_CASE("small pipeline: baseline, attack, response") {
  const fs::path root = scratch("pipeline");
  const ScenarioConfig bc = small(ScenarioKind::Baseline, root / "baseline");
  const StageResult base = run_baseline(bc);
  CHECK(validate(base.population).ok());
  CHECK(base.population.size() == 8);
  CHECK(base.population.parasites().empty());
  for (const char* f : {"population.json", "history.csv", "measures.json", "structure.json", "distances.csv",
                        "joint.csv", "embedding.json", "manifest.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(root / "baseline" / f));
  }
  const auto manifest = read_json(root / "baseline" / "manifest.json");
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["scenario"] == "baseline");
  CHECK(manifest["config"]["agents"] == 8);
  CHECK(load_population(root / "baseline" / "population.json") == base.population);

  // Histories never lose their best.
  for (std::size_t g = 1; g < base.history.records.size(); ++g) {
    CHECK(base.history.records[g].best_fitness >= base.history.records[g - 1].best_fitness - 1e-12);
  }

  const ScenarioConfig ac = small(ScenarioKind::Attack, root / "attack");
  const StageResult attacked = run_attack(ac, base.population);
  CHECK(validate(attacked.population).ok());
  CHECK(attacked.population.size() == 9);
  CHECK(attacked.population.alphabet_size() == 8);
  CHECK(attacked.measures.mutual_understanding <= base.measures.mutual_understanding + 1e-12);
  for (std::size_t a = 0; a < 8; ++a) CHECK(attacked.population.code(AgentId{a}) == base.population.code(AgentId{a}).with_alphabet(8));
  for (const char* f : {"parasite_distances.csv", "symbol_usage.csv"}) CHECK(fs::exists(root / "attack" / f));
  CHECK_FALSE(fs::exists(root / "attack" / "parasite_pairs.csv"));
  const auto am = read_json(root / "attack" / "manifest.json");
  CHECK(am.contains("shift_probe"));
  CHECK(am["mutual_understanding_after"].get<double>() == round_for_output(attacked.measures.mutual_understanding));

  const ScenarioConfig rc = small(ScenarioKind::Respond, root / "respond");
  const StageResult responded = run_response(rc, attacked.population, base.population);
  CHECK(validate(responded.population).ok());
  CHECK(responded.measures.mutual_understanding >= attacked.measures.mutual_understanding - 1e-12);
  // Structure and parasites frozen.
  CHECK(responded.population.graph() == attacked.population.graph());
  CHECK(responded.population.code(AgentId{8}) == attacked.population.code(AgentId{8}));
  CHECK(fs::exists(root / "respond" / "response.json"));
  const auto rows = parse_summary_csv(read_text(root / "respond" / "summary.csv"));
  CHECK(!rows.empty());
  std::size_t covered = 0;
  for (const auto& r : rows) covered += r.size;
  CHECK(covered == 8);

  CHECK_THROWS_AS(run_response(rc, base.population), UsageError);
}

TEST_CASE("several parasites") {
  const fs::path root = scratch("multi");
  const StageResult base = run_baseline(small(ScenarioKind::Baseline, root / "baseline"));
  ScenarioConfig mc = small(ScenarioKind::MultiParasite, root / "multi");
  mc.parasites = 3;
  const StageResult r = run_multi_parasite(mc, base.population);
  CHECK(r.population.parasites().size() == 3);
  CHECK(validate(r.population).ok());
  CHECK(fs::exists(root / "multi" / "parasite_pairs.csv"));
}

TEST_CASE("runs are deterministic across thread counts") {
  const fs::path root = scratch("jobs");
  const std::vector<std::string> files = {"population.json", "history.csv", "measures.json", "manifest.json"};
  RunContext one, many;
  many.jobs = 4;
  const StageResult a = run_baseline(small(ScenarioKind::Baseline, root / "a"), one);
  const StageResult b = run_baseline(small(ScenarioKind::Baseline, root / "b"), many);
  CHECK(same_files(root / "a", root / "b", files));

  const StageResult x = run_attack(small(ScenarioKind::Attack, root / "x"), a.population, one);
  const StageResult y = run_attack(small(ScenarioKind::Attack, root / "y"), a.population, many);
  CHECK(same_files(root / "x", root / "y", files));
  CHECK(x.population == y.population);
}

TEST_CASE("toy scenario output") {
  const fs::path root = scratch("toy");
  ScenarioConfig c;
  c.kind = ScenarioKind::Toy;
  c.output = root;
  const auto doc = run_toy(c);
  CHECK(doc["two_phi1"]["mutual_understanding"] == 1.0);
  CHECK(doc["phi2_parasite_one_edge"]["mutual_understanding"] == 0.0);
  CHECK(doc["two_subpopulations_phi2_parasite"]["mutual_understanding"] == 0.0);
  CHECK(read_json(root / "toy.json") == doc);
}

TEST_CASE("small synonym series") {
  const fs::path root = scratch("synonyms");
  const auto variants = run_synonym_series(small(ScenarioKind::SynonymSeries, root));
  REQUIRE(variants.size() == 2);
  CHECK(variants[0].types == 1);
  CHECK(variants[1].types == 2);
  for (const auto& v : variants) {
    CHECK(std::isfinite(v.pre_attack));
    CHECK(v.converged <= v.pre_attack + 1e-12);
  }
  CHECK(fs::exists(root / "synonyms.csv"));
  CHECK(fs::exists(root / "synonyms_2types.csv"));
  const std::string csv = read_text(root / "synonyms.csv");
  CHECK(csv.rfind("generation,types_1,types_2\n", 0) == 0);
}
