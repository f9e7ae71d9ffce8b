#include "parasim/scenarios.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "parasim/errors.hpp"
#include "parasim/rng.hpp"
#include "parasim/snapshot.hpp"

namespace parasim {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Baseline: return "baseline";
    case ScenarioKind::Attack: return "attack";
    case ScenarioKind::Respond: return "respond";
    case ScenarioKind::SynonymSeries: return "synonym_series";
    case ScenarioKind::MultiParasite: return "multi_parasite";
    case ScenarioKind::Toy: return "toy";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  for (auto k : {ScenarioKind::Baseline, ScenarioKind::Attack, ScenarioKind::Respond, ScenarioKind::SynonymSeries,
                 ScenarioKind::MultiParasite, ScenarioKind::Toy}) {
    if (to_string(k) == s) return k;
  }
  throw UsageError(fmt::format("unknown scenario kind '{}'", s));
}

namespace {

std::string to_string(LinkMoves m) {
  switch (m) {
    case LinkMoves::None: return "none";
    case LinkMoves::RemoveOnly: return "remove";
    case LinkMoves::Both: return "both";
  }
  return "both";
}

LinkMoves parse_link_moves(const std::string& s) {
  if (s == "none") return LinkMoves::None;
  if (s == "remove") return LinkMoves::RemoveOnly;
  if (s == "both") return LinkMoves::Both;
  throw UsageError(fmt::format("local_search_links must be none, remove or both, not '{}'", s));
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw UsageError(fmt::format("{}: expected a non-negative integer, got '{}'", key, v));
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError(fmt::format("{}: expected a number, got '{}'", key, v));
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

}  // namespace

void ScenarioConfig::check() const {
  ga.check();
  if (agents < 2) throw UsageError("agents must be at least 2");
  if (states < 2) throw UsageError("states must be at least 2");
  if (host_symbols < 1 || parasite_symbols < 1) throw UsageError("symbol counts must be positive");
  if ((kind == ScenarioKind::Attack || kind == ScenarioKind::MultiParasite) && parasite_symbols < host_symbols) {
    throw UsageError("parasite_symbols must be at least host_symbols");
  }
  if (parasites < 1) throw UsageError("parasites must be at least 1");
  if (kind == ScenarioKind::MultiParasite && parasites < 2) throw UsageError("multi_parasite needs parasites >= 2");
  if (seeds < 1) throw UsageError("seeds must be at least 1");
  if (restarts < 1) throw UsageError("restarts must be at least 1");
  if (synonym_agents < 2) throw UsageError("synonym_agents must be at least 2");
  if (type_counts.empty()) throw UsageError("type_counts must not be empty");
  for (std::size_t t : type_counts) {
    if (t < 1 || t > synonym_agents) throw UsageError(fmt::format("type count {} out of range", t));
  }
}

json ScenarioConfig::to_json() const {
  json g = {{"population_size", ga.population_size},
            {"max_generations", ga.max_generations},
            {"crossover_rate", ga.crossover_rate},
            {"tournament_size", ga.tournament_size},
            {"elitism_count", ga.elitism_count},
            {"stall_generations", ga.stall_generations},
            {"init_link_probability", ga.init_link_probability},
            {"local_search_sweeps", ga.local_search_sweeps},
            {"local_search_links", to_string(ga.local_search_links)},
            {"local_search_link_gain", ga.local_search_link_gain}};
  g["mutation_rate"] = ga.mutation_rate ? json(*ga.mutation_rate) : json("auto");
  return {{"kind", to_string(kind)},
          {"agents", agents},
          {"states", states},
          {"host_symbols", host_symbols},
          {"parasite_symbols", parasite_symbols},
          {"parasites", parasites},
          {"seed", seed},
          {"seeds", seeds},
          {"restarts", restarts},
          {"parasite_links_between_parasites", parasite_links_between_parasites},
          {"free_structure", free_structure},
          {"synonym_agents", synonym_agents},
          {"type_counts", type_counts},
          {"shift_offset", shift_offset},
          {"snapshot", snapshot.generic_string()},
          {"baseline_snapshot", baseline_snapshot.generic_string()},
          {"ga", g}};
}

ScenarioConfig parse_scenario_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(fmt::format("config: {}", e.what()));
  }

  ScenarioConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw UsageError(fmt::format("config: key '{}' outside a section", section));
    }
    for (const auto& [key, node] : body) {
      const std::string v = boost::trim_copy(node.data());
      const std::string name = section + "." + key;
      if (section == "scenario") {
        if (key == "kind") c.kind = parse_scenario_kind(v);
        else if (key == "agents") c.agents = parse_count(name, v);
        else if (key == "states") c.states = parse_count(name, v);
        else if (key == "host_symbols") c.host_symbols = parse_count(name, v);
        else if (key == "parasite_symbols") c.parasite_symbols = parse_count(name, v);
        else if (key == "parasites") c.parasites = parse_count(name, v);
        else if (key == "seed") c.seed = parse_count(name, v);
        else if (key == "seeds") c.seeds = parse_count(name, v);
        else if (key == "restarts") c.restarts = parse_count(name, v);
        else if (key == "parasite_links_between_parasites") c.parasite_links_between_parasites = parse_bool(name, v);
        else if (key == "free_structure") c.free_structure = parse_bool(name, v);
        else if (key == "synonym_agents") c.synonym_agents = parse_count(name, v);
        else if (key == "shift_offset") c.shift_offset = parse_count(name, v);
        else if (key == "snapshot") c.snapshot = v;
        else if (key == "baseline_snapshot") c.baseline_snapshot = v;
        else if (key == "output") c.output = v;
        else if (key == "type_counts") {
          std::vector<std::string> parts;
          boost::split(parts, v, boost::is_any_of(","));
          c.type_counts.clear();
          for (auto& p : parts) c.type_counts.push_back(parse_count(name, boost::trim_copy(p)));
        } else {
          throw UsageError(fmt::format("config: unknown key '{}'", name));
        }
      } else if (section == "ga") {
        auto& g = c.ga;
        if (key == "population_size") g.population_size = parse_count(name, v);
        else if (key == "max_generations") g.max_generations = parse_count(name, v);
        else if (key == "mutation_rate") {
          if (v == "auto") g.mutation_rate.reset();
          else g.mutation_rate = parse_real(name, v);
        }
        else if (key == "crossover_rate") g.crossover_rate = parse_real(name, v);
        else if (key == "tournament_size") g.tournament_size = parse_count(name, v);
        else if (key == "elitism_count") g.elitism_count = parse_count(name, v);
        else if (key == "stall_generations") g.stall_generations = parse_count(name, v);
        else if (key == "init_link_probability") g.init_link_probability = parse_real(name, v);
        else if (key == "local_search_sweeps") g.local_search_sweeps = parse_count(name, v);
        else if (key == "local_search_links") g.local_search_links = parse_link_moves(v);
        else if (key == "local_search_link_gain") g.local_search_link_gain = parse_real(name, v);
        else throw UsageError(fmt::format("config: unknown key '{}'", name));
      } else {
        throw UsageError(fmt::format("config: unknown section '{}'", section));
      }
    }
  }
  c.ga.seed = c.seed;
  c.check();
  return c;
}

ScenarioConfig load_scenario_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError&) {
    throw UsageError(fmt::format("cannot read config {}", path.string()));
  }
  return parse_scenario_config(text);
}

// ---------------------------------------------------------------------------
// Helpers

void write_manifest(const fs::path& dir, const ScenarioConfig& cfg, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& files, const json& extra) {
  json m = {{"tool", "parasim"},
            {"version", PARASIM_VERSION},
            {"scenario", to_string(cfg.kind)},
            {"seed", cfg.seed},
            {"config", cfg.to_json()},
            {"inputs", inputs},
            {"files", files}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  write_json(dir / "manifest.json", m);
}

Population append_parasites(const Population& hosts, std::size_t count, std::size_t alphabet) {
  if (count == 0) throw UsageError("append_parasites: count must be positive");
  if (alphabet < hosts.alphabet_size()) throw UsageError("append_parasites: alphabet smaller than the hosts'");
  const std::size_t n = hosts.size();
  if (count > n) throw UsageError("append_parasites: more parasites than hosts");
  Population widened = hosts.with_alphabet(alphabet);
  std::vector<Code> codes = widened.codes();
  auto edges = hosts.graph().edge_pairs();
  std::vector<AgentId> parasites = hosts.parasites();
  const std::vector<std::uint32_t> zeros(hosts.num_states(), 0);
  for (std::size_t k = 0; k < count; ++k) {
    codes.push_back(Code::deterministic(zeros, alphabet));
    edges.emplace_back(k, n + k);
    parasites.push_back({n + k});
  }
  return Population(hosts.environment(), alphabet, std::move(codes), std::move(parasites),
                    InteractionGraph::edge_uniform(n + count, edges));
}

ShiftProbe apply_shift_probe(const Population& pop, std::size_t offset) {
  require_valid(pop);
  Population wide = pop.with_alphabet(pop.alphabet_size() + offset);
  std::vector<Code> codes = wide.codes();
  for (std::size_t a = 0; a < codes.size(); ++a) {
    if (!wide.is_parasite({a})) codes[a] = synonym_shift(codes[a], static_cast<std::int64_t>(offset));
  }
  return {avg_env_info(pop), avg_env_info(wide.with_codes(std::move(codes)))};
}

std::vector<SummaryRow> summary_table(const Population& baseline, const Population& attacked,
                                      const Population& responded) {
  const StructureReport st = analyze_structure(baseline);
  std::vector<SummaryRow> rows;
  for (std::size_t c = 0; c < st.components.size(); ++c) {
    const auto& comp = st.components[c];
    SummaryRow r;
    r.component = c;
    r.size = comp.agents.size();
    r.type_sizes = comp.type_sizes;
    std::sort(r.type_sizes.rbegin(), r.type_sizes.rend());
    r.before = group_mutual_understanding(baseline, comp.agents);
    r.attacked = group_mutual_understanding(attacked, comp.agents);
    r.responded = group_mutual_understanding(responded, comp.agents);
    rows.push_back(std::move(r));
  }
  // Largest components first, as in the usual table layout.
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) { return a.size > b.size; });
  return rows;
}

Population two_subpopulation_scenario(const Code& parasite) {
  std::vector<Code> codes = {toy_code(ToyCode::Phi1), toy_code(ToyCode::Phi1), toy_code(ToyCode::Phi3),
                             toy_code(ToyCode::Phi3), parasite};
  const std::vector<std::pair<std::size_t, std::size_t>> edges = {{0, 1}, {2, 3}, {0, 4}, {1, 4}, {2, 4}, {3, 4}};
  return Population(Environment::uniform(4), 2, std::move(codes), {AgentId{4}}, InteractionGraph::edge_uniform(5, edges));
}

namespace {

fs::path output_dir(const ScenarioConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", cfg.output.string(), ec.message()));
  return cfg.output;
}

EvolveOptions evolve_options(const ScenarioConfig& cfg, const RunContext& ctx, const std::string& stage,
                             std::size_t bound) {
  EvolveOptions o;
  o.symbol_bound = bound;
  o.parasite_links_between_parasites = cfg.parasite_links_between_parasites;
  o.free_structure = cfg.free_structure;
  o.jobs = ctx.jobs;
  if (ctx.progress) {
    o.progress = [&ctx, stage](const GenerationRecord& r) { ctx.progress(stage, r); };
  }
  return o;
}

// The files every evolving stage writes.
std::vector<std::string> write_stage(const fs::path& dir, const Population& pop, const MeasureReport& m,
                                     const RunHistory& h) {
  save_population(pop, dir / "population.json");
  write_history_csv(dir / "history.csv", h);
  write_json(dir / "measures.json", report_to_json(m));
  const StructureReport st = analyze_structure(pop);
  write_json(dir / "structure.json", structure_to_json(st));
  write_distance_csv(dir / "distances.csv", distance_matrix(pop));
  write_matrix_csv(dir / "joint.csv", joint_messages(pop));
  write_json(dir / "embedding.json", embedding_to_json(type_embedding(pop, st)));
  return {"population.json", "history.csv",  "measures.json", "structure.json",
          "distances.csv",   "joint.csv",    "embedding.json"};
}

void require_hosts_only(const Population& hosts) {
  require_valid(hosts);
  if (!hosts.parasites().empty()) throw UsageError("host snapshot already contains parasites");
}

StageResult attack_impl(const ScenarioConfig& cfg, const Population& hosts, const RunContext& ctx,
                        const std::string& stage) {
  require_hosts_only(hosts);
  if (hosts.alphabet_size() > cfg.parasite_symbols) {
    throw UsageError(fmt::format("host alphabet {} exceeds parasite_symbols {}", hosts.alphabet_size(),
                                 cfg.parasite_symbols));
  }
  const Population base = append_parasites(hosts, cfg.parasites, cfg.parasite_symbols);
  GAConfig ga = cfg.ga;
  ga.seed = cfg.seed;
  EvolveResult r = evolve_with_restarts(base, Goal::Attack, ga, cfg.restarts,
                                        evolve_options(cfg, ctx, stage, cfg.parasite_symbols));

  StageResult out{r.best, measure(r.best), r.history, {}};
  const fs::path dir = output_dir(cfg);
  out.files = write_stage(dir, out.population, out.measures, out.history);

  // Code distance from every parasite to every agent.
  std::string pd = "parasite,agent,distance\n";
  for (const auto& p : out.population.parasites()) {
    for (std::size_t a = 0; a < out.population.size(); ++a) {
      pd += fmt::format("{},{},{}\n", p.index, a,
                        format_number(code_distance(out.population.code(p), out.population.codes()[a])));
    }
  }
  write_text(dir / "parasite_distances.csv", pd);
  out.files.push_back("parasite_distances.csv");

  // Pre-attack usage, its rank and whether a parasite now emits the symbol.
  const Dist1 usage = symbol_usage(hosts);
  std::vector<std::size_t> order(usage.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return usage[a] > usage[b]; });
  std::vector<std::size_t> rank(usage.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  std::set<std::size_t> emitted;
  for (const auto& p : out.population.parasites()) {
    for (std::size_t s : used_symbols(out.population.code(p))) emitted.insert(s);
  }
  std::string su = "symbol,pre_attack_usage,rank,parasite_uses\n";
  for (std::size_t s = 0; s < out.population.alphabet_size(); ++s) {
    const double u = s < usage.size() ? usage[s] : 0.0;
    const std::size_t rk = s < usage.size() ? rank[s] : s;
    su += fmt::format("x{},{},{},{}\n", s + 1, format_number(u), rk, emitted.count(s) ? 1 : 0);
  }
  write_text(dir / "symbol_usage.csv", su);
  out.files.push_back("symbol_usage.csv");

  if (out.population.parasites().size() > 1) {
    std::vector<Code> pc;
    for (const auto& p : out.population.parasites()) pc.push_back(out.population.code(p));
    write_distance_csv(dir / "parasite_pairs.csv", distance_matrix(std::span<const Code>(pc)));
    out.files.push_back("parasite_pairs.csv");
  }

  const ShiftProbe probe = apply_shift_probe(out.population, cfg.shift_offset);
  json extra = {{"mutual_understanding_before", round_for_output(mutual_understanding(hosts))},
                {"mutual_understanding_after", round_for_output(out.measures.mutual_understanding)},
                {"shift_probe", {{"before", round_for_output(probe.before)}, {"after", round_for_output(probe.after)}}}};
  std::vector<std::string> inputs;
  if (!cfg.snapshot.empty()) inputs.push_back(cfg.snapshot.generic_string());
  write_manifest(dir, cfg, inputs, out.files, extra);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runners

StageResult run_baseline(const ScenarioConfig& cfg, const RunContext& ctx) {
  cfg.check();
  const std::vector<std::uint32_t> zeros(cfg.states, 0);
  const Population tmpl(Environment::uniform(cfg.states), cfg.host_symbols,
                        std::vector<Code>(cfg.agents, Code::deterministic(zeros, cfg.host_symbols)), {},
                        InteractionGraph::well_mixed(cfg.agents));

  std::optional<EvolveResult> best;
  std::uint64_t best_seed = cfg.seed;
  json per_seed = json::array();
  for (std::size_t i = 0; i < cfg.seeds; ++i) {
    GAConfig ga = cfg.ga;
    ga.seed = cfg.seed + i;
    EvolveResult r = evolve_with_restarts(tmpl, Goal::Baseline, ga, cfg.restarts,
                                          evolve_options(cfg, ctx, fmt::format("baseline seed {}", ga.seed), 0));
    per_seed.push_back({{"seed", ga.seed}, {"mutual_understanding", round_for_output(r.fitness)}});
    if (!best || r.fitness > best->fitness) {
      best = std::move(r);
      best_seed = ga.seed;
    }
  }

  StageResult out{best->best, measure(best->best), best->history, {}};
  const fs::path dir = output_dir(cfg);
  out.files = write_stage(dir, out.population, out.measures, out.history);
  write_manifest(dir, cfg, {}, out.files, {{"seed_results", per_seed}, {"selected_seed", best_seed}});
  return out;
}

StageResult run_attack(const ScenarioConfig& cfg, const Population& hosts, const RunContext& ctx) {
  cfg.check();
  return attack_impl(cfg, hosts, ctx, "attack");
}

StageResult run_multi_parasite(const ScenarioConfig& cfg, const Population& hosts, const RunContext& ctx) {
  cfg.ga.check();
  if (cfg.parasites < 1) throw UsageError("parasites must be at least 1");
  return attack_impl(cfg, hosts, ctx, "multi");
}

StageResult run_response(const ScenarioConfig& cfg, const Population& attacked, const std::optional<Population>& baseline,
                         const RunContext& ctx) {
  cfg.ga.check();
  require_valid(attacked);
  if (attacked.parasites().empty()) throw UsageError("response needs a snapshot with at least one parasite");
  const std::size_t bound = std::max(cfg.parasite_symbols, attacked.alphabet_size());
  const Population base = attacked.with_alphabet(bound);

  GAConfig ga = cfg.ga;
  ga.seed = cfg.seed;
  EvolveResult r =
      evolve_with_restarts(base, Goal::Response, ga, cfg.restarts, evolve_options(cfg, ctx, "respond", bound));

  StageResult out{r.best, measure(r.best), r.history, {}};
  const fs::path dir = output_dir(cfg);
  out.files = write_stage(dir, out.population, out.measures, out.history);

  json per_parasite = json::array();
  for (const auto& p : attacked.parasites()) {
    per_parasite.push_back({{"agent", p.index},
                            {"blend_kl_attacked", round_for_output(blend_kl(attacked, p))},
                            {"blend_kl_responded", round_for_output(blend_kl(out.population, p))}});
  }
  const ShiftProbe probe = apply_shift_probe(out.population, cfg.shift_offset);
  json comparison = {
      {"format", "parasim.response"},
      {"mutual_understanding", {{"attacked", round_for_output(mutual_understanding(attacked))},
                                {"responded", round_for_output(out.measures.mutual_understanding)}}},
      {"parasite_symbol_mass", {{"attacked", round_for_output(parasite_symbol_mass(attacked))},
                                {"responded", round_for_output(parasite_symbol_mass(out.population))}}},
      {"identifiability", {{"attacked", round_for_output(identifiability(attacked))},
                           {"responded", round_for_output(out.measures.identifiability)}}},
      {"parasites", per_parasite},
      {"shift_probe", {{"before", round_for_output(probe.before)}, {"after", round_for_output(probe.after)}}}};
  write_json(dir / "response.json", comparison);
  out.files.push_back("response.json");

  std::vector<std::string> inputs;
  if (!cfg.snapshot.empty()) inputs.push_back(cfg.snapshot.generic_string());
  if (baseline) {
    if (baseline->size() + attacked.parasites().size() != attacked.size()) {
      throw UsageError("baseline snapshot does not match the attacked population");
    }
    write_summary_csv(dir / "summary.csv", summary_table(*baseline, attacked, out.population));
    out.files.push_back("summary.csv");
    if (!cfg.baseline_snapshot.empty()) inputs.push_back(cfg.baseline_snapshot.generic_string());
  }
  write_manifest(dir, cfg, inputs, out.files);
  return out;
}

std::vector<SynonymVariant> run_synonym_series(const ScenarioConfig& cfg, const RunContext& ctx) {
  cfg.check();
  const std::size_t n = cfg.synonym_agents;
  const std::size_t block = cfg.host_symbols;
  const std::size_t alphabet = block * *std::max_element(cfg.type_counts.begin(), cfg.type_counts.end());

  Rng rng = Rng::stream(cfg.seed, 0x5e, 0);
  std::vector<std::uint32_t> symbols(cfg.states);
  for (auto& s : symbols) s = static_cast<std::uint32_t>(rng.uniform_index(block));
  const Code shared = Code::deterministic(symbols, alphabet);

  std::vector<SynonymVariant> variants;
  std::vector<std::string> files;
  const fs::path dir = output_dir(cfg);
  for (std::size_t types : cfg.type_counts) {
    std::vector<Code> codes;
    for (std::size_t a = 0; a < n; ++a) {
      codes.push_back(synonym_shift(shared, static_cast<std::int64_t>(block * (a * types / n))));
    }
    const Population hosts(Environment::uniform(cfg.states), alphabet, codes, {}, InteractionGraph::well_mixed(n));
    const Population base = append_parasites(hosts, cfg.parasites, alphabet);
    GAConfig ga = cfg.ga;
    ga.seed = cfg.seed;
    EvolveResult r = evolve_with_restarts(base, Goal::Attack, ga, cfg.restarts,
                                          evolve_options(cfg, ctx, fmt::format("synonyms {}", types), alphabet));
    SynonymVariant v{types, mutual_understanding(hosts), r.fitness, r.history};
    const std::string name = fmt::format("synonyms_{}types.csv", types);
    write_history_csv(dir / name, v.history);
    files.push_back(name);
    variants.push_back(std::move(v));
  }

  // One column per variant; shorter runs repeat their final value.
  std::size_t rows = 0;
  for (const auto& v : variants) rows = std::max(rows, v.history.records.size());
  std::string csv = "generation";
  for (const auto& v : variants) csv += fmt::format(",types_{}", v.types);
  csv += "\n";
  for (std::size_t g = 0; g < rows; ++g) {
    csv += fmt::format("{}", g);
    for (const auto& v : variants) {
      const auto& recs = v.history.records;
      csv += "," + format_number(recs[std::min(g, recs.size() - 1)].best_fitness);
    }
    csv += "\n";
  }
  write_text(dir / "synonyms.csv", csv);
  files.push_back("synonyms.csv");

  json summary = json::array();
  for (const auto& v : variants) {
    summary.push_back({{"types", v.types},
                       {"pre_attack", round_for_output(v.pre_attack)},
                       {"converged", round_for_output(v.converged)},
                       {"generations", v.history.records.size()}});
  }
  write_json(dir / "synonyms.json", {{"format", "parasim.synonyms"}, {"variants", summary}});
  files.push_back("synonyms.json");
  write_manifest(dir, cfg, {}, files);
  return variants;
}

json run_toy(const ScenarioConfig& cfg) {
  const Environment env = Environment::uniform(4);
  const Code phi1 = toy_code(ToyCode::Phi1);
  const Code phi2 = toy_code(ToyCode::Phi2);
  const std::vector<std::pair<std::size_t, std::size_t>> one = {{0, 1}};
  const std::vector<std::pair<std::size_t, std::size_t>> three = {{0, 1}, {1, 2}};

  const Population pair(env, 2, {phi1, phi1}, {}, InteractionGraph::edge_uniform(2, one));
  const Population trio(env, 2, {phi1, phi1, phi2}, {AgentId{2}}, InteractionGraph::edge_uniform(3, three));
  const Population split = two_subpopulation_scenario(phi2);

  json doc = {{"format", "parasim.toy"},
              {"two_phi1", report_to_json(measure(pair))},
              {"phi2_parasite_one_edge", report_to_json(measure(trio))},
              {"two_subpopulations_phi2_parasite", report_to_json(measure(split))}};
  const fs::path dir = output_dir(cfg);
  write_json(dir / "toy.json", doc);
  write_manifest(dir, cfg, {}, {"toy.json"});
  return doc;
}

}  // namespace parasim
