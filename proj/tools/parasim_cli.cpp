// parasim: one binary, one subcommand per scenario or analysis.
//
// Exit codes: 0 success, 1 validation error (malformed or invalid
// population), 2 usage error (bad flags, bad config, unreadable paths),
// 3 anything else.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "parasim/errors.hpp"
#include "parasim/metrics.hpp"
#include "parasim/reportkit.hpp"
#include "parasim/scenarios.hpp"
#include "parasim/snapshot.hpp"

using namespace parasim;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string snapshot;
  std::string baseline;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parasites;
  std::size_t jobs = 0;
  std::size_t offset = 16;
  bool agents = false;
  int verbosity = 0;
};

ScenarioConfig make_config(const Options& o, ScenarioKind default_kind) {
  ScenarioConfig cfg;
  cfg.kind = default_kind;
  if (!o.config.empty()) cfg = load_scenario_config(o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.ga.seed = *o.seed;
  }
  if (o.parasites) cfg.parasites = *o.parasites;
  if (!o.snapshot.empty()) cfg.snapshot = o.snapshot;
  if (!o.baseline.empty()) cfg.baseline_snapshot = o.baseline;
  if (!o.out.empty()) {
    cfg.output = o.out;
  } else if (const char* env = std::getenv("PARASIM_OUT_DIR"); env && *env) {
    cfg.output = env;
  }
  return cfg;
}

RunContext make_context(const Options& o) {
  RunContext ctx;
  ctx.jobs = o.jobs;
  if (o.verbosity >= 1) {
    ctx.progress = [](const std::string& stage, const GenerationRecord& r) {
      std::cerr << fmt::format("[{}] generation {} best {} mean {}\n", stage, r.generation,
                               format_number(r.best_fitness), format_number(r.mean_fitness));
    };
  }
  return ctx;
}

Population load_snapshot(const std::string& path) {
  if (path.empty()) throw UsageError("--snapshot is required");
  try {
    return load_population(path);
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
}

void print_stage(const StageResult& r, const fs::path& dir) {
  std::cout << fmt::format("mutual_understanding {}\n", format_number(r.measures.mutual_understanding));
  std::cout << fmt::format("wrote {} files to {}\n", r.files.size() + 1, dir.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parasim: populations of communicating agents and the parasites that disrupt them"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub, bool config, bool snapshot) {
    if (config) sub->add_option("--config", o.config, "Scenario config (INI)")->check(CLI::ExistingFile);
    if (snapshot) sub->add_option("--snapshot", o.snapshot, "Input population snapshot (JSON)");
    sub->add_option("--out", o.out, "Output directory (default: $PARASIM_OUT_DIR, then the config's output)");
    sub->add_option("--seed", o.seed, "Override the config seed");
    sub->add_option("--jobs", o.jobs, "Worker threads for fitness evaluation (0 = all cores)");
    sub->add_flag("-v,--verbose", o.verbosity, "Progress lines on standard error");
  };

  auto* evolve = app.add_subcommand("evolve", "Evolve a host population (baseline or toy config)");
  common(evolve, true, false);
  auto* attack = app.add_subcommand("attack", "Attack a host snapshot with parasites");
  common(attack, true, true);
  attack->add_option("--parasites", o.parasites, "Override the parasite count");
  auto* respond = app.add_subcommand("respond", "Hosts respond to an attacked snapshot");
  common(respond, true, true);
  respond->add_option("--baseline", o.baseline, "Pre-attack snapshot, enables summary.csv");
  auto* synonyms = app.add_subcommand("synonyms", "Attack 1/2/4-type synonym variants");
  common(synonyms, true, false);
  auto* multi = app.add_subcommand("multi", "Attack a host snapshot with several parasites");
  common(multi, true, true);
  multi->add_option("--parasites", o.parasites, "Override the parasite count");

  auto* measure_cmd = app.add_subcommand("measure", "Print the measure report of a snapshot as JSON");
  measure_cmd->add_option("--snapshot", o.snapshot, "Population snapshot")->required();
  auto* mds = app.add_subcommand("mds", "Print the 2-D embedding of a snapshot's codes as JSON");
  mds->add_option("--snapshot", o.snapshot, "Population snapshot")->required();
  mds->add_flag("--agents", o.agents, "One point per agent instead of one per code type");
  auto* probe = app.add_subcommand("probe-shift", "Environmental information before and after a synonym shift");
  probe->add_option("--snapshot", o.snapshot, "Population snapshot")->required();
  probe->add_option("--offset", o.offset, "Symbols to shift host codes by");
  auto* validate_cmd = app.add_subcommand("validate", "Check a snapshot against every population invariant");
  validate_cmd->add_option("--snapshot", o.snapshot, "Population snapshot")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunContext ctx = make_context(o);
    if (evolve->parsed()) {
      const ScenarioConfig cfg = make_config(o, ScenarioKind::Baseline);
      if (cfg.kind == ScenarioKind::Toy) {
        std::cout << run_toy(cfg).dump(1) << "\n";
      } else if (cfg.kind == ScenarioKind::Baseline) {
        print_stage(run_baseline(cfg, ctx), cfg.output);
      } else {
        throw UsageError(fmt::format("evolve runs baseline or toy configs; use the '{}' config with its subcommand",
                                     to_string(cfg.kind)));
      }
    } else if (attack->parsed() || multi->parsed()) {
      const ScenarioConfig cfg =
          make_config(o, attack->parsed() ? ScenarioKind::Attack : ScenarioKind::MultiParasite);
      const Population hosts = load_snapshot(cfg.snapshot.string());
      const StageResult r = attack->parsed() ? run_attack(cfg, hosts, ctx) : run_multi_parasite(cfg, hosts, ctx);
      print_stage(r, cfg.output);
    } else if (respond->parsed()) {
      const ScenarioConfig cfg = make_config(o, ScenarioKind::Respond);
      const Population attacked = load_snapshot(cfg.snapshot.string());
      std::optional<Population> baseline;
      if (!cfg.baseline_snapshot.empty()) baseline = load_snapshot(cfg.baseline_snapshot.string());
      print_stage(run_response(cfg, attacked, baseline, ctx), cfg.output);
    } else if (synonyms->parsed()) {
      const ScenarioConfig cfg = make_config(o, ScenarioKind::SynonymSeries);
      for (const auto& v : run_synonym_series(cfg, ctx)) {
        std::cout << fmt::format("types {} pre_attack {} converged {}\n", v.types, format_number(v.pre_attack),
                                 format_number(v.converged));
      }
    } else if (measure_cmd->parsed()) {
      const Population pop = load_snapshot(o.snapshot);
      require_valid(pop);
      std::cout << report_to_json(measure(pop)).dump(1) << "\n";
    } else if (mds->parsed()) {
      const Population pop = load_snapshot(o.snapshot);
      require_valid(pop);
      const Embedding2D e = o.agents ? mds_embed(distance_matrix(pop)) : type_embedding(pop, analyze_structure(pop));
      std::cout << embedding_to_json(e).dump(1) << "\n";
    } else if (probe->parsed()) {
      const Population pop = load_snapshot(o.snapshot);
      const ShiftProbe p = apply_shift_probe(pop, o.offset);
      const nlohmann::json doc = {{"offset", o.offset},
                                  {"before", round_for_output(p.before)},
                                  {"after", round_for_output(p.after)}};
      std::cout << doc.dump(1) << "\n";
    } else if (validate_cmd->parsed()) {
      const Population pop = load_snapshot(o.snapshot);
      const ValidationReport rep = validate(pop);
      if (!rep.ok()) {
        std::cout << rep.to_string();
        return 1;
      }
      std::cout << "ok\n";
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
