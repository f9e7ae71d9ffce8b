#pragma once

// Scripted experiments.  Every runner is deterministic in (config, seed),
// writes its files under `output` and finishes with manifest.json (config
// echo, seed, tool version, file list).
//
// Configuration is an INI file; see docs/formats.md and configs/.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parasim/metrics.hpp"
#include "parasim/optimizer.hpp"
#include "parasim/popmodel.hpp"
#include "parasim/reportkit.hpp"

namespace parasim {

enum class ScenarioKind { Baseline, Attack, Respond, SynonymSeries, MultiParasite, Toy };

std::string to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& s);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Baseline;
  std::size_t agents = 256;
  std::size_t states = 16;
  std::size_t host_symbols = 16;
  std::size_t parasite_symbols = 32;
  std::size_t parasites = 1;
  std::uint64_t seed = 1;
  /// Baseline: independent runs seeded seed, seed+1, ...; the best is kept.
  std::size_t seeds = 1;
  /// Restarts per GA run (best kept).
  std::size_t restarts = 1;
  bool parasite_links_between_parasites = true;
  bool free_structure = false;
  /// Synonym series.
  std::size_t synonym_agents = 64;
  std::vector<std::size_t> type_counts = {1, 2, 4};
  /// Shift probe offset.
  std::size_t shift_offset = 16;
  std::filesystem::path snapshot;           // staged input
  std::filesystem::path baseline_snapshot;  // response: for the summary table
  std::filesystem::path output = "out";
  GAConfig ga;

  /// Throws UsageError on inconsistent values.
  void check() const;
  nlohmann::json to_json() const;
};

/// Parses the INI text.  Unknown keys are a UsageError so typos surface.
ScenarioConfig parse_scenario_config(const std::string& text);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct RunContext {
  std::size_t jobs = 1;
  std::function<void(const std::string& stage, const GenerationRecord&)> progress;
};

struct StageResult {
  Population population;
  MeasureReport measures;
  RunHistory history;
  std::vector<std::string> files;  // relative to the output directory
};

// ---------------------------------------------------------------------------
// Runners

/// Co-evolves codes and structure of `agents` hosts over `host_symbols`
/// symbols.  Writes population.json, history.csv, measures.json,
/// structure.json, distances.csv, joint.csv, embedding.json.
StageResult run_baseline(const ScenarioConfig& cfg, const RunContext& ctx = {});

/// Appends `parasites` parasites to the host snapshot (alphabet widened to
/// parasite_symbols) and minimizes mutual understanding over their codes and
/// links.  Writes the baseline set plus parasite_distances.csv and
/// symbol_usage.csv; with several parasites also parasite_pairs.csv.
StageResult run_attack(const ScenarioConfig& cfg, const Population& hosts, const RunContext& ctx = {});

/// Same as run_attack; requires parasites >= 2 unless called with 1 for the
/// consistency check.
StageResult run_multi_parasite(const ScenarioConfig& cfg, const Population& hosts, const RunContext& ctx = {});

/// Hosts re-evolve their codes over parasite_symbols symbols with the
/// structure frozen.  With a baseline population also writes summary.csv
/// (per-component I1, I2, I3).
StageResult run_response(const ScenarioConfig& cfg, const Population& attacked,
                         const std::optional<Population>& baseline = std::nullopt, const RunContext& ctx = {});

struct SynonymVariant {
  std::size_t types = 0;
  double pre_attack = 0.0;
  double converged = 0.0;
  RunHistory history;
};

/// Well-mixed random-code population and its 2-, 4-, ... type variants built
/// by shifting agent blocks into fresh symbol ranges; each is attacked.
/// Writes synonyms.csv (mutual understanding per generation and variant) and
/// synonyms.json.
std::vector<SynonymVariant> run_synonym_series(const ScenarioConfig& cfg, const RunContext& ctx = {});

/// The hand-checkable toy configurations, measured and written to toy.json.
nlohmann::json run_toy(const ScenarioConfig& cfg);

// ---------------------------------------------------------------------------
// Probe and helpers

struct ShiftProbe {
  double before = 0.0;
  double after = 0.0;
};

/// Average environmental information before and after moving every host
/// code by `offset` symbols (alphabet widened as needed).  The population
/// itself is not modified.
ShiftProbe apply_shift_probe(const Population& pop, std::size_t offset = 16);

/// Hosts plus `count` parasites, each with a constant code on symbol 0 and a
/// single link to host k, over an alphabet of `alphabet` symbols.
Population append_parasites(const Population& hosts, std::size_t count, std::size_t alphabet);

/// Per-component mutual understanding (ordered pairs with at least one
/// endpoint in the component) of the baseline components in each stage.
std::vector<SummaryRow> summary_table(const Population& baseline, const Population& attacked,
                                      const Population& responded);

/// The two-subpopulation toy: theta1, theta2 with phi1 on one edge, theta3,
/// theta4 with phi3 on one edge, and a parasite with `parasite` linked to all
/// four (agent 4).
Population two_subpopulation_scenario(const Code& parasite);

/// Writes manifest.json into `dir`.
void write_manifest(const std::filesystem::path& dir, const ScenarioConfig& cfg, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& files, const nlohmann::json& extra = nlohmann::json::object());

}  // namespace parasim
