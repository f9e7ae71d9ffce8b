#pragma once

// Genetic-algorithm engine for the three optimization regimes.
//
//   Baseline  every agent's code and the whole interaction structure evolve;
//             maximizes mutual understanding.
//   Attack    only the parasites' codes and links evolve; minimizes it.
//   Response  only the hosts' codes evolve, the structure is frozen (unless
//             free_structure is set); maximizes it.
//
// Codes are deterministic: a genome holds one symbol gene per (agent, state)
// and one bit per candidate undirected link.  Decoded graphs are edge-uniform.
//
// Generations are produced with tournament selection, uniform crossover,
// per-gene uniform resampling and elitism.  When local_search_sweeps > 0 the
// best individual of every generation is additionally improved by
// best-response sweeps (each symbol gene set to its best value given the
// rest, each link gene flipped if that helps) and written back.
//
// Reproducibility: every random draw comes from a stream keyed by
// (seed, generation, slot), so results do not depend on `jobs`.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parasim/popmodel.hpp"
#include "parasim/rng.hpp"

namespace parasim {

enum class Goal { Baseline, Attack, Response };

/// Link flips tried by local search.
enum class LinkMoves { None, RemoveOnly, Both };

std::string to_string(Goal g);

struct GAConfig {
  std::size_t population_size = 200;
  std::size_t max_generations = 1000;
  std::optional<double> mutation_rate;  // unset: 1 / genome length
  double crossover_rate = 0.9;
  std::size_t tournament_size = 3;
  std::size_t elitism_count = 2;
  std::size_t stall_generations = 50;
  std::uint64_t seed = 1;
  double init_link_probability = 0.5;
  std::size_t local_search_sweeps = 0;
  /// Which link flips local search may try.
  LinkMoves local_search_links = LinkMoves::Both;
  /// Smallest improvement (bits) for which local search flips a link.
  double local_search_link_gain = 1e-10;

  /// Throws UsageError naming the first bad field.
  void check() const;
};

struct GenerationRecord {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  std::vector<double> diagnostics;
};

struct RunHistory {
  std::vector<std::string> diagnostic_names;
  std::vector<GenerationRecord> records;
};

/// Fixed mapping between genes and the decoded population.
struct GenomeLayout {
  Goal goal = Goal::Baseline;
  std::size_t num_agents = 0;
  std::size_t num_states = 0;
  std::size_t symbol_bound = 0;
  std::vector<std::size_t> coded_agents;                         // gene block order
  std::vector<std::pair<std::size_t, std::size_t>> link_pairs;   // link gene -> (a, b), a < b
  std::vector<std::pair<std::size_t, std::size_t>> fixed_edges;  // edges outside genetic control
  std::vector<std::vector<std::size_t>> agent_links;             // agent -> its link genes

  std::size_t symbol_genes() const { return coded_agents.size() * num_states; }
  std::size_t genome_length() const { return symbol_genes() + link_pairs.size(); }
};

struct Genome {
  Goal goal = Goal::Baseline;
  std::vector<std::uint16_t> symbols;
  std::vector<std::uint8_t> links;
  friend bool operator==(const Genome&, const Genome&) = default;
};

struct EvolveOptions {
  /// Alphabet bound for evolved codes; 0 means the population alphabet.
  std::size_t symbol_bound = 0;
  /// Attack with several parasites: whether parasites may link to each other.
  bool parasite_links_between_parasites = true;
  /// Response: hosts may also rewire every link.
  bool free_structure = false;
  /// Worker threads for offspring evaluation; 0 means hardware concurrency.
  std::size_t jobs = 1;
  std::function<void(const GenerationRecord&)> progress;
};

struct EvolveResult {
  Population best;
  Genome genome;
  double fitness = 0.0;
  RunHistory history;
};

/// Runs the GA.  Throws UsageError for a bad config or a goal that does not
/// fit the population (Attack/Response without parasites, Baseline with them,
/// non-deterministic fixed codes).
EvolveResult evolve(const Population& base, Goal goal, const GAConfig& cfg, const EvolveOptions& opts = {});

/// Best of `restarts` independent runs seeded from cfg.seed.
EvolveResult evolve_with_restarts(const Population& base, Goal goal, const GAConfig& cfg, std::size_t restarts,
                                  const EvolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Building blocks, exposed for tests and tools.

GenomeLayout make_layout(const Population& base, Goal goal, const EvolveOptions& opts = {});

/// Decodes a genome on top of `base` (which supplies environment, alphabet,
/// parasite set and every code or edge the genome does not carry).
Population decode(const Genome& g, const GenomeLayout& layout, const Population& base);

/// The genome that reproduces `pop` under `layout` (codes must be
/// deterministic and inside the bound).
Genome encode(const Population& pop, const GenomeLayout& layout);

Genome random_genome(const GenomeLayout& layout, double link_probability, Rng& rng);

/// Each gene is independently resampled uniformly within its bounds with
/// probability `rate`.  Does not repair.
Genome mutate(const Genome& g, const GenomeLayout& layout, double rate, Rng& rng);

/// Uniform crossover: every gene is swapped between the children with
/// probability 1/2.  Throws UsageError when shapes differ.
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng);

/// Adds one uniformly chosen link for every agent left without interactions.
Genome repair(const Genome& g, const GenomeLayout& layout, Rng& rng);

/// True when the best fitness has not moved by more than 1e-9 over the last
/// stall_generations generations, or max_generations has been reached.
bool converged(const RunHistory& h, const GAConfig& cfg);

class FitnessEvaluator;

/// Best-response improvement of a genome; returns the number of sweeps run.
std::size_t improve(Genome& g, const GenomeLayout& layout, const FitnessEvaluator& eval, std::size_t max_sweeps,
                    LinkMoves links = LinkMoves::Both, double min_link_gain = 1e-10);

/// Exact mutual understanding of a decoded genome through the count table.
/// Keeps its own copy of the layout.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const Population& base, const GenomeLayout& layout);
  double operator()(const Genome& g) const;

 private:
  friend std::size_t improve(Genome&, const GenomeLayout&, const FitnessEvaluator&, std::size_t, LinkMoves, double);
  std::vector<std::vector<std::uint32_t>> symbols_of(const Genome& g) const;

  GenomeLayout layout_;
  std::vector<std::vector<std::uint32_t>> base_symbols_;
  std::vector<double> state_weights_;
  std::size_t alphabet_;
  std::vector<double> static_cells_;                                      // edges between uncoded agents
  std::vector<std::pair<std::size_t, std::size_t>> dynamic_fixed_edges_;  // fixed edges touching coded agents
  std::vector<std::ptrdiff_t> slot_of_agent_;
};

}  // namespace parasim
