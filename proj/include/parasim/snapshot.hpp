#pragma once

// Population snapshots as JSON documents.
//
//   {
//     "format": "parasim.population", "version": 1,
//     "num_states": M, "prior": [p_0, ..., p_{M-1}],
//     "alphabet_size": S,
//     "agents": [ {"symbols": [s_0, ..., s_{M-1}]}            deterministic
//               | {"rows": [[[symbol, prob], ...], ...]} ],   general
//     "parasites": [agent ids],
//     "edges": [[a, b, w], ...]     undirected, w on each ordered pair
//   }
//
// Symbols and agent ids are 0-based.  Doubles are written with round-trip
// precision so load(save(p)) == p.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "parasim/popmodel.hpp"

namespace parasim {

nlohmann::json population_to_json(const Population& pop);

/// Throws ValidationError on structurally malformed documents.  Invariant
/// violations that validate() can describe (row sums, self-edges, ...) are
/// loaded as-is.
Population population_from_json(const nlohmann::json& doc);

void save_population(const Population& pop, const std::filesystem::path& path);
Population load_population(const std::filesystem::path& path);

}  // namespace parasim
