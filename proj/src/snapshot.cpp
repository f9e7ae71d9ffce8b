#include "parasim/snapshot.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "parasim/errors.hpp"

namespace parasim {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "parasim.population";
constexpr int kVersion = 1;

}  // namespace

json population_to_json(const Population& pop) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["num_states"] = pop.num_states();
  doc["prior"] = std::vector<double>(pop.environment().prior().values().begin(),
                                     pop.environment().prior().values().end());
  doc["alphabet_size"] = pop.alphabet_size();

  json agents = json::array();
  for (const auto& c : pop.codes()) {
    json agent;
    if (c.is_deterministic()) {
      agent["symbols"] = std::vector<std::uint32_t>(c.symbols().begin(), c.symbols().end());
    } else {
      json rows = json::array();
      for (std::size_t mu = 0; mu < c.num_states(); ++mu) {
        json row = json::array();
        for (std::size_t x = 0; x < c.alphabet_size(); ++x) {
          if (c.prob(mu, x) != 0.0) row.push_back(json::array({x, c.prob(mu, x)}));
        }
        rows.push_back(std::move(row));
      }
      agent["rows"] = std::move(rows);
    }
    agents.push_back(std::move(agent));
  }
  doc["agents"] = std::move(agents);

  json parasites = json::array();
  for (const auto& p : pop.parasites()) parasites.push_back(p.index);
  doc["parasites"] = std::move(parasites);

  // Edges are listed from the dense matrix so asymmetric or self-interacting
  // inputs survive a round trip and remain visible to validate().
  json edges = json::array();
  const auto& g = pop.graph();
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b = a; b < g.size(); ++b) {
      const double wab = g.weight(a, b);
      const double wba = g.weight(b, a);
      if (wab == 0.0 && wba == 0.0) continue;
      if (wab == wba) {
        edges.push_back(json::array({a, b, wab}));
      } else {
        edges.push_back(json::array({a, b, wab, wba}));
      }
    }
  }
  doc["edges"] = std::move(edges);
  return doc;
}

Population population_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string{}) != kFormat) {
      throw ValidationError(fmt::format("not a population snapshot (format must be \"{}\")", kFormat));
    }
    if (doc.at("version").get<int>() != kVersion) {
      throw ValidationError(fmt::format("unsupported snapshot version {}", doc.at("version").dump()));
    }
    const auto m = doc.at("num_states").get<std::size_t>();
    const auto s = doc.at("alphabet_size").get<std::size_t>();
    auto prior = doc.at("prior").get<std::vector<double>>();
    if (prior.size() != m) throw ValidationError("prior length differs from num_states");
    Environment env{Dist1(std::move(prior))};

    std::vector<Code> codes;
    for (const auto& agent : doc.at("agents")) {
      std::vector<double> table(m * s, 0.0);
      if (agent.contains("symbols")) {
        const auto symbols = agent.at("symbols").get<std::vector<std::size_t>>();
        if (symbols.size() != m) throw ValidationError(fmt::format("agent {}: expected {} symbols", codes.size(), m));
        for (std::size_t mu = 0; mu < m; ++mu) {
          if (symbols[mu] >= s) {
            throw ValidationError(fmt::format("agent {}: symbol {} outside alphabet", codes.size(), symbols[mu]));
          }
          table[mu * s + symbols[mu]] = 1.0;
        }
      } else {
        const auto& rows = agent.at("rows");
        if (rows.size() != m) throw ValidationError(fmt::format("agent {}: expected {} rows", codes.size(), m));
        for (std::size_t mu = 0; mu < m; ++mu) {
          for (const auto& cell : rows[mu]) {
            const auto x = cell.at(0).get<std::size_t>();
            if (x >= s) throw ValidationError(fmt::format("agent {}: symbol {} outside alphabet", codes.size(), x));
            table[mu * s + x] = cell.at(1).get<double>();
          }
        }
      }
      codes.emplace_back(m, s, std::move(table));
    }

    const std::size_t n = codes.size();
    std::vector<AgentId> parasites;
    for (const auto& p : doc.at("parasites")) parasites.push_back({p.get<std::size_t>()});

    std::vector<double> w(n * n, 0.0);
    for (const auto& e : doc.at("edges")) {
      const auto a = e.at(0).get<std::size_t>();
      const auto b = e.at(1).get<std::size_t>();
      if (a >= n || b >= n) throw ValidationError(fmt::format("edge ({}, {}) outside population of {}", a, b, n));
      const double wab = e.at(2).get<double>();
      const double wba = e.size() > 3 ? e.at(3).get<double>() : wab;
      w[a * n + b] = wab;
      w[b * n + a] = wba;
    }
    return Population(std::move(env), s, std::move(codes), std::move(parasites),
                      InteractionGraph(n, std::move(w)));
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed snapshot: {}", e.what()));
  }
}

void save_population(const Population& pop, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out << population_to_json(pop).dump(1) << '\n';
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

Population load_population(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
  try {
    return population_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace parasim
