#include "parasim/reportkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Dense>
#include <boost/algorithm/string.hpp>
#include <fmt/format.h>

#include "parasim/errors.hpp"

namespace parasim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// MDS

Embedding2D mds_embed(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) throw UsageError(fmt::format("distance matrix: nonzero diagonal at {}", i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(d(i, j) - d(j, i)) > 1e-12) {
        throw UsageError(fmt::format("distance matrix: not symmetric at ({}, {})", i, j));
      }
    }
  }
  Embedding2D e;
  e.points.assign(n, {0.0, 0.0});
  e.sizes.assign(n, 1);
  e.components.assign(n, 0);
  if (n < 2) return e;

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd sq(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      const double v = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      sq(i, j) = v * v;
    }
  }
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(ni, ni) - Eigen::MatrixXd::Constant(ni, ni, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd b = -0.5 * centering * sq * centering;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw ValidationError("MDS eigen-decomposition failed");

  // Eigenvalues come out ascending.
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index k = ni - 1 - axis;
    const double lambda = std::max(solver.eigenvalues()(k), 0.0);
    Eigen::VectorXd v = solver.eigenvectors().col(k) * std::sqrt(lambda);
    for (Eigen::Index i = 0; i < ni; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    for (Eigen::Index i = 0; i < ni; ++i) {
      double c = v(i);
      if (std::abs(c) < 1e-15) c = 0.0;
      e.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(axis)] = c;
    }
  }

  double err = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = e.points[i][0] - e.points[j][0];
      const double dy = e.points[i][1] - e.points[j][1];
      const double r = std::hypot(dx, dy) - d(i, j);
      err += r * r;
      ++pairs;
    }
  }
  e.stress = std::sqrt(err / static_cast<double>(pairs));
  return e;
}

DistanceMatrix type_distance_matrix(const Population& pop, const StructureReport& structure) {
  std::vector<Code> reps;
  reps.reserve(structure.types.size());
  for (const auto& t : structure.types) reps.push_back(pop.code(t.members.front()));
  return distance_matrix(std::span<const Code>(reps));
}

Embedding2D type_embedding(const Population& pop, const StructureReport& structure) {
  Embedding2D e = mds_embed(type_distance_matrix(pop, structure));
  for (std::size_t t = 0; t < structure.types.size(); ++t) {
    const auto& members = structure.types[t].members;
    e.sizes[t] = members.size();
    std::map<std::size_t, std::size_t> per_component;
    for (const auto& a : members) ++per_component[structure.agent_component[a.index]];
    std::size_t best = 0;
    std::size_t best_count = 0;
    for (const auto& [c, count] : per_component) {
      if (count > best_count) {
        best = c;
        best_count = count;
      }
    }
    e.components[t] = best;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Text helpers

std::string format_number(double v) {
  if (v == 0.0) return "0";
  return fmt::format("{:.12g}", v);
}

double round_for_output(double v) { return std::stod(format_number(v)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(1) + "\n"); }

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::string> lines;
  boost::split(lines, text, boost::is_any_of("\n"));
  std::vector<std::vector<std::string>> out;
  for (auto& line : lines) {
    boost::trim_right_if(line, boost::is_any_of("\r"));
    if (line.empty()) continue;
    std::vector<std::string> cells;
    boost::split(cells, line, boost::is_any_of(","));
    out.push_back(std::move(cells));
  }
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("not a number: '{}'", s));
  }
}

std::size_t to_index(const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("not an index: '{}'", s));
  }
}

std::string symbol_label(std::size_t x) { return fmt::format("x{}", x + 1); }

std::size_t parse_symbol_label(const std::string& s) {
  if (s.size() < 2 || s[0] != 'x') throw ValidationError(fmt::format("bad symbol label '{}'", s));
  const std::size_t v = to_index(s.substr(1));
  if (v == 0) throw ValidationError(fmt::format("bad symbol label '{}'", s));
  return v - 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Histories

std::string history_csv(const RunHistory& h) {
  std::string out = "generation,best_fitness,mean_fitness";
  for (const auto& n : h.diagnostic_names) out += "," + n;
  out += "\n";
  for (const auto& r : h.records) {
    out += fmt::format("{},{},{}", r.generation, format_number(r.best_fitness), format_number(r.mean_fitness));
    for (double v : r.diagnostics) out += "," + format_number(v);
    out += "\n";
  }
  return out;
}

void write_history_csv(const std::filesystem::path& path, const RunHistory& h) { write_text(path, history_csv(h)); }

RunHistory parse_history_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].size() < 3 || rows[0][0] != "generation") {
    throw ValidationError("history CSV: missing header");
  }
  RunHistory h;
  h.diagnostic_names.assign(rows[0].begin() + 3, rows[0].end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != rows[0].size()) throw ValidationError(fmt::format("history CSV: row {} has wrong width", i));
    GenerationRecord rec;
    rec.generation = to_index(r[0]);
    rec.best_fitness = to_double(r[1]);
    rec.mean_fitness = to_double(r[2]);
    for (std::size_t k = 3; k < r.size(); ++k) rec.diagnostics.push_back(to_double(r[k]));
    h.records.push_back(std::move(rec));
  }
  return h;
}

RunHistory read_history_csv(const std::filesystem::path& path) { return parse_history_csv(read_text(path)); }

// ---------------------------------------------------------------------------
// Matrices

std::string matrix_csv(const Dist2& joint) {
  std::string out = "symbol";
  for (std::size_t y = 0; y < joint.cols(); ++y) out += "," + symbol_label(y);
  out += "\n";
  for (std::size_t x = 0; x < joint.rows(); ++x) {
    out += symbol_label(x);
    for (std::size_t y = 0; y < joint.cols(); ++y) out += "," + format_number(joint(x, y));
    out += "\n";
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Dist2& joint) { write_text(path, matrix_csv(joint)); }

Dist2 parse_matrix_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "symbol") throw ValidationError("matrix CSV: missing header");
  const std::size_t cols = rows[0].size() - 1;
  for (std::size_t y = 0; y < cols; ++y) {
    if (parse_symbol_label(rows[0][y + 1]) != y) throw ValidationError("matrix CSV: column labels out of order");
  }
  std::vector<double> p;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != cols + 1) throw ValidationError(fmt::format("matrix CSV: row {} has wrong width", i));
    if (parse_symbol_label(rows[i][0]) != i - 1) throw ValidationError("matrix CSV: row labels out of order");
    for (std::size_t y = 0; y < cols; ++y) p.push_back(to_double(rows[i][y + 1]));
  }
  return Dist2(rows.size() - 1, cols, std::move(p));
}

Dist2 read_matrix_csv(const std::filesystem::path& path) { return parse_matrix_csv(read_text(path)); }

std::string distance_csv(const DistanceMatrix& d) {
  std::string out = "agent";
  for (std::size_t j = 0; j < d.size(); ++j) out += fmt::format(",{}", j);
  out += "\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += fmt::format("{}", i);
    for (std::size_t j = 0; j < d.size(); ++j) out += "," + format_number(d(i, j));
    out += "\n";
  }
  return out;
}

void write_distance_csv(const std::filesystem::path& path, const DistanceMatrix& d) {
  write_text(path, distance_csv(d));
}

DistanceMatrix parse_distance_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "agent") throw ValidationError("distance CSV: missing header");
  const std::size_t n = rows[0].size() - 1;
  if (rows.size() != n + 1) throw ValidationError("distance CSV: not square");
  std::vector<double> d;
  for (std::size_t i = 1; i <= n; ++i) {
    if (rows[i].size() != n + 1) throw ValidationError(fmt::format("distance CSV: row {} has wrong width", i));
    for (std::size_t j = 0; j < n; ++j) d.push_back(to_double(rows[i][j + 1]));
  }
  return DistanceMatrix(n, std::move(d));
}

// ---------------------------------------------------------------------------
// Summary table

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "component,size,type_sizes,I1,I2,I3\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.component, r.size, fmt::join(r.type_sizes, ";"),
                       format_number(r.before), format_number(r.attacked), format_number(r.responded));
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  write_text(path, summary_csv(rows));
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].size() != 6 || rows[0][0] != "component") {
    throw ValidationError("summary CSV: missing header");
  }
  std::vector<SummaryRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 6) throw ValidationError(fmt::format("summary CSV: row {} has wrong width", i));
    SummaryRow s;
    s.component = to_index(r[0]);
    s.size = to_index(r[1]);
    std::vector<std::string> parts;
    boost::split(parts, r[2], boost::is_any_of(";"));
    for (const auto& p : parts) {
      if (!p.empty()) s.type_sizes.push_back(to_index(p));
    }
    s.before = to_double(r[3]);
    s.attacked = to_double(r[4]);
    s.responded = to_double(r[5]);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

json embedding_to_json(const Embedding2D& e) {
  json pts = json::array();
  for (std::size_t i = 0; i < e.points.size(); ++i) {
    pts.push_back({{"x", round_for_output(e.points[i][0])},
                   {"y", round_for_output(e.points[i][1])},
                   {"size", e.sizes[i]},
                   {"component", e.components[i]}});
  }
  return {{"format", "parasim.embedding"}, {"stress", round_for_output(e.stress)}, {"points", pts}};
}

Embedding2D embedding_from_json(const json& doc) {
  try {
    Embedding2D e;
    e.stress = doc.at("stress").get<double>();
    for (const auto& p : doc.at("points")) {
      e.points.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
      e.sizes.push_back(p.at("size").get<std::size_t>());
      e.components.push_back(p.at("component").get<std::size_t>());
    }
    return e;
  } catch (const json::exception& ex) {
    throw ValidationError(fmt::format("embedding document: {}", ex.what()));
  }
}

json report_to_json(const MeasureReport& r) {
  json env = json::array();
  for (double v : r.per_agent_env_info) env.push_back(round_for_output(v));
  json ps = json::array();
  for (const auto& p : r.parasites) {
    ps.push_back({{"agent", p.agent.index},
                  {"blend_kl", round_for_output(p.blend_kl)},
                  {"missing_info", round_for_output(p.missing_info)},
                  {"sensor_info", round_for_output(p.sensor_info)},
                  {"env_info", round_for_output(p.env_info)}});
  }
  return {{"format", "parasim.measures"},
          {"mutual_understanding", round_for_output(r.mutual_understanding)},
          {"avg_env_info", round_for_output(r.avg_env_info)},
          {"identifiability", round_for_output(r.identifiability)},
          {"per_agent_env_info", env},
          {"parasites", ps}};
}

MeasureReport report_from_json(const json& doc) {
  try {
    MeasureReport r;
    r.mutual_understanding = doc.at("mutual_understanding").get<double>();
    r.avg_env_info = doc.at("avg_env_info").get<double>();
    r.identifiability = doc.at("identifiability").get<double>();
    r.per_agent_env_info = doc.at("per_agent_env_info").get<std::vector<double>>();
    for (const auto& p : doc.at("parasites")) {
      ParasiteMeasures pm;
      pm.agent = {p.at("agent").get<std::size_t>()};
      pm.blend_kl = p.at("blend_kl").get<double>();
      pm.missing_info = p.at("missing_info").get<double>();
      pm.sensor_info = p.at("sensor_info").get<double>();
      pm.env_info = p.at("env_info").get<double>();
      r.parasites.push_back(pm);
    }
    return r;
  } catch (const json::exception& ex) {
    throw ValidationError(fmt::format("measure report: {}", ex.what()));
  }
}

json structure_to_json(const StructureReport& s) {
  json comps = json::array();
  for (std::size_t c = 0; c < s.components.size(); ++c) {
    const auto& comp = s.components[c];
    json agents = json::array();
    for (const auto& a : comp.agents) agents.push_back(a.index);
    comps.push_back({{"id", c},
                     {"size", comp.agents.size()},
                     {"type_ids", comp.type_ids},
                     {"type_sizes", comp.type_sizes},
                     {"bipartite_by_type", comp.bipartite_by_type},
                     {"agents", agents}});
  }
  return {{"format", "parasim.structure"},
          {"num_components", s.components.size()},
          {"num_types", s.types.size()},
          {"agent_type", s.agent_type},
          {"components", comps}};
}

}  // namespace parasim
