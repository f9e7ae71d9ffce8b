#pragma once

// Embeddings and file emission.
//
// Every number written by this module goes through format_number (12
// significant digits, "-0" folded to "0"), every file ends with '\n', and
// every reader accepts what the matching writer produced.  Column layouts are
// documented in docs/formats.md.

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "parasim/metrics.hpp"
#include "parasim/optimizer.hpp"
#include "parasim/probkit.hpp"

namespace parasim {

struct Embedding2D {
  std::vector<std::array<double, 2>> points;
  std::vector<std::size_t> sizes;       // agents represented by each point
  std::vector<std::size_t> components;  // component id of each point
  double stress = 0.0;                  // RMS error over pairwise distances
};

/// Classical (Torgerson) MDS onto the top two axes.  Points are centered,
/// axes come in descending eigenvalue order and each axis is flipped so its
/// first nonzero coordinate is positive.  Negative eigenvalues are clamped to
/// zero.  Sizes default to 1 and components to 0.  Throws UsageError on a
/// non-symmetric matrix or a nonzero diagonal.
Embedding2D mds_embed(const DistanceMatrix& d);

/// One point per code type, sized by its member count and labelled with the
/// component holding most of its members (lowest id on ties).
Embedding2D type_embedding(const Population& pop, const StructureReport& structure);

/// Distance matrix between the representative codes of each type.
DistanceMatrix type_distance_matrix(const Population& pop, const StructureReport& structure);

// ---------------------------------------------------------------------------
// Text helpers

std::string format_number(double v);

/// Value as it will read back after format_number, for JSON emission.
double round_for_output(double v);

/// Writes `text` to `path`, creating parent directories.  Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Histories: generation,best_fitness,mean_fitness,<diagnostics...>

std::string history_csv(const RunHistory& h);
void write_history_csv(const std::filesystem::path& path, const RunHistory& h);
RunHistory parse_history_csv(const std::string& text);
RunHistory read_history_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Joint-message matrices: header "symbol,x1,...,xS", one row per symbol.

std::string matrix_csv(const Dist2& joint);
void write_matrix_csv(const std::filesystem::path& path, const Dist2& joint);
Dist2 parse_matrix_csv(const std::string& text);
Dist2 read_matrix_csv(const std::filesystem::path& path);

// Code-distance matrices: header "agent,0,...,N-1".
std::string distance_csv(const DistanceMatrix& d);
void write_distance_csv(const std::filesystem::path& path, const DistanceMatrix& d);
DistanceMatrix parse_distance_csv(const std::string& text);

// ---------------------------------------------------------------------------
// Summary table: component,size,type_sizes,I1,I2,I3
// type_sizes are ';'-joined.  I1..I3 are the component's mutual understanding
// before the attack, after it and after the response.

struct SummaryRow {
  std::size_t component = 0;
  std::size_t size = 0;
  std::vector<std::size_t> type_sizes;
  double before = 0.0;
  double attacked = 0.0;
  double responded = 0.0;
};

std::string summary_csv(const std::vector<SummaryRow>& rows);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary_csv(const std::string& text);

// ---------------------------------------------------------------------------
// JSON documents

nlohmann::json embedding_to_json(const Embedding2D& e);
Embedding2D embedding_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const MeasureReport& r);
MeasureReport report_from_json(const nlohmann::json& doc);

nlohmann::json structure_to_json(const StructureReport& s);

}  // namespace parasim
