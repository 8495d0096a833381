#include "mslayout/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mslayout/errors.hpp"

namespace mslayout {

namespace {

constexpr std::array<std::string_view, kCollectionCount> kCollectionNames = {"PIH", "Bhoomi",
                                                                            "ASR", "Jain"};
constexpr std::array<std::string_view, kSplitCount> kSplitNames = {"train", "validation", "test"};

}  // namespace

const std::array<CategoryInfo, kCategoryCount>& category_table() {
  static constexpr std::array<CategoryInfo, kCategoryCount> table = {{
      {Category::CLS, "CLS", "Character Line Segment"},
      {Category::CC, "CC", "Character Component"},
      {Category::Hv, "Hv", "Hole (Virtual)"},
      {Category::Hp, "Hp", "Hole (Physical)"},
      {Category::PB, "PB", "Page Boundary"},
      {Category::LM, "LM", "Library Marker"},
      {Category::DP, "DP", "Decorator/Picture"},
      {Category::PD, "PD", "Physical Degradation"},
      {Category::BL, "BL", "Boundary Line"},
  }};
  return table;
}

std::string_view to_string(Collection c) { return kCollectionNames[index_of(c)]; }
std::string_view to_string(Split s) { return kSplitNames[index_of(s)]; }
std::string_view to_string(Category c) { return category_table()[index_of(c)].abbrev; }

std::optional<Collection> parse_collection(std::string_view s) {
  for (auto c : kCollections) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view s) {
  for (auto v : kSplits) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<Category> parse_category(std::string_view abbrev) {
  for (const auto& info : category_table()) {
    if (info.abbrev == abbrev) return info.id;
  }
  return std::nullopt;
}

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string valid_abbreviations() {
  std::string out;
  for (const auto& info : category_table()) {
    if (!out.empty()) out += ", ";
    out += info.abbrev;
  }
  return out;
}

const json& require(const json& obj, const char* key, std::size_t line, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ManifestError(line, path + key, "missing field");
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line, "");
  if (!v.is_string()) throw ManifestError(line, key, "expected a string");
  return v.get<std::string>();
}

std::size_t require_dimension(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line, "");
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ManifestError(line, key, "expected a positive integer");
  }
  return v.get<std::size_t>();
}

RegionInstance parse_region(const json& r, const DocumentRecord& doc, std::size_t line,
                            std::size_t index, const ManifestOptions& options,
                            std::vector<std::string>& warnings) {
  const std::string path = fmt::format("regions[{}].", index);
  if (!r.is_object()) throw ManifestError(line, fmt::format("regions[{}]", index), "expected an object");

  RegionInstance region;
  region.document_id = doc.document_id;
  region.collection = doc.collection;

  const json& cat = require(r, "category_abbrev", line, path);
  if (!cat.is_string()) throw ManifestError(line, path + "category_abbrev", "expected a string");
  const auto parsed = parse_category(cat.get<std::string>());
  if (!parsed) {
    throw ManifestError(line, path + "category_abbrev",
                        fmt::format("unknown category '{}'; valid abbreviations: {}",
                                    cat.get<std::string>(), valid_abbreviations()));
  }
  region.category = *parsed;

  const json& pts = require(r, "points", line, path);
  if (!pts.is_array()) throw ManifestError(line, path + "points", "expected an array of [x, y]");
  bool clamped = false;
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ManifestError(line, path + "points", "each point must be [x, y]");
    }
    Point2 q{p[0].get<double>(), p[1].get<double>()};
    if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
      throw ManifestError(line, path + "points", "non-finite coordinate");
    }
    const Point2 inside{std::clamp(q.x, 0.0, static_cast<double>(doc.width)),
                        std::clamp(q.y, 0.0, static_cast<double>(doc.height))};
    clamped = clamped || !(inside == q);
    region.polygon.push_back(inside);
  }
  if (clamped) {
    warnings.push_back(fmt::format("line {}: {}points clamped to the {}x{} image", line, path,
                                   doc.width, doc.height));
  }
  if (region.polygon.size() < 3) {
    throw ManifestError(line, path + "points",
                        fmt::format("polygon needs at least 3 vertices, got {}",
                                    region.polygon.size()));
  }
  if (!is_simple(region.polygon) || signed_area(region.polygon) == 0.0) {
    throw ManifestError(line, path + "points", "polygon is degenerate or self-intersecting");
  }

  if (auto it = r.find("score"); it != r.end() && !it->is_null()) {
    if (!it->is_number()) throw ManifestError(line, path + "score", "expected a number");
    const double s = it->get<double>();
    if (!(s >= 0.0 && s <= 1.0)) throw ManifestError(line, path + "score", "score must lie in [0, 1]");
    region.score = s;
  } else if (options.require_scores) {
    throw ManifestError(line, path + "score", "predictions must carry a score");
  }
  return region;
}

DocumentRecord parse_document(const json& j, std::size_t line, const ManifestOptions& options,
                              std::vector<std::string>& warnings) {
  if (!j.is_object()) throw ManifestError(line, "<document>", "expected a JSON object");
  DocumentRecord doc;
  doc.document_id = require_string(j, "document_id", line);
  if (doc.document_id.empty()) throw ManifestError(line, "document_id", "must not be empty");

  const std::string collection = require_string(j, "collection", line);
  const auto c = parse_collection(collection);
  if (!c) throw ManifestError(line, "collection", "unknown collection '" + collection + "'");
  doc.collection = *c;

  const std::string split = require_string(j, "split", line);
  const auto s = parse_split(split);
  if (!s) throw ManifestError(line, "split", "unknown split '" + split + "'");
  doc.split = *s;

  doc.height = require_dimension(j, "height", line);
  doc.width = require_dimension(j, "width", line);

  const json& regions = require(j, "regions", line, "");
  if (!regions.is_array()) throw ManifestError(line, "regions", "expected an array");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    doc.regions.push_back(parse_region(regions[i], doc, line, i, options, warnings));
  }
  return doc;
}

ordered_json coordinate(double v) {
  // Integral coordinates are written without a fractional part.
  if (std::abs(v) < 9007199254740992.0 && v == std::trunc(v)) {
    return ordered_json(static_cast<long long>(v));
  }
  return ordered_json(v);
}

}  // namespace

Manifest parse_manifest(std::istream& in, const ManifestOptions& options) {
  Manifest m;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ManifestError(line, "<json>", e.what());
    }
    m.records.push_back(parse_document(j, line, options, m.warnings));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  return parse_manifest(in, options);
}

std::string manifest_line(const DocumentRecord& record) {
  ordered_json j;
  j["document_id"] = record.document_id;
  j["collection"] = std::string(to_string(record.collection));
  j["split"] = std::string(to_string(record.split));
  j["height"] = record.height;
  j["width"] = record.width;
  ordered_json regions = ordered_json::array();
  for (const auto& r : record.regions) {
    ordered_json jr;
    jr["category_abbrev"] = std::string(to_string(r.category));
    ordered_json pts = ordered_json::array();
    for (const auto& p : r.polygon) pts.push_back(ordered_json::array({coordinate(p.x), coordinate(p.y)}));
    jr["points"] = std::move(pts);
    if (r.score) jr["score"] = *r.score;
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);
  return j.dump();
}

void save_manifest(std::span<const DocumentRecord> records, std::ostream& out) {
  for (const auto& r : records) out << manifest_line(r) << '\n';
}

void save_manifest(std::span<const DocumentRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  save_manifest(records, out);
}

std::size_t DatasetStats::documents_in(Collection c) const {
  std::size_t n = 0;
  for (auto v : documents[index_of(c)]) n += v;
  return n;
}

std::size_t DatasetStats::documents_in(Split s) const {
  std::size_t n = 0;
  for (const auto& row : documents) n += row[index_of(s)];
  return n;
}

std::size_t DatasetStats::total_documents() const {
  std::size_t n = 0;
  for (auto c : kCollections) n += documents_in(c);
  return n;
}

std::size_t DatasetStats::regions_of(Category k) const {
  std::size_t n = 0;
  for (const auto& row : regions) n += row[index_of(k)];
  return n;
}

DatasetStats split_stats(std::span<const DocumentRecord> records) {
  DatasetStats s;
  for (const auto& doc : records) {
    ++s.documents[index_of(doc.collection)][index_of(doc.split)];
    for (const auto& r : doc.regions) ++s.regions[index_of(doc.collection)][index_of(r.category)];
  }
  return s;
}

std::string format_collection_table(const DatasetStats& stats) {
  std::string out = fmt::format("{:<10}{:>8}{:>12}{:>8}{:>8}\n", "", "Train", "Validation",
                                "Test", "Total");
  for (auto c : kCollections) {
    const auto& row = stats.documents[index_of(c)];
    out += fmt::format("{:<10}{:>8}{:>12}{:>8}{:>8}\n", to_string(c), row[0], row[1], row[2],
                       stats.documents_in(c));
  }
  out += fmt::format("{:<10}{:>8}{:>12}{:>8}{:>8}\n", "Total", stats.documents_in(Split::Train),
                     stats.documents_in(Split::Validation), stats.documents_in(Split::Test),
                     stats.total_documents());
  return out;
}

std::string format_region_table(const DatasetStats& stats) {
  std::string out = fmt::format("{:<10}", "");
  for (const auto& info : category_table()) out += fmt::format("{:>8}", info.abbrev);
  out += '\n';
  for (auto c : kCollections) {
    out += fmt::format("{:<10}", to_string(c));
    for (auto v : stats.regions[index_of(c)]) out += fmt::format("{:>8}", v);
    out += '\n';
  }
  out += fmt::format("{:<10}", "Combined");
  for (auto k : kCategories) out += fmt::format("{:>8}", stats.regions_of(k));
  out += '\n';
  return out;
}

}  // namespace mslayout
