#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mslayout/geometry.hpp"

namespace mslayout {

enum class Collection { PIH, Bhoomi, ASR, Jain };
enum class Split { Train, Validation, Test };
enum class Category { CLS, CC, Hv, Hp, PB, LM, DP, PD, BL };

inline constexpr std::size_t kCollectionCount = 4;
inline constexpr std::size_t kSplitCount = 3;
inline constexpr std::size_t kCategoryCount = 9;

inline constexpr std::array<Collection, kCollectionCount> kCollections = {
    Collection::PIH, Collection::Bhoomi, Collection::ASR, Collection::Jain};
inline constexpr std::array<Split, kSplitCount> kSplits = {Split::Train, Split::Validation,
                                                           Split::Test};
inline constexpr std::array<Category, kCategoryCount> kCategories = {
    Category::CLS, Category::CC, Category::Hv, Category::Hp, Category::PB,
    Category::LM,  Category::DP, Category::PD, Category::BL};

struct CategoryInfo {
  Category id;
  std::string_view abbrev;
  std::string_view name;
};

/// The nine region classes, in reporting order.
const std::array<CategoryInfo, kCategoryCount>& category_table();

std::string_view to_string(Collection c);
std::string_view to_string(Split s);
std::string_view to_string(Category c);

std::optional<Collection> parse_collection(std::string_view s);
std::optional<Split> parse_split(std::string_view s);
std::optional<Category> parse_category(std::string_view abbrev);

constexpr std::size_t index_of(Collection c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index_of(Split s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index_of(Category c) { return static_cast<std::size_t>(c); }

/// One annotated or predicted layout region, in image pixels (x right, y down).
struct RegionInstance {
  std::string document_id;
  Collection collection = Collection::PIH;
  Category category = Category::CLS;
  Polygon polygon;
  std::optional<double> score;

  friend bool operator==(const RegionInstance&, const RegionInstance&) = default;
};

struct DocumentRecord {
  std::string document_id;
  Collection collection = Collection::PIH;
  Split split = Split::Train;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<RegionInstance> regions;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

struct ManifestOptions {
  /// Prediction files must carry a confidence on every region.
  bool require_scores = false;
};

struct Manifest {
  std::vector<DocumentRecord> records;
  /// Non-fatal findings, e.g. vertices clamped into the image.
  std::vector<std::string> warnings;
};

/// Parses one JSON document per line; blank lines are skipped. Throws
/// ManifestError naming the offending line and field.
Manifest parse_manifest(std::istream& in, const ManifestOptions& options = {});
Manifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});

std::string manifest_line(const DocumentRecord& record);
void save_manifest(std::span<const DocumentRecord> records, std::ostream& out);
void save_manifest(std::span<const DocumentRecord> records, const std::filesystem::path& path);

/// Document counts per collection × split and region counts per
/// collection × category.
struct DatasetStats {
  std::array<std::array<std::size_t, kSplitCount>, kCollectionCount> documents{};
  std::array<std::array<std::size_t, kCategoryCount>, kCollectionCount> regions{};

  std::size_t documents_in(Collection c) const;
  std::size_t documents_in(Split s) const;
  std::size_t total_documents() const;
  std::size_t regions_of(Category k) const;
};

DatasetStats split_stats(std::span<const DocumentRecord> records);

/// Plain-text tables: collections × splits with totals, and collections ×
/// categories with a combined row.
std::string format_collection_table(const DatasetStats& stats);
std::string format_region_table(const DatasetStats& stats);

}  // namespace mslayout
