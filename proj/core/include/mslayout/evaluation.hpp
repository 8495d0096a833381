#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mslayout/dataset.hpp"
#include "mslayout/detection.hpp"
#include "mslayout/hausdorff.hpp"

namespace mslayout {

struct EvalConfig {
  /// Thresholds averaged into AP; AP50 and AP75 are always reported.
  std::vector<double> iou_thresholds = default_iou_thresholds();
  /// Arc-length spacing of the boundary point sets, in pixels.
  double spacing = 1.0;
  /// Documents evaluated concurrently; the report does not depend on it.
  std::size_t jobs = 1;
};

/// Scores of one ground-truth region.
struct InstanceEvaluation {
  Category category = Category::CLS;
  /// Best IoU against any prediction of the same category, 0 without one.
  double iou = 0.0;
  /// Boundary distances to the prediction matched at IoU 0.5, if any.
  std::optional<BoundaryMetrics> boundary;
};

struct DocumentEvaluation {
  std::string document_id;
  Collection collection = Collection::PIH;
  std::vector<InstanceEvaluation> instances;
  /// Matching input per category; only categories with ground truth in this
  /// document take part in AP.
  std::array<DetectionGroup, kCategoryCount> groups;
  /// Categories predicted here without any ground truth.
  std::vector<Category> unmatched_categories;
};

/// Per-document work: rasterize, match at IoU 0.5 and measure boundaries.
/// `pred` may be null when the document has no predictions.
DocumentEvaluation evaluate_document(const DocumentRecord& gt, const DocumentRecord* pred,
                                     const EvalConfig& config);

enum class Scope { Overall, Collection, Category, Document };

std::string_view to_string(Scope s);

/// Report columns, in table order. Absent values had no contributing item.
struct MetricValues {
  std::optional<double> hd;
  std::optional<double> hd95;
  std::optional<double> avg_hd;
  std::optional<double> iou;
  std::optional<double> ap;
  std::optional<double> ap50;
  std::optional<double> ap75;
};

struct MetricRow {
  Scope scope = Scope::Overall;
  std::string key;
  std::size_t documents = 0;
  std::size_t instances = 0;
  /// Ground-truth regions matched at IoU 0.5 (the HD-family population).
  std::size_t matched = 0;
  MetricValues values;
};

struct MetricReport {
  /// Overall, then the four collections, the nine categories and every
  /// document in input order.
  std::vector<MetricRow> rows;
  std::vector<std::string> warnings;
};

/// Document rows average over the document's regions (AP over its
/// ground-truth categories); overall and collection rows average document
/// rows; category rows pool every region of the category across documents.
MetricReport aggregate(std::span<const DocumentEvaluation> documents, const EvalConfig& config);

/// Validates the pairing of the two manifests, evaluates every document
/// (concurrently when config.jobs > 1) and aggregates.
MetricReport evaluate(std::span<const DocumentRecord> gt, std::span<const DocumentRecord> pred,
                      const EvalConfig& config = {});

/// Machine-readable writers keep full round-trip precision; missing values
/// are empty cells / null.
std::string to_csv(const MetricReport& report);
std::string to_json(const MetricReport& report);

/// Fixed two-decimal table; IoU and AP columns are scaled to percent.
std::string to_table(const MetricReport& report);

/// Parses "a:b:s" into a, a+s, …, ≤ b (rounded to 6 decimals).
std::vector<double> parse_threshold_range(std::string_view text);

}  // namespace mslayout
