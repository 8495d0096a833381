#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mslayout/dataset.hpp"
#include "mslayout/geometry.hpp"

namespace mslayout {

struct IouResult {
  double iou = 0.0;
  /// Set when either mask is empty; the IoU is then reported as 0.
  bool degenerate = false;
};

IouResult mask_iou(const PixelMask& a, const PixelMask& b);

/// IoU of the scanline-rasterized polygons on an H×W raster.
IouResult mask_iou(const RegionInstance& a, const RegionInstance& b, std::size_t height,
                   std::size_t width);

/// Dense ground-truth × prediction IoU table.
class IouMatrix {
 public:
  IouMatrix() = default;
  IouMatrix(std::size_t gts, std::size_t preds) : gts_(gts), preds_(preds), v_(gts * preds) {}

  std::size_t gts() const noexcept { return gts_; }
  std::size_t preds() const noexcept { return preds_; }
  double& operator()(std::size_t g, std::size_t p) { return v_[g * preds_ + p]; }
  double operator()(std::size_t g, std::size_t p) const { return v_[g * preds_ + p]; }

 private:
  std::size_t gts_ = 0;
  std::size_t preds_ = 0;
  std::vector<double> v_;
};

struct Match {
  std::size_t gt = 0;
  std::size_t pred = 0;
  double iou = 0.0;
};

struct MatchResult {
  double threshold = 0.0;
  std::vector<Match> matches;
  std::vector<std::size_t> unmatched_gt;
  std::vector<std::size_t> unmatched_pred;
};

/// Greedy matching: predictions in descending score order (ties by index)
/// each take the still-unmatched ground truth with the highest IoU ≥
/// threshold (ties by lower ground-truth index).
MatchResult match_instances(const IouMatrix& ious, std::span<const double> scores,
                            double threshold);

/// Instance-level form; all instances must share document and category and
/// every prediction needs a score.
MatchResult match_instances(std::span<const RegionInstance> gts,
                            std::span<const RegionInstance> preds, double threshold,
                            std::size_t height, std::size_t width);

/// One prediction after matching, for precision/recall accumulation.
struct ScoredHit {
  double score = 0.0;
  bool true_positive = false;
};

/// All-point interpolated AP: predictions sorted by descending score (stable),
/// precision replaced by its running maximum from the right, integrated over
/// recall. The integral is accumulated in extended precision and rounded once.
/// nullopt when there is no ground truth.
std::optional<double> average_precision(std::vector<ScoredHit> hits, std::size_t gt_count);

/// Matching input for one document: IoUs against its ground truth and the
/// prediction scores.
struct DetectionGroup {
  IouMatrix ious;
  std::vector<double> scores;
};

/// Hits of every prediction in `group` at `threshold`, in prediction order.
std::vector<ScoredHit> score_hits(const DetectionGroup& group, double threshold);

/// AP pooled over documents at one IoU threshold.
std::optional<double> average_precision(std::span<const DetectionGroup> groups, double threshold);

/// Mean AP over `thresholds` (defaults to 0.50:0.95:0.05).
std::optional<double> ap_range(std::span<const DetectionGroup> groups,
                               std::span<const double> thresholds);
std::optional<double> ap_range(std::span<const DetectionGroup> groups);

/// 0.50, 0.55, …, 0.95.
const std::vector<double>& default_iou_thresholds();

/// Builds the per-document groups for instances of a single category.
std::vector<DetectionGroup> detection_groups(std::span<const RegionInstance> gts,
                                             std::span<const RegionInstance> preds,
                                             std::size_t height, std::size_t width);

}  // namespace mslayout
