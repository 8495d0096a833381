#include "mslayout/detection.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mslayout/errors.hpp"

namespace mslayout {

IouResult mask_iou(const PixelMask& a, const PixelMask& b) {
  const std::size_t na = a.count(), nb = b.count();
  if (na == 0 || nb == 0) return {0.0, true};
  const std::size_t inter = overlap_count(a, b);
  return {static_cast<double>(inter) / static_cast<double>(na + nb - inter), false};
}

IouResult mask_iou(const RegionInstance& a, const RegionInstance& b, std::size_t height,
                   std::size_t width) {
  if (signed_area(a.polygon) == 0.0 || signed_area(b.polygon) == 0.0) return {0.0, true};
  return mask_iou(rasterize(a.polygon, height, width), rasterize(b.polygon, height, width));
}

namespace {

std::vector<std::size_t> by_descending_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<double> required_scores(std::span<const RegionInstance> preds) {
  std::vector<double> scores;
  scores.reserve(preds.size());
  for (const auto& p : preds) {
    if (!p.score) throw ValidationError("prediction in document '" + p.document_id + "' has no score");
    scores.push_back(*p.score);
  }
  return scores;
}

}  // namespace

MatchResult match_instances(const IouMatrix& ious, std::span<const double> scores,
                            double threshold) {
  if (scores.size() != ious.preds()) throw ValidationError("one score per prediction required");
  MatchResult result;
  result.threshold = threshold;
  std::vector<bool> gt_taken(ious.gts(), false);
  for (std::size_t p : by_descending_score(scores)) {
    std::size_t best = ious.gts();
    double best_iou = threshold;
    for (std::size_t g = 0; g < ious.gts(); ++g) {
      if (gt_taken[g]) continue;
      const double v = ious(g, p);
      if (v >= best_iou && (best == ious.gts() || v > ious(best, p))) {
        best = g;
        best_iou = v;
      }
    }
    if (best == ious.gts()) {
      result.unmatched_pred.push_back(p);
    } else {
      gt_taken[best] = true;
      result.matches.push_back({best, p, ious(best, p)});
    }
  }
  for (std::size_t g = 0; g < ious.gts(); ++g) {
    if (!gt_taken[g]) result.unmatched_gt.push_back(g);
  }
  std::sort(result.unmatched_pred.begin(), result.unmatched_pred.end());
  return result;
}

namespace {

void require_shared_scope(std::span<const RegionInstance> gts,
                          std::span<const RegionInstance> preds, bool same_document) {
  const RegionInstance* first = !gts.empty() ? &gts.front() : (!preds.empty() ? &preds.front() : nullptr);
  if (!first) return;
  const auto check = [&](const RegionInstance& r) {
    if (r.category != first->category) throw ValidationError("instances span several categories");
    if (same_document && r.document_id != first->document_id) {
      throw ValidationError("instances span several documents");
    }
  };
  for (const auto& r : gts) check(r);
  for (const auto& r : preds) check(r);
}

IouMatrix iou_matrix(std::span<const RegionInstance> gts, std::span<const RegionInstance> preds,
                     std::size_t height, std::size_t width) {
  std::vector<PixelMask> gm, pm;
  for (const auto& g : gts) gm.push_back(rasterize(g.polygon, height, width));
  for (const auto& p : preds) pm.push_back(rasterize(p.polygon, height, width));
  IouMatrix m(gts.size(), preds.size());
  for (std::size_t g = 0; g < gm.size(); ++g) {
    for (std::size_t p = 0; p < pm.size(); ++p) m(g, p) = mask_iou(gm[g], pm[p]).iou;
  }
  return m;
}

}  // namespace

MatchResult match_instances(std::span<const RegionInstance> gts,
                            std::span<const RegionInstance> preds, double threshold,
                            std::size_t height, std::size_t width) {
  require_shared_scope(gts, preds, true);
  const auto scores = required_scores(preds);
  return match_instances(iou_matrix(gts, preds, height, width), scores, threshold);
}

std::optional<double> average_precision(std::vector<ScoredHit> hits, std::size_t gt_count) {
  if (gt_count == 0) return std::nullopt;
  std::stable_sort(hits.begin(), hits.end(),
                   [](const ScoredHit& a, const ScoredHit& b) { return a.score > b.score; });
  const std::size_t n = hits.size();
  std::vector<long double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += hits[i].true_positive ? 1 : 0;
    precision[i] = static_cast<long double>(tp) / static_cast<long double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    if (hits[i].true_positive) sum += precision[i];
  }
  return static_cast<double>(sum / static_cast<long double>(gt_count));
}

std::vector<ScoredHit> score_hits(const DetectionGroup& group, double threshold) {
  const MatchResult m = match_instances(group.ious, group.scores, threshold);
  std::vector<ScoredHit> hits(group.scores.size());
  for (std::size_t p = 0; p < hits.size(); ++p) hits[p].score = group.scores[p];
  for (const auto& match : m.matches) hits[match.pred].true_positive = true;
  return hits;
}

std::optional<double> average_precision(std::span<const DetectionGroup> groups,
                                        double threshold) {
  std::vector<ScoredHit> hits;
  std::size_t gt_count = 0;
  for (const auto& g : groups) {
    const auto h = score_hits(g, threshold);
    hits.insert(hits.end(), h.begin(), h.end());
    gt_count += g.ious.gts();
  }
  return average_precision(std::move(hits), gt_count);
}

std::optional<double> ap_range(std::span<const DetectionGroup> groups,
                               std::span<const double> thresholds) {
  if (thresholds.empty()) throw ValidationError("at least one IoU threshold is required");
  double sum = 0.0;
  for (double t : thresholds) {
    const auto ap = average_precision(groups, t);
    if (!ap) return std::nullopt;
    sum += *ap;
  }
  return sum / static_cast<double>(thresholds.size());
}

std::optional<double> ap_range(std::span<const DetectionGroup> groups) {
  return ap_range(groups, default_iou_thresholds());
}

const std::vector<double>& default_iou_thresholds() {
  static const std::vector<double> t = {0.50, 0.55, 0.60, 0.65, 0.70,
                                        0.75, 0.80, 0.85, 0.90, 0.95};
  return t;
}

std::vector<DetectionGroup> detection_groups(std::span<const RegionInstance> gts,
                                             std::span<const RegionInstance> preds,
                                             std::size_t height, std::size_t width) {
  require_shared_scope(gts, preds, false);
  std::vector<std::string> docs;
  const auto note = [&](const std::string& id) {
    if (std::find(docs.begin(), docs.end(), id) == docs.end()) docs.push_back(id);
  };
  for (const auto& g : gts) note(g.document_id);
  for (const auto& p : preds) note(p.document_id);

  std::vector<DetectionGroup> groups;
  for (const auto& id : docs) {
    std::vector<RegionInstance> dg, dp;
    for (const auto& g : gts) {
      if (g.document_id == id) dg.push_back(g);
    }
    for (const auto& p : preds) {
      if (p.document_id == id) dp.push_back(p);
    }
    groups.push_back({iou_matrix(dg, dp, height, width), required_scores(dp)});
  }
  return groups;
}

}  // namespace mslayout
