#include "mslayout/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mslayout/errors.hpp"

namespace mslayout {

namespace {

constexpr double kMatchThreshold = 0.5;

struct Accumulator {
  double sum = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    ++n;
  }
  void add(const std::optional<double>& v) {
    if (v) add(*v);
  }
  std::optional<double> mean() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

struct ValueAccumulators {
  Accumulator hd, hd95, avg_hd, iou, ap, ap50, ap75;

  void add(const MetricValues& v) {
    hd.add(v.hd);
    hd95.add(v.hd95);
    avg_hd.add(v.avg_hd);
    iou.add(v.iou);
    ap.add(v.ap);
    ap50.add(v.ap50);
    ap75.add(v.ap75);
  }
  void add_boundary(const BoundaryMetrics& b) {
    hd.add(b.hd);
    hd95.add(b.hd95);
    avg_hd.add(b.avg_hd);
  }
  MetricValues means() const {
    return {hd.mean(), hd95.mean(), avg_hd.mean(), iou.mean(), ap.mean(), ap50.mean(), ap75.mean()};
  }
};

}  // namespace

DocumentEvaluation evaluate_document(const DocumentRecord& gt, const DocumentRecord* pred,
                                     const EvalConfig& config) {
  DocumentEvaluation out;
  out.document_id = gt.document_id;
  out.collection = gt.collection;
  out.instances.resize(gt.regions.size());

  const std::vector<RegionInstance> none;
  const auto& pred_regions = pred ? pred->regions : none;

  std::vector<PixelMask> gt_masks, pred_masks;
  for (const auto& r : gt.regions) gt_masks.push_back(rasterize(r.polygon, gt.height, gt.width));
  for (const auto& r : pred_regions) {
    pred_masks.push_back(rasterize(r.polygon, gt.height, gt.width));
  }

  for (Category k : kCategories) {
    std::vector<std::size_t> gi, pi;
    for (std::size_t i = 0; i < gt.regions.size(); ++i) {
      if (gt.regions[i].category == k) gi.push_back(i);
    }
    for (std::size_t i = 0; i < pred_regions.size(); ++i) {
      if (pred_regions[i].category == k) pi.push_back(i);
    }
    if (gi.empty() && !pi.empty()) out.unmatched_categories.push_back(k);

    DetectionGroup& group = out.groups[index_of(k)];
    group.ious = IouMatrix(gi.size(), pi.size());
    for (std::size_t p = 0; p < pi.size(); ++p) {
      const auto& s = pred_regions[pi[p]].score;
      if (!s) throw ValidationError("document '" + gt.document_id + "': prediction without score");
      group.scores.push_back(*s);
    }
    for (std::size_t g = 0; g < gi.size(); ++g) {
      for (std::size_t p = 0; p < pi.size(); ++p) {
        group.ious(g, p) = mask_iou(gt_masks[gi[g]], pred_masks[pi[p]]).iou;
      }
    }

    for (std::size_t g = 0; g < gi.size(); ++g) {
      auto& inst = out.instances[gi[g]];
      inst.category = k;
      for (std::size_t p = 0; p < pi.size(); ++p) inst.iou = std::max(inst.iou, group.ious(g, p));
    }
    const MatchResult matched = match_instances(group.ious, group.scores, kMatchThreshold);
    for (const auto& m : matched.matches) {
      const auto a = boundary_points(gt.regions[gi[m.gt]].polygon, config.spacing);
      const auto b = boundary_points(pred_regions[pi[m.pred]].polygon, config.spacing);
      out.instances[gi[m.gt]].boundary = boundary_metrics(a, b);
    }
  }
  return out;
}

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::Overall: return "overall";
    case Scope::Collection: return "collection";
    case Scope::Category: return "category";
    case Scope::Document: return "document";
  }
  return "?";
}

namespace {

MetricRow document_row(const DocumentEvaluation& doc, const EvalConfig& config) {
  MetricRow row{Scope::Document, doc.document_id, 1, doc.instances.size(), 0, {}};
  ValueAccumulators acc;
  for (const auto& inst : doc.instances) {
    acc.iou.add(inst.iou);
    if (inst.boundary) {
      acc.add_boundary(*inst.boundary);
      ++row.matched;
    }
  }
  for (Category k : kCategories) {
    const auto& group = doc.groups[index_of(k)];
    if (group.ious.gts() == 0) continue;
    const std::span<const DetectionGroup> one(&group, 1);
    acc.ap.add(ap_range(one, config.iou_thresholds));
    acc.ap50.add(average_precision(one, 0.50));
    acc.ap75.add(average_precision(one, 0.75));
  }
  row.values = acc.means();
  return row;
}

MetricRow document_mean(Scope scope, std::string key, std::span<const MetricRow> doc_rows,
                        std::span<const std::size_t> members) {
  MetricRow row{scope, std::move(key), members.size(), 0, 0, {}};
  ValueAccumulators acc;
  for (std::size_t i : members) {
    row.instances += doc_rows[i].instances;
    row.matched += doc_rows[i].matched;
    acc.add(doc_rows[i].values);
  }
  row.values = acc.means();
  return row;
}

MetricRow category_row(Category k, std::span<const DocumentEvaluation> documents,
                       const EvalConfig& config) {
  MetricRow row{Scope::Category, std::string(to_string(k)), 0, 0, 0, {}};
  ValueAccumulators acc;
  std::vector<DetectionGroup> groups;
  for (const auto& doc : documents) {
    bool present = false;
    for (const auto& inst : doc.instances) {
      if (inst.category != k) continue;
      present = true;
      ++row.instances;
      acc.iou.add(inst.iou);
      if (inst.boundary) {
        acc.add_boundary(*inst.boundary);
        ++row.matched;
      }
    }
    row.documents += present ? 1 : 0;
    groups.push_back(doc.groups[index_of(k)]);
  }
  acc.ap.add(ap_range(groups, config.iou_thresholds));
  acc.ap50.add(average_precision(groups, 0.50));
  acc.ap75.add(average_precision(groups, 0.75));
  row.values = acc.means();
  return row;
}

}  // namespace

MetricReport aggregate(std::span<const DocumentEvaluation> documents, const EvalConfig& config) {
  MetricReport report;
  std::vector<MetricRow> doc_rows;
  doc_rows.reserve(documents.size());
  for (const auto& doc : documents) {
    doc_rows.push_back(document_row(doc, config));
    for (Category k : doc.unmatched_categories) {
      report.warnings.push_back(fmt::format(
          "document '{}': {} predicted without ground truth; excluded from document AP",
          doc.document_id, to_string(k)));
    }
  }

  std::vector<std::size_t> all(documents.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  report.rows.push_back(document_mean(Scope::Overall, "all", doc_rows, all));

  for (Collection c : kCollections) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < documents.size(); ++i) {
      if (documents[i].collection == c) members.push_back(i);
    }
    if (members.empty()) {
      report.warnings.push_back(fmt::format("collection {} has no documents", to_string(c)));
    }
    report.rows.push_back(
        document_mean(Scope::Collection, std::string(to_string(c)), doc_rows, members));
  }

  for (Category k : kCategories) {
    report.rows.push_back(category_row(k, documents, config));
    if (report.rows.back().instances == 0) {
      report.warnings.push_back(
          fmt::format("category {} has no ground-truth regions", to_string(k)));
    }
  }

  for (auto& row : doc_rows) report.rows.push_back(std::move(row));
  return report;
}

MetricReport evaluate(std::span<const DocumentRecord> gt, std::span<const DocumentRecord> pred,
                      const EvalConfig& config) {
  if (gt.empty()) throw ValidationError("ground-truth manifest contains no documents");
  if (config.iou_thresholds.empty()) throw ValidationError("no IoU thresholds given");
  for (double t : config.iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("IoU thresholds must lie in (0, 1]");
  }
  if (!(config.spacing > 0.0)) throw ValidationError("boundary spacing must be positive");

  std::map<std::string, std::size_t> gt_index;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_index.emplace(gt[i].document_id, i).second) {
      throw ValidationError("duplicate ground-truth document '" + gt[i].document_id + "'");
    }
  }
  std::vector<const DocumentRecord*> paired(gt.size(), nullptr);
  for (const auto& p : pred) {
    const auto it = gt_index.find(p.document_id);
    if (it == gt_index.end()) {
      throw ValidationError("prediction for unknown document '" + p.document_id + "'");
    }
    const DocumentRecord& g = gt[it->second];
    if (paired[it->second]) {
      throw ValidationError("duplicate prediction document '" + p.document_id + "'");
    }
    if (p.collection != g.collection) {
      throw ValidationError("document '" + p.document_id + "': collection differs from ground truth");
    }
    if (p.height != g.height || p.width != g.width) {
      throw ValidationError("document '" + p.document_id + "': image size differs from ground truth");
    }
    paired[it->second] = &p;
  }

  std::vector<DocumentEvaluation> results(gt.size());
  std::vector<std::exception_ptr> errors(gt.size());
  const auto work = [&](std::size_t i) {
    try {
      results[i] = evaluate_document(gt[i], paired[i], config);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, gt.size());
  if (jobs == 1) {
    for (std::size_t i = 0; i < gt.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < gt.size();) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return aggregate(results, config);
}

namespace {

constexpr const char* kValueColumns[] = {"HD", "HD95", "AvgHD", "IoU", "AP", "AP50", "AP75"};

std::array<std::optional<double>, 7> columns(const MetricValues& v) {
  return {v.hd, v.hd95, v.avg_hd, v.iou, v.ap, v.ap50, v.ap75};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const MetricReport& report) {
  std::string out = "scope,key,documents,instances,matched";
  for (const char* c : kValueColumns) out += fmt::format(",{}", c);
  out += '\n';
  for (const auto& row : report.rows) {
    out += fmt::format("{},{},{},{},{}", to_string(row.scope), csv_field(row.key), row.documents,
                       row.instances, row.matched);
    for (const auto& v : columns(row.values)) {
      out += ',';
      if (v) out += fmt::format("{}", *v);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const MetricReport& report) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["scope"] = to_string(row.scope);
    r["key"] = row.key;
    r["documents"] = row.documents;
    r["instances"] = row.instances;
    r["matched"] = row.matched;
    const auto vals = columns(row.values);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      r[kValueColumns[i]] = vals[i] ? ordered_json(*vals[i]) : ordered_json(nullptr);
    }
    rows.push_back(std::move(r));
  }
  ordered_json doc;
  doc["columns"] = kValueColumns;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string to_table(const MetricReport& report) {
  std::size_t key_width = 8;
  for (const auto& row : report.rows) key_width = std::max(key_width, row.key.size());

  std::string out = fmt::format("{:<10}  {:<{}}  {:>5}  {:>6}  {:>7}", "scope", "key", key_width,
                                "docs", "inst", "matched");
  for (const char* c : kValueColumns) out += fmt::format("  {:>7}", c);
  out += '\n';
  for (const auto& row : report.rows) {
    out += fmt::format("{:<10}  {:<{}}  {:>5}  {:>6}  {:>7}", to_string(row.scope), row.key,
                       key_width, row.documents, row.instances, row.matched);
    const auto vals = columns(row.values);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!vals[i]) {
        out += fmt::format("  {:>7}", "-");
      } else {
        const double scale = i >= 3 ? 100.0 : 1.0;
        out += fmt::format("  {:>7.2f}", *vals[i] * scale);
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<double> parse_threshold_range(std::string_view text) {
  const auto fail = [&] {
    return ValidationError("invalid IoU threshold range '" + std::string(text) +
                           "', expected a:b:s");
  };
  std::vector<double> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    const std::string piece(text.substr(pos, colon == std::string_view::npos ? text.npos : colon - pos));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != piece.size()) throw fail();
    parts.push_back(v);
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) parts = {parts[0], parts[0], 1.0};
  if (parts.size() != 3) throw fail();
  const double a = parts[0], b = parts[1], s = parts[2];
  if (!(a > 0.0 && b <= 1.0 && a <= b && s > 0.0)) {
    throw ValidationError("IoU thresholds must satisfy 0 < a <= b <= 1 with step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((b - a) / s + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(std::round((a + static_cast<double>(i) * s) * 1e6) / 1e6);
  }
  return out;
}

}  // namespace mslayout
