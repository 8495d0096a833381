#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "brute_force.hpp"
#include "commands.hpp"
#include "fixtures/fixtures.hpp"
#include "mslayout/dataset.hpp"
#include "mslayout/defgrid.hpp"
#include "mslayout/deform_conv.hpp"
#include "mslayout/detection.hpp"
#include "mslayout/evaluation.hpp"
#include "mslayout/gradcheck.hpp"
#include "mslayout/hausdorff.hpp"
#include "mslayout/random.hpp"

using namespace mslayout;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Tensor random_tensor(Rng& rng, Tensor::Shape shape) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.normal();
  return t;
}

std::vector<Point2> random_points(Rng& rng, std::size_t n, double extent) {
  std::vector<Point2> out(n);
  for (auto& p : out) p = {rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
  return out;
}

std::vector<oracle::Pt> to_pts(std::span<const Point2> v) {
  std::vector<oracle::Pt> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back({p.x, p.y});
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "mslayout");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

fs::path fixture(const char* name) { return fs::path(MSLAYOUT_DATA_DIR) / "fixtures" / name; }

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "mslayout_acceptance";
  fs::create_directories(p);
  return p;
}

Outcome zero_offset_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t cin = 1 + rng.below(2), cout = 1 + rng.below(2);
    const std::size_t h = 1 + rng.below(16), w = 1 + rng.below(16);
    const Tensor x = random_tensor(rng, {cin, h, w});
    const ConvKernel kernel(random_tensor(rng, {cout, cin, 3, 3}));
    const Tensor a = deformable_conv2d(x, kernel, OffsetField::zeros(9, h, w));
    const Tensor b = regular_conv2d(x, kernel);
    worst = std::max(worst, max_abs_diff(a, b));
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-12 && dt < 5.0, fmt::format("max |diff| = {:.3e}, {:.3f} s", worst, dt)};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  const auto suites = run_gradient_checks({.seed = 0, .eps = 1e-6, .instances = 50});
  const double dt = seconds_since(t0);
  bool ok = suites.size() == 5 && dt < 60.0;
  double worst = 0.0;
  for (const auto& s : suites) {
    ok = ok && s.instances >= 50 && s.max_relative_error < 1e-5;
    worst = std::max(worst, s.max_relative_error);
  }
  return {ok, fmt::format("{} suites, max relative error = {:.3e}, {:.2f} s", suites.size(), worst, dt)};
}

Outcome hausdorff_oracle() {
  const auto t0 = Clock::now();
  Rng rng(1003);
  std::size_t mismatches = 0, order_violations = 0, asymmetric = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(2000), m = 1 + rng.below(2000);
    auto a = random_points(rng, n, 100), b = random_points(rng, m, 100);
    if (trial % 4 == 0) {
      for (auto& p : a) p = {std::round(p.x), std::round(p.y)};
      for (auto& p : b) p = {std::round(p.x), std::round(p.y)};
    }
    const auto pa = to_pts(a), pb = to_pts(b);
    if (directed_hd(a, b) != oracle::directed_hd(pa, pb)) ++mismatches;
    if (directed_hd(b, a) != oracle::directed_hd(pb, pa)) ++mismatches;
    const BoundaryMetrics ab = boundary_metrics(a, b), ba = boundary_metrics(b, a);
    if (!(0.0 <= ab.avg_hd && ab.avg_hd <= ab.hd95 && ab.hd95 <= ab.hd)) ++order_violations;
    if (ab.hd != ba.hd || ab.hd95 != ba.hd95 || ab.avg_hd != ba.avg_hd) ++asymmetric;
  }
  const double dt = seconds_since(t0);
  return {mismatches == 0 && order_violations == 0 && asymmetric == 0 && dt < 30.0,
          fmt::format("{} oracle mismatches, {} ordering violations, {} asymmetric pairs, {:.2f} s",
                      mismatches, order_violations, asymmetric, dt)};
}

Outcome metrics_performance() {
  Rng rng(1004);
  const auto a = random_points(rng, 100000, 5000), b = random_points(rng, 100000, 5000);
  const auto t0 = Clock::now();
  const double d = directed_hd(a, b);
  const double dt = seconds_since(t0);

  std::vector<Point2> sa, sb;
  for (std::size_t i = 0; i < 5000; ++i) {
    sa.push_back(a[rng.below(a.size())]);
    sb.push_back(b[rng.below(b.size())]);
  }
  const bool equal = directed_hd(sa, sb) == oracle::directed_hd(to_pts(sa), to_pts(sb));
  return {dt < 1.0 && equal && std::isfinite(d),
          fmt::format("100k x 100k in {:.3f} s, 5k subsample {}", dt, equal ? "equal" : "differs")};
}

Outcome ap_oracle() {
  Rng rng(1005);
  std::size_t mismatches = 0, cases = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t n = rng.below(13), gts = 1 + rng.below(8);
    std::vector<ScoredHit> hits;
    std::vector<std::pair<double, bool>> o;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool hit = tp < gts && rng.below(2) == 1;
      tp += hit ? 1 : 0;
      const double s = static_cast<double>(rng.below(20)) / 20.0;
      hits.push_back({s, hit});
      o.push_back({s, hit});
    }
    ++cases;
    if (*average_precision(hits, gts) != oracle::ap_exhaustive(o, gts)) ++mismatches;
  }
  const Polygon sq = {{2, 2}, {9, 2}, {9, 6}, {2, 6}};
  const std::vector<RegionInstance> gt = {{"d", Collection::PIH, Category::CLS, sq, std::nullopt}};
  const std::vector<RegionInstance> pred = {{"d", Collection::PIH, Category::CLS, sq, 1.0}};
  const auto perfect = ap_range(detection_groups(gt, pred, 10, 10));
  const auto hand = average_precision(std::vector<ScoredHit>{{0.9, true}, {0.8, false}, {0.7, true}}, 2);
  const bool ok = mismatches == 0 && perfect == 1.0 && hand == 5.0 / 6.0;
  return {ok, fmt::format("{} of {} cases differ, perfect ap_range = {}, hand case = {}", mismatches, cases,
                          perfect.value_or(-1.0), hand.value_or(-1.0))};
}

Outcome self_evaluation() {
  const auto gt = load_manifest(fixture("eval_gt.jsonl")).records;
  const fs::path pred = scratch() / "self_pred.jsonl";
  save_manifest(fixtures::self_predictions(gt), pred);
  std::string table;
  const int code = run_cli({"evaluate", "--gt", fixture("eval_gt.jsonl").string(), "--pred", pred.string(),
                            "--format", "table"},
                           &table);
  const MetricReport report = evaluate(gt, load_manifest(pred, {.require_scores = true}).records);
  std::size_t scopes = 0, bad = 0;
  for (const auto& r : report.rows) {
    if (r.instances == 0) continue;
    ++scopes;
    const auto& v = r.values;
    const bool ok = v.iou == 1.0 && v.ap == 1.0 && v.ap50 == 1.0 && v.ap75 == 1.0 && v.hd == 0.0 && v.hd95 == 0.0 &&
                    v.avg_hd == 0.0;
    bad += ok ? 0 : 1;
  }
  std::size_t printed = 0;
  std::istringstream lines(table);
  for (std::string line; std::getline(lines, line);) {
    if (line.find("0.00     0.00     0.00   100.00   100.00   100.00   100.00") != std::string::npos) ++printed;
  }
  return {code == 0 && bad == 0 && printed == scopes,
          fmt::format("{} populated scopes, {} imperfect, {} perfect table rows", scopes, bad, printed)};
}

Outcome published_statistics() {
  const std::size_t docs[4][3] = {{285, 70, 94}, {408, 72, 96}, {36, 11, 14}, {95, 40, 54}};
  const std::size_t totals[4] = {449, 576, 61, 189};
  const std::size_t combined[9] = {12994, 1975, 101, 784, 1375, 354, 161, 2872, 1179};
  std::string out;
  const int code = run_cli({"stats", "--manifest", fixture("dataset_manifest.jsonl").string()}, &out);
  const auto s = split_stats(load_manifest(fixture("dataset_manifest.jsonl")).records);
  std::size_t wrong = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t k = 0; k < 3; ++k) wrong += s.documents[c][k] == docs[c][k] ? 0 : 1;
    wrong += s.documents_in(kCollections[c]) == totals[c] ? 0 : 1;
  }
  wrong += s.total_documents() == 1275 ? 0 : 1;
  for (std::size_t k = 0; k < 9; ++k) wrong += s.regions_of(kCategories[k]) == combined[k] ? 0 : 1;
  const bool printed = out.find("1275") != std::string::npos && out.find("12994") != std::string::npos;
  return {code == 0 && wrong == 0 && printed, fmt::format("{} cells differ from the published tables", wrong)};
}

Outcome grid_geometry() {
  const DeformableGrid g14 = build_grid(14, 14);
  bool ok = g14.vertex_count() == 196 && g14.triangle_count() == 338;

  Rng rng(1008);
  std::size_t flips = 0, negative_losses = 0, nonzero_identity = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t h = 2 + rng.below(15), w = 2 + rng.below(15);
    const DeformableGrid grid = build_grid(h, w);
    std::vector<Point2> raw(grid.vertex_count());
    const double spread = trial % 2 == 0 ? 0.3 : 5.0;
    for (auto& p : raw) p = {rng.uniform(-spread, spread), rng.uniform(-spread, spread)};
    const DeformableGrid moved = apply_offsets(grid, raw);
    for (std::size_t t = 0; t < moved.triangle_count(); ++t) flips += moved.triangle_area(t) > 0.0 ? 0 : 1;

    const Tensor features = random_tensor(rng, {2, h, w});
    const GridLosses l = grid_losses(features, grid, raw);
    for (double v : {l.feature_variance, l.reconstruction, l.area_uniformity, l.neighbor_direction}) {
      negative_losses += v >= 0.0 ? 0 : 1;
    }

    const std::vector<Point2> zero(grid.vertex_count());
    const GridLosses id = grid_losses(Tensor({2, h, w}, 1.5), grid, zero);
    nonzero_identity += id.feature_variance == 0.0 && id.reconstruction == 0.0 && id.area_uniformity == 0.0 &&
                                id.neighbor_direction == 0.0
                            ? 0
                            : 1;
  }
  ok = ok && flips == 0 && negative_losses == 0 && nonzero_identity == 0;
  return {ok, fmt::format("14x14: {} vertices / {} triangles; {} flipped, {} negative losses, {} nonzero identities",
                          g14.vertex_count(), g14.triangle_count(), flips, negative_losses, nonzero_identity)};
}

Outcome report_format() {
  const auto gt = load_manifest(fixture("eval_gt.jsonl")).records;
  const auto pred = load_manifest(fixture("eval_pred.jsonl"), {.require_scores = true}).records;
  const MetricReport report = evaluate(gt, pred);
  const std::string csv = to_csv(report);
  const bool golden = csv == read_file(fixture("golden_report.csv"));
  const bool header = csv.rfind("scope,key,documents,instances,matched,HD,HD95,AvgHD,IoU,AP,AP50,AP75\n", 0) == 0;
  std::size_t categories = 0, collections = 0;
  for (Category k : kCategories) {
    for (const auto& r : report.rows) categories += r.scope == Scope::Category && r.key == to_string(k) ? 1 : 0;
  }
  for (Collection c : kCollections) {
    for (const auto& r : report.rows) collections += r.scope == Scope::Collection && r.key == to_string(c) ? 1 : 0;
  }
  return {golden && header && categories == 9 && collections == 4,
          fmt::format("golden {}, header {}, {} category rows, {} collection rows", golden ? "equal" : "differs",
                      header ? "ok" : "wrong", categories, collections)};
}

Outcome determinism() {
  const fs::path dir = scratch();
  const fs::path corpus_gt = dir / "corpus_gt.jsonl", corpus_pred = dir / "corpus_pred.jsonl";
  const auto corpus = fixtures::dataset_corpus();
  save_manifest(corpus, corpus_gt);
  save_manifest(fixtures::perturbed_predictions(corpus, 77), corpus_pred);

  struct Pair {
    fs::path gt, pred;
  };
  const Pair pairs[] = {{fixture("eval_gt.jsonl"), fixture("eval_pred.jsonl")}, {corpus_gt, corpus_pred}};
  std::size_t identical = 0, runs = 0;
  for (const auto& p : pairs) {
    std::vector<std::string> reports;
    for (const char* jobs : {"1", "8"}) {
      const fs::path out = dir / fmt::format("report_{}_{}.csv", runs, jobs);
      if (run_cli({"evaluate", "--gt", p.gt.string(), "--pred", p.pred.string(), "--jobs", jobs, "--out",
                   out.string()}) != 0) {
        return {false, fmt::format("evaluate failed on {}", p.gt.string())};
      }
      reports.push_back(read_file(out));
    }
    ++runs;
    identical += !reports[0].empty() && reports[0] == reports[1] ? 1 : 0;
  }
  return {identical == runs, fmt::format("{} of {} report pairs byte-identical", identical, runs)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"zero-offset equivalence", zero_offset_equivalence},
      {"gradient checks", gradient_checks},
      {"hausdorff oracle equivalence", hausdorff_oracle},
      {"metrics performance", metrics_performance},
      {"average precision oracle", ap_oracle},
      {"self-evaluation identity", self_evaluation},
      {"published statistics", published_statistics},
      {"grid geometry", grid_geometry},
      {"report format", report_format},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += o.pass ? 0 : 1;
    std::cout << fmt::format("[{:>2}] {:<30} {}  ({})", index, name, o.pass ? "PASS" : "FAIL", o.detail) << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", 10 - failures, 10) << std::endl;
  return failures == 0 ? 0 : 1;
}
