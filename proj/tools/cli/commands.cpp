#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mslayout/dataset.hpp"
#include "mslayout/defgrid.hpp"
#include "mslayout/errors.hpp"
#include "mslayout/evaluation.hpp"
#include "mslayout/gradcheck.hpp"
#include "mslayout/random.hpp"
#include "mslayout/sampling.hpp"

namespace mslayout::cli {

namespace {

struct EvaluateArgs {
  std::string gt, pred, thresholds = "0.50:0.95:0.05", out, format = "csv";
  double spacing = 1.0;
  std::size_t jobs = 1;
};

struct GradcheckArgs {
  std::uint64_t seed = 0;
  double eps = 1e-6;
  double tol = 1e-5;
  std::size_t instances = 50;
};

struct DemoArgs {
  std::size_t size = 14;
  std::uint64_t seed = 0;
  std::size_t feature_dim = 8;
  bool zero_weights = false;
};

struct SamplePlanArgs {
  std::string manifest;
  double threshold = kDefaultRepeatThreshold;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  EvalConfig config;
  config.iou_thresholds = parse_threshold_range(a.thresholds);
  config.spacing = a.spacing;
  config.jobs = a.jobs;
  if (a.jobs == 0) throw ValidationError("--jobs must be at least 1");

  const Manifest gt = load_manifest(a.gt);
  const Manifest pred = load_manifest(a.pred, {.require_scores = true});
  for (const auto& w : gt.warnings) err << "warning: " << a.gt << ": " << w << '\n';
  for (const auto& w : pred.warnings) err << "warning: " << a.pred << ": " << w << '\n';

  const MetricReport report = evaluate(gt.records, pred.records, config);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  std::string text;
  if (a.format == "csv") {
    text = to_csv(report);
  } else if (a.format == "json") {
    text = to_json(report);
  } else {
    text = to_table(report);
  }
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
    out << to_table(report);
  }
  return kExitOk;
}

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  if (!(a.eps > 0.0)) throw ValidationError("--eps must be positive");
  if (!(a.tol >= 0.0)) throw ValidationError("--tol must be non-negative");
  const auto suites = run_gradient_checks({a.seed, a.eps, a.instances});
  bool ok = true;
  for (const auto& s : suites) {
    const bool pass = s.max_relative_error < a.tol;
    ok = ok && pass;
    out << fmt::format("{:<28} instances={:<4} max_rel_error={:.6e}  {}\n", s.name, s.instances,
                       s.max_relative_error, pass ? "PASS" : "FAIL");
  }
  out << fmt::format("gradcheck seed={} eps={} tol={}: {}\n", a.seed, a.eps, a.tol,
                     ok ? "passed" : "FAILED");
  return ok ? kExitOk : kExitFailure;
}

int cmd_stats(const std::string& path, std::ostream& out, std::ostream& err) {
  const Manifest m = load_manifest(path);
  for (const auto& w : m.warnings) err << "warning: " << path << ": " << w << '\n';
  const DatasetStats stats = split_stats(m.records);
  out << "Documents per collection and split\n"
      << format_collection_table(stats) << "\nRegions per collection and category\n"
      << format_region_table(stats);
  return kExitOk;
}

struct Blob {
  double cx, cy, rx, ry;

  bool contains(double x, double y) const {
    const double u = (x - cx) / rx, v = (y - cy) / ry;
    return u * u + v * v <= 1.0;
  }
};

int cmd_defgrid_demo(const DemoArgs& a, std::ostream& out) {
  if (a.size < 2 || a.size > 512) throw ValidationError("--size must lie in [2, 512]");
  if (a.feature_dim == 0) throw ValidationError("--features must be positive");
  Rng rng(a.seed);
  const DeformableGrid rest = build_grid(a.size, a.size);
  const std::size_t d = a.feature_dim;
  const double extent = static_cast<double>(a.size - 1);

  Tensor vertex_features({rest.vertex_count(), d});
  for (auto& v : vertex_features.data()) v = rng.normal();
  GcnWeights weights = GcnWeights::zeros(d);
  if (!a.zero_weights) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (auto& block : weights.blocks) {
      for (auto& v : block.data()) v = 0.3 * scale * rng.normal();
    }
    for (auto& v : weights.head.data()) v = scale * rng.normal();
  }
  const std::vector<Point2> raw = residual_gcn_forward(rest, vertex_features, weights);
  const DeformableGrid grid = apply_offsets(rest, raw);

  const Blob blob{rng.uniform(0.3, 0.7) * extent, rng.uniform(0.3, 0.7) * extent,
                  rng.uniform(0.2, 0.4) * extent, rng.uniform(0.2, 0.4) * extent};
  CellLabeling labels(grid.triangle_count());
  for (std::size_t t = 0; t < labels.size(); ++t) {
    Point2 c{};
    for (std::size_t v : grid.triangles()[t]) c = c + rest.rest_position(v);
    labels[t] = blob.contains(c.x / 3.0, c.y / 3.0) ? 1 : 0;
  }

  const std::size_t res = 4 * (a.size - 1) + 1;
  Tensor feature_map({1, res, res});
  for (std::size_t r = 0; r < res; ++r) {
    for (std::size_t c = 0; c < res; ++c) {
      feature_map(0, r, c) = blob.contains(c / 4.0, r / 4.0) ? 1.0 : 0.0;
    }
  }
  const GridLosses losses = grid_losses(feature_map, rest, raw);
  const auto loops = extract_region_polygons(grid, labels);

  out << fmt::format("grid {} {}\nvertices {}\n", grid.height(), grid.width(),
                     grid.vertex_count());
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
    const Point2 p = grid.position(v);
    out << fmt::format("v {} {} {}\n", v, p.x, p.y);
  }
  out << fmt::format("triangles {}\n", grid.triangle_count());
  for (std::size_t t = 0; t < grid.triangle_count(); ++t) {
    const auto& tri = grid.triangles()[t];
    out << fmt::format("t {} {} {} {} {}\n", t, tri[0], tri[1], tri[2], labels[t]);
  }
  out << fmt::format("polygons {}\n", loops.size());
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const auto& loop = loops[i];
    out << fmt::format("polygon {} {} {}\n", i, loop.hole ? "hole" : "outer", loop.points.size());
    for (std::size_t k = 0; k < loop.points.size(); ++k) {
      out << fmt::format("p {} {} {}\n", loop.vertex_ids[k], loop.points[k].x, loop.points[k].y);
    }
  }
  out << fmt::format(
      "losses\nfeature_variance {}\nreconstruction {}\narea_uniformity {}\nneighbor_direction {}\n",
      losses.feature_variance, losses.reconstruction, losses.area_uniformity,
      losses.neighbor_direction);
  return kExitOk;
}

int cmd_sample_plan(const SamplePlanArgs& a, std::ostream& out, std::ostream& err) {
  const Manifest m = load_manifest(a.manifest);
  for (const auto& w : m.warnings) err << "warning: " << a.manifest << ": " << w << '\n';
  const RepeatPlan plan = repeat_factors(m.records, a.threshold);

  out << fmt::format("threshold {}\ntrain_documents {}\n", plan.threshold, plan.train_images);
  out << "category frequency factor\n";
  for (Category k : kCategories) {
    out << fmt::format("{} {} {}\n", to_string(k), plan.category_frequency[index_of(k)],
                       plan.category_factor[index_of(k)]);
  }
  out << "document_id repeat_factor\n";
  for (const auto& d : plan.documents) out << fmt::format("{} {}\n", d.document_id, d.factor);
  out << fmt::format("expected_epoch_length {}\nceiling_epoch_length {}\n",
                     plan.expected_epoch_length(), plan.ceiling_epoch_length());
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layout segmentation toolkit: evaluation, gradient checks and dataset tools",
               "mslayout"};
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate_cmd->add_option("--gt", ev.gt, "Ground-truth manifest (JSONL)")->required();
  evaluate_cmd->add_option("--pred", ev.pred, "Prediction manifest (JSONL, scored)")->required();
  evaluate_cmd->add_option("--iou-thresholds", ev.thresholds, "AP threshold range a:b:s")
      ->capture_default_str();
  evaluate_cmd->add_option("--spacing", ev.spacing, "Boundary sampling spacing in pixels")
      ->capture_default_str();
  evaluate_cmd->add_option("--jobs", ev.jobs, "Documents evaluated in parallel")
      ->capture_default_str();
  evaluate_cmd->add_option("--out", ev.out, "Report file (stdout when omitted)");
  evaluate_cmd->add_option("--format", ev.format, "Report format")
      ->check(CLI::IsMember({"csv", "json", "table"}))
      ->capture_default_str();

  GradcheckArgs gc;
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck_cmd->add_option("--seed", gc.seed)->capture_default_str();
  gradcheck_cmd->add_option("--eps", gc.eps, "Finite-difference step")->capture_default_str();
  gradcheck_cmd->add_option("--tol", gc.tol, "Largest accepted relative error")
      ->capture_default_str();
  gradcheck_cmd->add_option("--instances", gc.instances, "Random problems per suite")
      ->capture_default_str();

  std::string stats_manifest;
  auto* stats_cmd = app.add_subcommand("stats", "Document and region counts of a manifest");
  stats_cmd->add_option("--manifest", stats_manifest)->required();

  DemoArgs demo;
  auto* demo_cmd = app.add_subcommand("defgrid-demo", "Dump a deformed grid and its polygons");
  demo_cmd->add_option("--size", demo.size, "Vertices per side")->capture_default_str();
  demo_cmd->add_option("--seed", demo.seed)->capture_default_str();
  demo_cmd->add_option("--features", demo.feature_dim, "Vertex feature dimension")
      ->capture_default_str();
  demo_cmd->add_flag("--zero-weights", demo.zero_weights, "Use an all-zero offset predictor");

  SamplePlanArgs sp;
  auto* plan_cmd = app.add_subcommand("sample-plan", "Repeat-factor sampling plan");
  plan_cmd->add_option("--manifest", sp.manifest)->required();
  plan_cmd->add_option("--threshold", sp.threshold, "Frequency threshold t")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*evaluate_cmd) return cmd_evaluate(ev, out, err);
    if (*gradcheck_cmd) return cmd_gradcheck(gc, out);
    if (*stats_cmd) return cmd_stats(stats_manifest, out, err);
    if (*demo_cmd) return cmd_defgrid_demo(demo, out);
    if (*plan_cmd) return cmd_sample_plan(sp, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace mslayout::cli
