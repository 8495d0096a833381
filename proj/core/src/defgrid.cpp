#include "mslayout/defgrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include "mslayout/errors.hpp"

namespace mslayout {

std::vector<Point2> DeformableGrid::positions() const {
  std::vector<Point2> out(vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = position(v);
  return out;
}

double DeformableGrid::triangle_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point2 ring[3] = {position(tri[0]), position(tri[1]), position(tri[2])};
  return signed_area(ring);
}

DeformableGrid build_grid(std::size_t height, std::size_t width) {
  if (height < 2 || width < 2) {
    throw ValidationError("deformable grid needs at least 2×2 vertices, got " +
                          std::to_string(height) + "×" + std::to_string(width));
  }
  DeformableGrid g;
  g.height_ = height;
  g.width_ = width;
  g.offsets_.assign(height * width, Point2{});
  g.triangles_.reserve(2 * (height - 1) * (width - 1));
  for (std::size_t r = 0; r + 1 < height; ++r) {
    for (std::size_t c = 0; c + 1 < width; ++c) {
      const std::size_t tl = r * width + c, tr = tl + 1, bl = tl + width, br = bl + 1;
      if ((r + c) % 2 == 0) {
        g.triangles_.push_back({tl, tr, br});
        g.triangles_.push_back({tl, br, bl});
      } else {
        g.triangles_.push_back({tl, tr, bl});
        g.triangles_.push_back({tr, br, bl});
      }
    }
  }
  std::vector<std::set<std::size_t>> nbrs(height * width);
  for (const auto& t : g.triangles_) {
    for (int e = 0; e < 3; ++e) {
      nbrs[t[e]].insert(t[(e + 1) % 3]);
      nbrs[t[(e + 1) % 3]].insert(t[e]);
    }
  }
  g.adjacency_.reserve(nbrs.size());
  for (const auto& s : nbrs) g.adjacency_.emplace_back(s.begin(), s.end());
  return g;
}

Point2 clamp_offset(const DeformableGrid& grid, std::size_t v, Point2 raw) {
  Point2 d{std::clamp(raw.x, -kMaxVertexShift, kMaxVertexShift),
           std::clamp(raw.y, -kMaxVertexShift, kMaxVertexShift)};
  if (grid.on_vertical_border(v)) d.x = 0.0;
  if (grid.on_horizontal_border(v)) d.y = 0.0;
  return d;
}

DeformableGrid apply_offsets(const DeformableGrid& grid, std::span<const Point2> raw) {
  if (raw.size() != grid.vertex_count()) {
    throw ValidationError("expected " + std::to_string(grid.vertex_count()) +
                          " vertex offsets, got " + std::to_string(raw.size()));
  }
  DeformableGrid out = grid;
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (!std::isfinite(raw[v].x) || !std::isfinite(raw[v].y)) {
      throw ValidationError("non-finite vertex offset");
    }
    out.offsets_[v] = clamp_offset(grid, v, raw[v]);
  }
  return out;
}

const std::array<std::array<double, 3>, 16>& triangle_sample_pattern() {
  static const auto pattern = [] {
    std::array<std::array<double, 3>, 16> p{};
    std::size_t k = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; i + j < 4; ++j) {
        const double b = (i + 1.0 / 3.0) / 4.0, c = (j + 1.0 / 3.0) / 4.0;
        p[k++] = {1.0 - b - c, b, c};
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; i + j < 3; ++j) {
        const double b = (i + 2.0 / 3.0) / 4.0, c = (j + 2.0 / 3.0) / 4.0;
        p[k++] = {1.0 - b - c, b, c};
      }
    }
    return p;
  }();
  return pattern;
}

namespace {

void check_features(const Tensor& features) {
  if (features.rank() != 3 || features.dim(1) < 2 || features.dim(2) < 2) {
    throw ValidationError("features must be C×H×W with H, W ≥ 2");
  }
}

// Σ over triangles and channels of Σ_s (sample − mean)², shared by both
// feature losses.
double squared_deviation_sum(const Tensor& features, const DeformableGrid& grid) {
  check_features(features);
  const std::size_t channels = features.dim(0), fh = features.dim(1), fw = features.dim(2);
  const double sx = static_cast<double>(fw - 1) / static_cast<double>(grid.width() - 1);
  const double sy = static_cast<double>(fh - 1) / static_cast<double>(grid.height() - 1);
  const auto& pattern = triangle_sample_pattern();
  double total = 0.0;
  std::array<Point2, 16> where{};
  std::array<double, 16> values{};
  for (const auto& tri : grid.triangles()) {
    const Point2 a = grid.position(tri[0]), b = grid.position(tri[1]), c = grid.position(tri[2]);
    for (std::size_t s = 0; s < pattern.size(); ++s) {
      const auto& l = pattern[s];
      const Point2 p = l[0] * a + l[1] * b + l[2] * c;
      where[s] = {p.x * sx, p.y * sy};
    }
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const auto plane = features.channel(ch);
      double mean = 0.0;
      for (std::size_t s = 0; s < where.size(); ++s) {
        values[s] = bilinear_sample(plane, fh, fw, where[s]);
        mean += values[s];
      }
      mean /= static_cast<double>(values.size());
      for (double v : values) total += (v - mean) * (v - mean);
    }
  }
  return total;
}

}  // namespace

double cell_feature_variance_loss(const Tensor& features, const DeformableGrid& grid) {
  const double sum = squared_deviation_sum(features, grid);
  const double per_cell = static_cast<double>(triangle_sample_pattern().size()) *
                          static_cast<double>(features.dim(0));
  return sum / per_cell;
}

double reconstruction_loss(const Tensor& features, const DeformableGrid& grid) {
  const double sum = squared_deviation_sum(features, grid);
  const double count = static_cast<double>(triangle_sample_pattern().size()) *
                       static_cast<double>(features.dim(0)) *
                       static_cast<double>(grid.triangle_count());
  return sum / count;
}

double area_uniformity_loss(const DeformableGrid& grid) {
  const std::size_t n = grid.triangle_count();
  std::vector<double> areas(n);
  double mean = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    areas[t] = grid.triangle_area(t);
    mean += areas[t];
  }
  mean /= static_cast<double>(n);
  double loss = 0.0;
  for (double a : areas) loss += (a - mean) * (a - mean);
  return loss;
}

namespace {

void check_raw(const DeformableGrid& grid, std::span<const Point2> raw) {
  if (raw.size() != grid.vertex_count()) {
    throw ValidationError("expected " + std::to_string(grid.vertex_count()) +
                          " vertex offsets, got " + std::to_string(raw.size()));
  }
}

}  // namespace

double neighbor_direction_loss(const DeformableGrid& grid, std::span<const Point2> raw) {
  check_raw(grid, raw);
  double loss = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j : grid.adjacency()[i]) {
      const Point2 d = raw[i] - raw[j];
      loss += d.x * d.x + d.y * d.y;
    }
  }
  return loss;
}

std::vector<Point2> area_uniformity_gradient(const DeformableGrid& grid,
                                             std::span<const Point2> raw) {
  const DeformableGrid deformed = apply_offsets(grid, raw);
  const std::size_t n = deformed.triangle_count();
  std::vector<double> areas(n);
  double mean = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    areas[t] = deformed.triangle_area(t);
    mean += areas[t];
  }
  mean /= static_cast<double>(n);

  // The mean's own derivative cancels because Σ_t (area_t − mean) = 0.
  std::vector<Point2> grad(deformed.vertex_count());
  for (std::size_t t = 0; t < n; ++t) {
    const double k = 2.0 * (areas[t] - mean) * 0.5;
    const auto& tri = deformed.triangles()[t];
    for (int e = 0; e < 3; ++e) {
      const Point2 next = deformed.position(tri[(e + 1) % 3]);
      const Point2 prev = deformed.position(tri[(e + 2) % 3]);
      grad[tri[e]].x += k * (next.y - prev.y);
      grad[tri[e]].y += k * (prev.x - next.x);
    }
  }
  for (std::size_t v = 0; v < grad.size(); ++v) {
    if (deformed.on_vertical_border(v) || std::abs(raw[v].x) > kMaxVertexShift) grad[v].x = 0.0;
    if (deformed.on_horizontal_border(v) || std::abs(raw[v].y) > kMaxVertexShift) grad[v].y = 0.0;
  }
  return grad;
}

std::vector<Point2> neighbor_direction_gradient(const DeformableGrid& grid,
                                                std::span<const Point2> raw) {
  check_raw(grid, raw);
  std::vector<Point2> grad(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j : grid.adjacency()[i]) grad[i] = grad[i] + 4.0 * (raw[i] - raw[j]);
  }
  return grad;
}

GridLosses grid_losses(const Tensor& features, const DeformableGrid& grid,
                       std::span<const Point2> raw) {
  const DeformableGrid deformed = apply_offsets(grid, raw);
  GridLosses l;
  l.feature_variance = cell_feature_variance_loss(features, deformed);
  l.reconstruction = reconstruction_loss(features, deformed);
  l.area_uniformity = area_uniformity_loss(deformed);
  l.neighbor_direction = neighbor_direction_loss(grid, raw);
  return l;
}

GcnWeights GcnWeights::zeros(std::size_t feature_dim) {
  GcnWeights w;
  for (auto& b : w.blocks) b = Tensor({feature_dim, feature_dim});
  w.head = Tensor({feature_dim, 2});
  return w;
}

std::vector<Point2> residual_gcn_forward(const std::vector<std::vector<std::size_t>>& adjacency,
                                         const Tensor& features, const GcnWeights& weights) {
  const std::size_t nv = adjacency.size();
  if (features.rank() != 2 || features.dim(0) != nv) {
    throw ValidationError("vertex features must be V×D with one row per vertex");
  }
  const std::size_t d = features.dim(1);
  for (const auto& b : weights.blocks) {
    if (b.shape() != Tensor::Shape{d, d}) throw ValidationError("GCN block weights must be D×D");
  }
  if (weights.head.shape() != Tensor::Shape{d, 2}) {
    throw ValidationError("GCN head weights must be D×2");
  }

  std::vector<double> inv_sqrt_deg(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(adjacency[v].size() + 1));
  }

  Tensor h = features;
  Tensor agg({nv, d});
  Tensor lin({nv, d});
  for (const auto& w : weights.blocks) {
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t k = 0; k < d; ++k) agg(v, k) = inv_sqrt_deg[v] * inv_sqrt_deg[v] * h(v, k);
      for (std::size_t u : adjacency[v]) {
        const double a = inv_sqrt_deg[v] * inv_sqrt_deg[u];
        for (std::size_t k = 0; k < d; ++k) agg(v, k) += a * h(u, k);
      }
    }
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += agg(v, k) * w(k, j);
        lin(v, j) = std::max(0.0, acc);
      }
    }
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += lin[i];
  }

  std::vector<Point2> out(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    double ox = 0.0, oy = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      ox += h(v, k) * weights.head(k, 0);
      oy += h(v, k) * weights.head(k, 1);
    }
    out[v] = {0.5 * std::tanh(ox), 0.5 * std::tanh(oy)};
  }
  return out;
}

std::vector<Point2> residual_gcn_forward(const DeformableGrid& grid, const Tensor& features,
                                         const GcnWeights& weights) {
  return residual_gcn_forward(grid.adjacency(), features, weights);
}

std::vector<BoundaryLoop> extract_region_polygons(const DeformableGrid& grid,
                                                  const CellLabeling& labels) {
  if (labels.size() != grid.triangle_count()) {
    throw ValidationError("labeling has " + std::to_string(labels.size()) +
                          " entries, grid has " + std::to_string(grid.triangle_count()) +
                          " triangles");
  }
  using Edge = std::pair<std::size_t, std::size_t>;
  std::set<Edge> inner;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (!labels[t]) continue;
    const auto& tri = grid.triangles()[t];
    for (int e = 0; e < 3; ++e) inner.insert({tri[e], tri[(e + 1) % 3]});
  }
  // Directed boundary edges keep the region on their left.
  std::map<std::size_t, std::vector<std::size_t>> outgoing;
  std::set<Edge> pending;
  for (const auto& [a, b] : inner) {
    if (!inner.contains({b, a})) {
      outgoing[a].push_back(b);
      pending.insert({a, b});
    }
  }

  const auto pos = grid.positions();
  const auto clockwise_turn = [&](std::size_t from, std::size_t at, std::size_t to) {
    const Point2 back = pos[from] - pos[at];
    const Point2 fwd = pos[to] - pos[at];
    const double ccw = std::atan2(back.x * fwd.y - back.y * fwd.x, back.x * fwd.x + back.y * fwd.y);
    double cw = -ccw;
    if (cw <= 0.0) cw += 2.0 * std::numbers::pi;
    return cw;
  };

  std::vector<BoundaryLoop> loops;
  while (!pending.empty()) {
    const Edge start = *pending.begin();
    pending.erase(pending.begin());
    BoundaryLoop loop;
    loop.vertex_ids.push_back(start.first);
    std::size_t prev = start.first, cur = start.second;
    while (true) {
      loop.vertex_ids.push_back(cur);
      std::size_t best = 0;
      double best_turn = INFINITY;
      bool closes = false;
      for (std::size_t next : outgoing[cur]) {
        const Edge e{cur, next};
        const bool is_start = e == start;
        if (!is_start && !pending.contains(e)) continue;
        const double turn = clockwise_turn(prev, cur, next);
        if (turn < best_turn) {
          best_turn = turn;
          best = next;
          closes = is_start;
        }
      }
      if (closes || best_turn == INFINITY) break;
      pending.erase({cur, best});
      prev = cur;
      cur = best;
    }
    loop.vertex_ids.pop_back();  // the start vertex, reached again
    for (std::size_t v : loop.vertex_ids) loop.points.push_back(pos[v]);
    loop.hole = signed_area(loop.points) < 0.0;
    loops.push_back(std::move(loop));
  }
  return loops;
}

Tensor upsample_mask(const Tensor& mask, std::size_t target_height, std::size_t target_width) {
  if (mask.rank() != 2 || mask.empty()) throw ValidationError("mask must be a non-empty 2D tensor");
  const std::size_t sh = mask.dim(0), sw = mask.dim(1);
  if (target_height < sh || target_width < sw) {
    throw ValidationError("upsample target must not be smaller than the source mask");
  }
  const double scale_y = static_cast<double>(sh) / static_cast<double>(target_height);
  const double scale_x = static_cast<double>(sw) / static_cast<double>(target_width);
  Tensor out({target_height, target_width});
  for (std::size_t r = 0; r < target_height; ++r) {
    const double y = std::clamp((static_cast<double>(r) + 0.5) * scale_y - 0.5, 0.0,
                                static_cast<double>(sh - 1));
    for (std::size_t c = 0; c < target_width; ++c) {
      const double x = std::clamp((static_cast<double>(c) + 0.5) * scale_x - 0.5, 0.0,
                                  static_cast<double>(sw - 1));
      out(r, c) = bilinear_sample(mask, {x, y}) >= 0.5 ? 1.0 : 0.0;
    }
  }
  return out;
}

}  // namespace mslayout
