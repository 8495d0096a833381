#include "mslayout/hausdorff.hpp"

#include <algorithm>
#include <cmath>

#include "mslayout/errors.hpp"

namespace mslayout {

namespace {

constexpr std::size_t kLeafSize = 12;

double coord(Point2 p, int axis) { return axis == 0 ? p.x : p.y; }

void require_nonempty(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("Hausdorff distances are undefined for empty point sets");
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

PointIndex::PointIndex(std::span<const Point2> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) throw ValidationError("cannot index an empty point set");
  nodes_.reserve(2 * (points_.size() / kLeafSize + 1));
  build(0, points_.size(), 0);
}

std::size_t PointIndex::build(std::size_t begin, std::size_t end, int depth) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0, 0, 0.0});
  if (end - begin <= kLeafSize || depth > 64) return id;

  double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
  for (std::size_t i = begin; i < end; ++i) {
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], coord(points_[i], a));
      hi[a] = std::max(hi[a], coord(points_[i], a));
    }
  }
  const int axis = (hi[0] - lo[0]) >= (hi[1] - lo[1]) ? 0 : 1;
  if (hi[axis] == lo[axis]) return id;  // all coincident

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(points_.begin() + static_cast<std::ptrdiff_t>(begin),
                   points_.begin() + static_cast<std::ptrdiff_t>(mid),
                   points_.begin() + static_cast<std::ptrdiff_t>(end),
                   [axis](Point2 a, Point2 b) { return coord(a, axis) < coord(b, axis); });
  const double split = coord(points_[mid], axis);
  const std::size_t left = build(begin, mid, depth + 1);
  const std::size_t right = build(mid, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  return id;
}

void PointIndex::search(std::size_t node, Point2 q, double& best) const {
  const Node& n = nodes_[node];
  if (n.left == 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const double dx = q.x - points_[i].x;
      const double dy = q.y - points_[i].y;
      best = std::min(best, dx * dx + dy * dy);
    }
    return;
  }
  // Left holds coordinates ≤ split, right holds coordinates ≥ split, so the
  // far side is at least |diff| away along the split axis.
  const double diff = coord(q, n.axis) - n.split;
  const std::size_t near = diff < 0.0 ? n.left : n.right;
  const std::size_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, best);
  if (diff * diff < best) search(far, q, best);
}

double PointIndex::nearest_squared(Point2 q) const {
  double best = INFINITY;
  search(0, q, best);
  return best;
}

double PointIndex::nearest(Point2 q) const { return std::sqrt(nearest_squared(q)); }

std::vector<double> nearest_distances(std::span<const Point2> from, std::span<const Point2> to) {
  require_nonempty(from, to);
  const PointIndex index(to);
  std::vector<double> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) out[i] = index.nearest(from[i]);
  return out;
}

double directed_hd(std::span<const Point2> from, std::span<const Point2> to) {
  require_nonempty(from, to);
  const PointIndex index(to);
  double worst = 0.0;
  for (const Point2& p : from) worst = std::max(worst, index.nearest_squared(p));
  return std::sqrt(worst);
}

double hausdorff(std::span<const Point2> a, std::span<const Point2> b) {
  return std::max(directed_hd(a, b), directed_hd(b, a));
}

double avg_hausdorff(std::span<const Point2> a, std::span<const Point2> b) {
  return (mean_of(nearest_distances(a, b)) + mean_of(nearest_distances(b, a))) / 2.0;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile fraction must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double hd95(std::span<const Point2> a, std::span<const Point2> b) {
  auto pooled = nearest_distances(a, b);
  const auto back = nearest_distances(b, a);
  pooled.insert(pooled.end(), back.begin(), back.end());
  return percentile(std::move(pooled), 0.95);
}

BoundaryMetrics boundary_metrics(std::span<const Point2> a, std::span<const Point2> b) {
  auto forward = nearest_distances(a, b);
  const auto back = nearest_distances(b, a);
  BoundaryMetrics m;
  m.avg_hd = (mean_of(forward) + mean_of(back)) / 2.0;
  m.hd = std::max(*std::max_element(forward.begin(), forward.end()),
                  *std::max_element(back.begin(), back.end()));
  forward.insert(forward.end(), back.begin(), back.end());
  m.hd95 = percentile(std::move(forward), 0.95);
  return m;
}

std::vector<Point2> boundary_points(const Polygon& polygon, double spacing) {
  if (!(spacing > 0.0)) throw ValidationError("boundary spacing must be positive");
  if (polygon.size() < 3 || !(perimeter(polygon) > 0.0)) {
    throw ValidationError("degenerate polygon");
  }
  std::vector<Point2> out;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[(i + 1) % polygon.size()];
    out.push_back(a);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    // Stop short of b, which starts the next edge.
    for (std::size_t k = 1; static_cast<double>(k) * spacing < len * (1.0 - 1e-12); ++k) {
      const double t = static_cast<double>(k) * spacing / len;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

}  // namespace mslayout
