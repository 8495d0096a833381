#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mslayout/geometry.hpp"
#include "mslayout/tensor.hpp"

namespace mslayout {

/// Static 2-d tree over a point set for exact nearest-neighbour queries.
///
/// Squared distances are computed as dx·dx + dy·dy with dx = q.x − p.x, the
/// same expression a pairwise scan uses, so query results are bit-identical
/// to brute force.
class PointIndex {
 public:
  explicit PointIndex(std::span<const Point2> points);

  /// Smallest squared Euclidean distance from `q` to any indexed point.
  double nearest_squared(Point2 q) const;
  double nearest(Point2 q) const;

  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    std::size_t begin, end;    // range in points_
    std::size_t left, right;   // child ids, 0 for leaves
    int axis;
    double split;
  };

  std::size_t build(std::size_t begin, std::size_t end, int depth);
  void search(std::size_t node, Point2 q, double& best) const;

  std::vector<Point2> points_;
  std::vector<Node> nodes_;
};

/// max_{x∈X} min_{y∈Y} ‖x − y‖.
double directed_hd(std::span<const Point2> from, std::span<const Point2> to);

/// Nearest-neighbour distance from every point of `from` into `to`.
std::vector<double> nearest_distances(std::span<const Point2> from, std::span<const Point2> to);

double hausdorff(std::span<const Point2> a, std::span<const Point2> b);

/// Mean of the two directed mean nearest-neighbour distances.
double avg_hausdorff(std::span<const Point2> a, std::span<const Point2> b);

/// 95th percentile of the pooled nearest-neighbour distances of both
/// directions (|A| + |B| values).
double hd95(std::span<const Point2> a, std::span<const Point2> b);

/// Percentile by linear interpolation between closest ranks: with the values
/// sorted ascending as v[0..n−1], rank h = q·(n−1) gives
/// v[⌊h⌋] + (h − ⌊h⌋)·(v[⌊h⌋+1] − v[⌊h⌋]). `q` is a fraction in [0, 1].
double percentile(std::vector<double> values, double q);

struct BoundaryMetrics {
  double hd = 0.0;
  double hd95 = 0.0;
  double avg_hd = 0.0;
};

/// All three boundary distances from a single pair of nearest-neighbour passes.
BoundaryMetrics boundary_metrics(std::span<const Point2> a, std::span<const Point2> b);

/// Polygon perimeter resampled every `spacing` units of arc length along each
/// edge, always keeping the original vertices.
std::vector<Point2> boundary_points(const Polygon& polygon, double spacing = 1.0);

}  // namespace mslayout
