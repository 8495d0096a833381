#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mslayout/geometry.hpp"
#include "mslayout/tensor.hpp"

namespace mslayout {

/// Largest per-component vertex displacement, in cell units. Below 0.25 no
/// triangle of the lattice can flip: the worst case area is 0.5 − 2·shift.
inline constexpr double kMaxVertexShift = 0.25 - 1e-3;

using Triangle = std::array<std::size_t, 3>;

/// Triangulated vertex lattice whose vertices can be displaced.
///
/// Vertex i = r·width + c rests at (x = c, y = r). Every unit cell is split by
/// one diagonal; the diagonal alternates in a checkerboard so that each
/// interior vertex reaches up to 8 lattice neighbours. Triangles are stored
/// counterclockwise (positive shoelace area).
class DeformableGrid {
 public:
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t vertex_count() const noexcept { return offsets_.size(); }
  std::size_t triangle_count() const noexcept { return triangles_.size(); }

  Point2 rest_position(std::size_t v) const {
    return {static_cast<double>(v % width_), static_cast<double>(v / width_)};
  }
  Point2 offset(std::size_t v) const { return offsets_[v]; }
  Point2 position(std::size_t v) const { return rest_position(v) + offsets_[v]; }
  std::vector<Point2> positions() const;

  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return adjacency_; }

  /// Signed area of triangle t at the displaced vertex positions.
  double triangle_area(std::size_t t) const;

  bool on_vertical_border(std::size_t v) const {
    const std::size_t c = v % width_;
    return c == 0 || c + 1 == width_;
  }
  bool on_horizontal_border(std::size_t v) const {
    const std::size_t r = v / width_;
    return r == 0 || r + 1 == height_;
  }

 private:
  friend DeformableGrid build_grid(std::size_t, std::size_t);
  friend DeformableGrid apply_offsets(const DeformableGrid&, std::span<const Point2>);

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<Point2> offsets_;
  std::vector<Triangle> triangles_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Undisplaced h×w vertex lattice with 2·(h−1)·(w−1) triangles.
DeformableGrid build_grid(std::size_t height, std::size_t width);

/// The displacement actually applied for a raw offset: each component is
/// clamped to ±kMaxVertexShift, vertices on the left/right border keep x and
/// vertices on the top/bottom border keep y, so corners never move.
Point2 clamp_offset(const DeformableGrid& grid, std::size_t v, Point2 raw);

/// Replaces the grid's offsets with the clamped `raw` offsets.
DeformableGrid apply_offsets(const DeformableGrid& grid, std::span<const Point2> raw);

/// Fixed 16-point barycentric pattern: centroids of the 16 congruent
/// sub-triangles obtained by splitting each edge in four.
const std::array<std::array<double, 3>, 16>& triangle_sample_pattern();

/// Σ_t mean_c Var_s F_c(sample s of triangle t), population variance over the
/// 16 pattern points. Grid coordinates map onto the feature map's full extent,
/// so a grid built on the H×W lattice samples feature pixels directly.
double cell_feature_variance_loss(const Tensor& features, const DeformableGrid& grid);

/// Mean squared error between the sampled features and their per-triangle,
/// per-channel means. Equals cell_feature_variance_loss / triangle_count.
double reconstruction_loss(const Tensor& features, const DeformableGrid& grid);

/// Σ_t (area_t − mean area)².
double area_uniformity_loss(const DeformableGrid& grid);

/// Σ_i Σ_{j ∈ N(i)} ‖raw_i − raw_j‖²; every edge contributes from both ends.
double neighbor_direction_loss(const DeformableGrid& grid, std::span<const Point2> raw);

/// d area_uniformity_loss(apply_offsets(grid, raw)) / d raw.
std::vector<Point2> area_uniformity_gradient(const DeformableGrid& grid,
                                             std::span<const Point2> raw);

/// d neighbor_direction_loss(grid, raw) / d raw.
std::vector<Point2> neighbor_direction_gradient(const DeformableGrid& grid,
                                                std::span<const Point2> raw);

struct LossWeights {
  double feature_variance = 1.0;
  double reconstruction = 1.0;
  double area_uniformity = 1.0;
  double neighbor_direction = 1.0;
};

struct GridLosses {
  double feature_variance = 0.0;
  double reconstruction = 0.0;
  double area_uniformity = 0.0;
  double neighbor_direction = 0.0;

  double weighted_total(const LossWeights& w = {}) const {
    return w.feature_variance * feature_variance + w.reconstruction * reconstruction +
           w.area_uniformity * area_uniformity + w.neighbor_direction * neighbor_direction;
  }
};

/// All four mask-head losses for `raw` applied to `grid`.
GridLosses grid_losses(const Tensor& features, const DeformableGrid& grid,
                       std::span<const Point2> raw);

/// Weights of the offset predictor: six residual graph-convolution blocks
/// (D×D each) followed by a D×2 linear head.
struct GcnWeights {
  static constexpr std::size_t kBlocks = 6;
  std::array<Tensor, kBlocks> blocks;
  Tensor head;

  static GcnWeights zeros(std::size_t feature_dim);
  std::size_t feature_dim() const { return head.dim(0); }
};

/// h ← relu(Â·h·W_b) + h for each block, with Â the symmetrically
/// degree-normalised adjacency including self loops; then
/// offset = 0.5·tanh(h·head). Row v of `features` (V×D) belongs to vertex v.
std::vector<Point2> residual_gcn_forward(const std::vector<std::vector<std::size_t>>& adjacency,
                                         const Tensor& features, const GcnWeights& weights);
std::vector<Point2> residual_gcn_forward(const DeformableGrid& grid, const Tensor& features,
                                         const GcnWeights& weights);

/// Per-triangle binary labels: 1 = region, 0 = background.
using CellLabeling = std::vector<std::uint8_t>;

struct BoundaryLoop {
  std::vector<std::size_t> vertex_ids;
  Polygon points;
  /// Holes run clockwise, outer boundaries counterclockwise.
  bool hole = false;
};

/// Boundary rings of the union of positive triangles, traced along edges that
/// separate a positive triangle from a negative one or from the outside.
/// Components meeting only at a vertex are reported as separate rings.
std::vector<BoundaryLoop> extract_region_polygons(const DeformableGrid& grid,
                                                  const CellLabeling& labels);

/// Bilinear resize (half-pixel centres, edge clamped) followed by a ≥ 0.5
/// threshold. Target dimensions may not be smaller than the source.
Tensor upsample_mask(const Tensor& mask, std::size_t target_height, std::size_t target_width);

}  // namespace mslayout
