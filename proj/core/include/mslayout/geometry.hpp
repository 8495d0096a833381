#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mslayout/tensor.hpp"

namespace mslayout {

/// Closed ring of vertices; the closing edge last→first is implicit.
using Polygon = std::vector<Point2>;

/// Shoelace area, positive for counterclockwise rings in the (x, y) plane.
double signed_area(std::span<const Point2> ring);
double perimeter(std::span<const Point2> ring);

/// True when no two non-adjacent edges touch and no adjacent edges fold back.
bool is_simple(std::span<const Point2> ring);

/// Pixel set cropped to its bounding rows/columns. Pixel (r, c) covers
/// [c, c+1)×[r, r+1) and belongs to the set when its centre is inside.
struct PixelMask {
  long row0 = 0;
  long col0 = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  std::size_t count() const;
  bool contains(long row, long col) const;
};

/// Scanline fill of one or more rings with the even-odd rule, restricted to
/// an H×W raster. Holes are expressed as additional rings.
PixelMask rasterize(std::span<const Polygon> rings, std::size_t height, std::size_t width);
PixelMask rasterize(const Polygon& ring, std::size_t height, std::size_t width);

std::size_t overlap_count(const PixelMask& a, const PixelMask& b);

}  // namespace mslayout
