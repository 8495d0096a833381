#include "mslayout/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mslayout {

double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double perimeter(std::span<const Point2> ring) {
  double total = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point2 d = ring[(i + 1) % ring.size()] - ring[i];
    total += std::hypot(d.x, d.y);
  }
  return total;
}

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

}  // namespace

bool is_simple(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i], b = ring[(i + 1) % n], c = ring[(i + 2) % n];
    if (a == b) return false;
    // Adjacent edges that double back on themselves.
    if (cross(a, b, c) == 0.0 && (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y) < 0.0) {
      return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::size_t PixelMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

bool PixelMask::contains(long row, long col) const {
  const long r = row - row0, c = col - col0;
  if (r < 0 || c < 0 || r >= static_cast<long>(rows) || c >= static_cast<long>(cols)) return false;
  return bits[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] != 0;
}

PixelMask rasterize(std::span<const Polygon> rings, std::size_t height, std::size_t width) {
  PixelMask mask;
  double min_y = INFINITY, max_y = -INFINITY, min_x = INFINITY, max_x = -INFINITY;
  for (const auto& ring : rings) {
    for (const auto& p : ring) {
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
    }
  }
  if (!(min_y <= max_y)) return mask;
  const long h = static_cast<long>(height), w = static_cast<long>(width);
  const long r_begin = std::max(0L, static_cast<long>(std::floor(min_y)));
  const long r_end = std::min(h, static_cast<long>(std::ceil(max_y)) + 1);
  const long c_begin = std::max(0L, static_cast<long>(std::floor(min_x)));
  const long c_end = std::min(w, static_cast<long>(std::ceil(max_x)) + 1);
  if (r_begin >= r_end || c_begin >= c_end) return mask;

  mask.row0 = r_begin;
  mask.col0 = c_begin;
  mask.rows = static_cast<std::size_t>(r_end - r_begin);
  mask.cols = static_cast<std::size_t>(c_end - c_begin);
  mask.bits.assign(mask.rows * mask.cols, 0);

  std::vector<double> xs;
  for (long r = r_begin; r < r_end; ++r) {
    const double yc = static_cast<double>(r) + 0.5;
    xs.clear();
    for (const auto& ring : rings) {
      const std::size_t n = ring.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = ring[i], b = ring[(i + 1) % n];
        if ((a.y <= yc) != (b.y <= yc)) xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Columns whose centre c + 0.5 lies in [xs[k], xs[k+1]).
      const long first = std::max(c_begin, static_cast<long>(std::ceil(xs[k] - 0.5)));
      const long last = std::min(c_end, static_cast<long>(std::ceil(xs[k + 1] - 0.5)));
      for (long c = first; c < last; ++c) {
        mask.bits[static_cast<std::size_t>(r - r_begin) * mask.cols +
                  static_cast<std::size_t>(c - c_begin)] = 1;
      }
    }
  }
  return mask;
}

PixelMask rasterize(const Polygon& ring, std::size_t height, std::size_t width) {
  return rasterize(std::span<const Polygon>(&ring, 1), height, width);
}

std::size_t overlap_count(const PixelMask& a, const PixelMask& b) {
  const long r0 = std::max(a.row0, b.row0);
  const long r1 = std::min(a.row0 + static_cast<long>(a.rows), b.row0 + static_cast<long>(b.rows));
  const long c0 = std::max(a.col0, b.col0);
  const long c1 = std::min(a.col0 + static_cast<long>(a.cols), b.col0 + static_cast<long>(b.cols));
  std::size_t n = 0;
  for (long r = r0; r < r1; ++r) {
    for (long c = c0; c < c1; ++c) n += (a.contains(r, c) && b.contains(r, c)) ? 1 : 0;
  }
  return n;
}

}  // namespace mslayout
