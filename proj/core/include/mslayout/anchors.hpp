#pragma once

#include <span>
#include <vector>

namespace mslayout {

/// Region-proposal box template. `ratio` is height / width and the area is
/// always size².
struct Anchor {
  double size = 0.0;
  double ratio = 0.0;
  double width = 0.0;
  double height = 0.0;
};

inline constexpr double kDefaultAnchorSizes[] = {32, 64, 128, 256, 512};
inline constexpr double kDefaultAnchorRatios[] = {0.5, 1.0, 2.0};

/// One anchor per (size, ratio), size-major: w = size/√ratio, h = size·√ratio.
std::vector<Anchor> generate_anchors(std::span<const double> sizes = kDefaultAnchorSizes,
                                     std::span<const double> ratios = kDefaultAnchorRatios);

}  // namespace mslayout
