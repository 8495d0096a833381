#include "mslayout/anchors.hpp"

#include <cmath>

#include "mslayout/errors.hpp"

namespace mslayout {

std::vector<Anchor> generate_anchors(std::span<const double> sizes,
                                     std::span<const double> ratios) {
  std::vector<Anchor> out;
  out.reserve(sizes.size() * ratios.size());
  for (double size : sizes) {
    if (!(size > 0.0)) throw ValidationError("anchor sizes must be positive");
    for (double ratio : ratios) {
      if (!(ratio > 0.0)) throw ValidationError("anchor aspect ratios must be positive");
      const double root = std::sqrt(ratio);
      out.push_back({size, ratio, size / root, size * root});
    }
  }
  return out;
}

}  // namespace mslayout
