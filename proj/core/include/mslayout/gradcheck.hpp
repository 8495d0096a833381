#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mslayout {

struct GradcheckOptions {
  std::uint64_t seed = 0;
  double eps = 1e-6;
  std::size_t instances = 50;
};

struct SuiteResult {
  std::string name;
  std::size_t instances = 0;
  /// Largest normwise relative error over all instances.
  double max_relative_error = 0.0;
};

/// Finite-difference checks of every analytic gradient on seeded random
/// problems. Sample locations stay at least 1e-2 away from the lattice lines
/// where bilinear interpolation has kinks, and raw grid offsets stay inside
/// the clamp range.
///
/// Suites: deform_conv.input, deform_conv.weights, deform_conv.offsets,
/// defgrid.area_uniformity, defgrid.neighbor_direction.
std::vector<SuiteResult> run_gradient_checks(const GradcheckOptions& options = {});

}  // namespace mslayout
