#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mslayout/dataset.hpp"

namespace mslayout {

inline constexpr double kDefaultRepeatThreshold = 0.001;

struct DocumentRepeat {
  std::string document_id;
  double factor = 1.0;
};

/// Image-level repeat factors for the training split.
///
/// f(c) is the fraction of training images with at least one instance of c,
/// r(c) = max(1, √(t / f(c))), and an image repeats max_c r(c) over the
/// categories it contains (1 for images without regions).
struct RepeatPlan {
  double threshold = kDefaultRepeatThreshold;
  std::size_t train_images = 0;
  std::array<double, kCategoryCount> category_frequency{};
  std::array<double, kCategoryCount> category_factor{};
  std::vector<DocumentRepeat> documents;

  /// Σ r(I): expected epoch length under stochastic rounding.
  double expected_epoch_length() const;
  /// Σ ⌈r(I)⌉: epoch length when every factor is rounded up.
  std::size_t ceiling_epoch_length() const;
};

double category_repeat_factor(double frequency, double threshold);

RepeatPlan repeat_factors(std::span<const DocumentRecord> records,
                          double threshold = kDefaultRepeatThreshold);

}  // namespace mslayout
