#include "mslayout/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "mslayout/errors.hpp"

namespace mslayout {

double category_repeat_factor(double frequency, double threshold) {
  if (!(frequency > 0.0)) return 1.0;  // category absent from training
  return std::max(1.0, std::sqrt(threshold / frequency));
}

RepeatPlan repeat_factors(std::span<const DocumentRecord> records, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError("repeat-factor threshold must lie in (0, 1]");
  }
  RepeatPlan plan;
  plan.threshold = threshold;

  std::array<std::size_t, kCategoryCount> images_with{};
  for (const auto& doc : records) {
    if (doc.split != Split::Train) continue;
    ++plan.train_images;
    std::array<bool, kCategoryCount> seen{};
    for (const auto& r : doc.regions) seen[index_of(r.category)] = true;
    for (std::size_t k = 0; k < kCategoryCount; ++k) images_with[k] += seen[k] ? 1 : 0;
  }
  if (plan.train_images == 0) throw ValidationError("no documents in the train split");

  for (std::size_t k = 0; k < kCategoryCount; ++k) {
    plan.category_frequency[k] =
        static_cast<double>(images_with[k]) / static_cast<double>(plan.train_images);
    plan.category_factor[k] = category_repeat_factor(plan.category_frequency[k], threshold);
  }

  for (const auto& doc : records) {
    if (doc.split != Split::Train) continue;
    double r = 1.0;
    for (const auto& region : doc.regions) {
      r = std::max(r, plan.category_factor[index_of(region.category)]);
    }
    plan.documents.push_back({doc.document_id, r});
  }
  return plan;
}

double RepeatPlan::expected_epoch_length() const {
  double total = 0.0;
  for (const auto& d : documents) total += d.factor;
  return total;
}

std::size_t RepeatPlan::ceiling_epoch_length() const {
  std::size_t total = 0;
  for (const auto& d : documents) total += static_cast<std::size_t>(std::ceil(d.factor));
  return total;
}

}  // namespace mslayout
