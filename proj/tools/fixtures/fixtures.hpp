#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mslayout/dataset.hpp"

namespace mslayout::fixtures {

inline constexpr std::uint64_t kDefaultSeed = 20211;

/// Synthetic corpus with the published document counts per collection and
/// split and region counts per collection and category. Regions are small
/// axis-aligned rectangles and cut-corner pentagons.
std::vector<DocumentRecord> dataset_corpus(std::uint64_t seed = kDefaultSeed);

/// Jittered copies of `gt` with seeded scores, dropped regions and false
/// positives, for evaluation and determinism runs.
std::vector<DocumentRecord> perturbed_predictions(std::span<const DocumentRecord> gt,
                                                  std::uint64_t seed = kDefaultSeed);

/// Copy of `gt` where every region is its own prediction with score 1.
std::vector<DocumentRecord> self_predictions(std::span<const DocumentRecord> gt);

struct EvaluationFixture {
  std::vector<DocumentRecord> gt;
  std::vector<DocumentRecord> pred;
};

/// Three small documents (PIH, Bhoomi, Jain) covering all nine categories
/// with hits, misses, duplicates, partial overlaps and stray categories.
EvaluationFixture evaluation_fixture(std::uint64_t seed = kDefaultSeed);

/// Eight train documents (plus two test documents): LM appears in one and PB
/// in two of the train documents, CLS in all of them.
std::vector<DocumentRecord> rare_category_manifest();

/// Four train documents, each holding CLS and CC.
std::vector<DocumentRecord> frequent_category_manifest();

/// Writes the committed fixture set into `dir`.
void write_fixture_set(const std::filesystem::path& dir, std::uint64_t seed = kDefaultSeed);

}  // namespace mslayout::fixtures
