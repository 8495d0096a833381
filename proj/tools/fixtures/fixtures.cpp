#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "mslayout/errors.hpp"
#include "mslayout/random.hpp"

namespace mslayout::fixtures {

namespace {

// Documents per collection (rows) and split (train, validation, test).
constexpr std::array<std::array<std::size_t, kSplitCount>, kCollectionCount> kDocumentCounts = {{
    {285, 70, 94},
    {408, 72, 96},
    {36, 11, 14},
    {95, 40, 54},
}};

// Regions per collection (rows) and category, in category order.
constexpr std::array<std::array<std::size_t, kCategoryCount>, kCollectionCount> kRegionCounts = {{
    {5105, 1079, 0, 9, 610, 52, 153, 90, 724},
    {5359, 524, 8, 737, 547, 254, 8, 2535, 80},
    {673, 59, 0, 0, 52, 41, 0, 81, 83},
    {1857, 313, 93, 38, 166, 7, 0, 166, 292},
}};

Polygon rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

Polygon cut_corner(double x0, double y0, double x1, double y1, double cut) {
  return {{x0, y0}, {x1, y0}, {x1, y1 - cut}, {x1 - cut, y1}, {x0, y1}};
}

Polygon shifted(Polygon p, double dx, double dy) {
  for (auto& q : p) q = q + Point2{dx, dy};
  return p;
}

double jitter_value(Rng& rng, int amplitude) {
  return static_cast<double>(static_cast<int>(rng.below(2 * amplitude + 1)) - amplitude);
}

Polygon jittered(const Polygon& p, Rng& rng, int amplitude, std::size_t height,
                 std::size_t width) {
  Polygon out = p;
  for (auto& q : out) {
    q.x = std::clamp(q.x + jitter_value(rng, amplitude), 0.0, static_cast<double>(width));
    q.y = std::clamp(q.y + jitter_value(rng, amplitude), 0.0, static_cast<double>(height));
  }
  if (!is_simple(out) || signed_area(out) == 0.0) return p;
  return out;
}

RegionInstance region(const DocumentRecord& doc, Category k, Polygon polygon,
                      std::optional<double> score = std::nullopt) {
  return {doc.document_id, doc.collection, k, std::move(polygon), score};
}

DocumentRecord document(std::string id, Collection c, Split s, std::size_t h, std::size_t w) {
  return {std::move(id), c, s, h, w, {}};
}

double random_score(Rng& rng) { return static_cast<double>(1 + rng.below(1000)) / 1000.0; }

Polygon random_shape(Rng& rng, std::size_t height, std::size_t width) {
  const double w = static_cast<double>(8 + rng.below(60));
  const double h = static_cast<double>(8 + rng.below(40));
  const double x0 = static_cast<double>(rng.below(width - static_cast<std::size_t>(w)));
  const double y0 = static_cast<double>(rng.below(height - static_cast<std::size_t>(h)));
  if (rng.below(4) == 0) {
    return cut_corner(x0, y0, x0 + w, y0 + h, std::floor(std::min(w, h) / 3.0));
  }
  return rect(x0, y0, x0 + w, y0 + h);
}

void write_manifest(const std::filesystem::path& path, std::span<const DocumentRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  save_manifest(records, out);
}

}  // namespace

std::vector<DocumentRecord> dataset_corpus(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DocumentRecord> all;
  for (Collection c : kCollections) {
    std::vector<DocumentRecord> docs;
    for (Split s : kSplits) {
      for (std::size_t i = 0; i < kDocumentCounts[index_of(c)][index_of(s)]; ++i) {
        docs.push_back(document(fmt::format("{}-{}-{:04}", to_string(c), to_string(s), i + 1), c,
                                s, 300 + rng.below(300), 600 + rng.below(600)));
      }
    }
    for (Category k : kCategories) {
      for (std::size_t n = 0; n < kRegionCounts[index_of(c)][index_of(k)]; ++n) {
        DocumentRecord& doc = docs[rng.below(docs.size())];
        doc.regions.push_back(region(doc, k, random_shape(rng, doc.height, doc.width)));
      }
    }
    all.insert(all.end(), docs.begin(), docs.end());
  }
  return all;
}

std::vector<DocumentRecord> perturbed_predictions(std::span<const DocumentRecord> gt,
                                                  std::uint64_t seed) {
  Rng rng(seed ^ 0x5bd1e995ULL);
  std::vector<DocumentRecord> out;
  for (const auto& g : gt) {
    DocumentRecord p = g;
    p.regions.clear();
    for (const auto& r : g.regions) {
      if (rng.below(10) == 0) continue;
      p.regions.push_back(region(p, r.category, jittered(r.polygon, rng, 2, g.height, g.width),
                                 random_score(rng)));
    }
    if (rng.below(10) < 3) {
      const Category k = kCategories[rng.below(kCategoryCount)];
      p.regions.push_back(region(p, k, random_shape(rng, g.height, g.width), random_score(rng)));
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<DocumentRecord> self_predictions(std::span<const DocumentRecord> gt) {
  std::vector<DocumentRecord> out(gt.begin(), gt.end());
  for (auto& doc : out) {
    for (auto& r : doc.regions) r.score = 1.0;
  }
  return out;
}

EvaluationFixture evaluation_fixture(std::uint64_t seed) {
  Rng rng(seed ^ 0x2545f4914f6cdd1dULL);
  EvaluationFixture f;

  {
    DocumentRecord g = document("eval-PIH-01", Collection::PIH, Split::Test, 120, 160);
    g.regions = {
        region(g, Category::PB, rect(2, 2, 158, 118)),
        region(g, Category::CLS, rect(10, 10, 70, 22)),
        region(g, Category::CLS, rect(10, 30, 70, 42)),
        region(g, Category::CLS, rect(10, 50, 70, 62)),
        region(g, Category::CC, rect(90, 10, 110, 30)),
        region(g, Category::CC, rect(120, 10, 140, 30)),
        region(g, Category::Hv, cut_corner(90, 60, 110, 80, 6)),
        region(g, Category::Hp, rect(120, 60, 150, 90)),
    };
    DocumentRecord p = g;
    p.regions = {
        region(p, Category::CLS, jittered(g.regions[1].polygon, rng, 1, 120, 160), 0.9),
        region(p, Category::CLS, jittered(g.regions[2].polygon, rng, 1, 120, 160), 0.85),
        region(p, Category::CLS, jittered(g.regions[3].polygon, rng, 1, 120, 160), 0.6),
        region(p, Category::CLS, shifted(g.regions[1].polygon, 0, 3), 0.7),
        region(p, Category::CLS, rect(10, 90, 60, 100), 0.95),
        region(p, Category::CC, jittered(g.regions[4].polygon, rng, 1, 120, 160), 0.8),
        region(p, Category::Hv, shifted(g.regions[6].polygon, 8, 0), 0.5),
        region(p, Category::Hp, jittered(g.regions[7].polygon, rng, 2, 120, 160), 0.75),
        region(p, Category::PB, jittered(g.regions[0].polygon, rng, 2, 120, 160), 0.99),
    };
    f.gt.push_back(std::move(g));
    f.pred.push_back(std::move(p));
  }
  {
    DocumentRecord g = document("eval-Bhoomi-01", Collection::Bhoomi, Split::Test, 100, 200);
    g.regions = {
        region(g, Category::CLS, rect(20, 10, 180, 20)),
        region(g, Category::CLS, rect(20, 26, 180, 36)),
        region(g, Category::LM, rect(4, 40, 16, 70)),
        region(g, Category::DP, cut_corner(60, 44, 100, 84, 10)),
        region(g, Category::PD, rect(120, 44, 150, 64)),
        region(g, Category::PD, rect(160, 44, 190, 94)),
        region(g, Category::BL, {{20, 90}, {100, 88}, {100, 94}, {20, 96}}),
    };
    DocumentRecord p = g;
    p.regions = {
        region(p, Category::CLS, jittered(g.regions[0].polygon, rng, 1, 100, 200), 0.97),
        region(p, Category::CLS, jittered(g.regions[1].polygon, rng, 1, 100, 200), 0.92),
        region(p, Category::LM, jittered(g.regions[2].polygon, rng, 1, 100, 200), 0.66),
        region(p, Category::PD, jittered(g.regions[4].polygon, rng, 1, 100, 200), 0.81),
        region(p, Category::PD, rect(160, 44, 190, 74), 0.77),
        region(p, Category::BL, jittered(g.regions[6].polygon, rng, 1, 100, 200), 0.58),
        region(p, Category::CC, rect(110, 70, 130, 90), 0.45),
    };
    f.gt.push_back(std::move(g));
    f.pred.push_back(std::move(p));
  }
  {
    DocumentRecord g = document("eval-Jain-01", Collection::Jain, Split::Test, 80, 120);
    g.regions = {
        region(g, Category::CLS, rect(10, 8, 110, 18)),
        region(g, Category::CLS, rect(10, 24, 110, 34)),
        region(g, Category::PD, rect(14, 44, 44, 70)),
        region(g, Category::BL, rect(50, 40, 54, 76)),
        region(g, Category::DP, cut_corner(64, 42, 108, 74, 8)),
    };
    DocumentRecord p = g;
    p.regions = {
        region(p, Category::CLS, jittered(g.regions[0].polygon, rng, 1, 80, 120), 0.55),
        region(p, Category::CLS, jittered(g.regions[1].polygon, rng, 1, 80, 120), 0.88),
        region(p, Category::PD, jittered(g.regions[2].polygon, rng, 2, 80, 120), 0.72),
        region(p, Category::BL, shifted(g.regions[3].polygon, 3, 0), 0.4),
        region(p, Category::DP, jittered(g.regions[4].polygon, rng, 1, 80, 120), 0.83),
        region(p, Category::Hp, rect(90, 2, 100, 6), 0.3),
    };
    f.gt.push_back(std::move(g));
    f.pred.push_back(std::move(p));
  }
  return f;
}

std::vector<DocumentRecord> rare_category_manifest() {
  std::vector<DocumentRecord> out;
  for (std::size_t i = 0; i < 10; ++i) {
    const Split s = i < 8 ? Split::Train : Split::Test;
    DocumentRecord d = document(fmt::format("rare-{:02}", i + 1), Collection::ASR, s, 64, 64);
    d.regions.push_back(region(d, Category::CLS, rect(4, 4, 60, 12)));
    if (i == 0) d.regions.push_back(region(d, Category::LM, rect(4, 20, 20, 40)));
    if (i == 1 || i == 2) d.regions.push_back(region(d, Category::PB, rect(1, 1, 63, 63)));
    if (i == 9) d.regions.push_back(region(d, Category::Hv, rect(30, 30, 40, 40)));
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<DocumentRecord> frequent_category_manifest() {
  std::vector<DocumentRecord> out;
  for (std::size_t i = 0; i < 4; ++i) {
    DocumentRecord d =
        document(fmt::format("freq-{:02}", i + 1), Collection::Jain, Split::Train, 64, 64);
    d.regions.push_back(region(d, Category::CLS, rect(4, 4, 60, 12)));
    d.regions.push_back(region(d, Category::CC, rect(4, 20, 12, 28)));
    out.push_back(std::move(d));
  }
  return out;
}

void write_fixture_set(const std::filesystem::path& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  write_manifest(dir / "dataset_manifest.jsonl", dataset_corpus(seed));
  const auto eval = evaluation_fixture(seed);
  write_manifest(dir / "eval_gt.jsonl", eval.gt);
  write_manifest(dir / "eval_pred.jsonl", eval.pred);
  write_manifest(dir / "rare_categories.jsonl", rare_category_manifest());
  write_manifest(dir / "frequent_categories.jsonl", frequent_category_manifest());
}

}  // namespace mslayout::fixtures
