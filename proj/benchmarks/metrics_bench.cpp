#include <benchmark/benchmark.h>

#include <vector>

#include "mslayout/deform_conv.hpp"
#include "mslayout/detection.hpp"
#include "mslayout/hausdorff.hpp"
#include "mslayout/random.hpp"

using namespace mslayout;

namespace {

std::vector<Point2> random_points(Rng& rng, std::size_t n, double extent) {
  std::vector<Point2> out(n);
  for (auto& p : out) p = {rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
  return out;
}

Tensor random_tensor(Rng& rng, Tensor::Shape shape) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.normal();
  return t;
}

void BM_DirectedHd(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_points(rng, n, 5000), b = random_points(rng, n, 5000);
  for (auto _ : state) benchmark::DoNotOptimize(directed_hd(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DirectedHd)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BoundaryMetrics(benchmark::State& state) {
  Rng rng(2);
  const auto a = random_points(rng, 4000, 1000), b = random_points(rng, 4000, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(boundary_metrics(a, b));
}
BENCHMARK(BM_BoundaryMetrics)->Unit(benchmark::kMillisecond);

void BM_DeformableConv(benchmark::State& state) {
  Rng rng(3);
  const auto s = static_cast<std::size_t>(state.range(0));
  const Tensor x = random_tensor(rng, {8, s, s});
  const ConvKernel kernel(random_tensor(rng, {8, 8, 3, 3}));
  Tensor offsets = random_tensor(rng, {18, s, s});
  const OffsetField field(std::move(offsets));
  for (auto _ : state) benchmark::DoNotOptimize(deformable_conv2d(x, kernel, field));
}
BENCHMARK(BM_DeformableConv)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DeformableConvBackward(benchmark::State& state) {
  Rng rng(4);
  const Tensor x = random_tensor(rng, {8, 32, 32});
  const ConvKernel kernel(random_tensor(rng, {8, 8, 3, 3}));
  const OffsetField field(random_tensor(rng, {18, 32, 32}));
  const Tensor upstream = random_tensor(rng, {8, 32, 32});
  for (auto _ : state) benchmark::DoNotOptimize(deformable_conv2d_backward(x, kernel, field, upstream));
}
BENCHMARK(BM_DeformableConvBackward)->Unit(benchmark::kMillisecond);

void BM_MaskIou(benchmark::State& state) {
  const Polygon a = {{10, 10}, {900, 14}, {905, 60}, {12, 55}};
  const Polygon b = {{15, 12}, {880, 10}, {890, 58}, {20, 62}};
  const RegionInstance ga{"d", Collection::PIH, Category::CLS, a, std::nullopt};
  const RegionInstance pb{"d", Collection::PIH, Category::CLS, b, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(mask_iou(ga, pb, 600, 1200));
}
BENCHMARK(BM_MaskIou)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
