#include "mslayout/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "mslayout/defgrid.hpp"
#include "mslayout/deform_conv.hpp"
#include "mslayout/random.hpp"

namespace mslayout {

namespace {

Tensor normal_tensor(Rng& rng, Tensor::Shape shape) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.normal();
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_deform_conv(Rng& rng, double eps, SuiteResult& input_suite,
                       SuiteResult& weight_suite, SuiteResult& offset_suite) {
  const std::size_t k = 3;
  const std::size_t cin = 1 + rng.below(2), cout = 1 + rng.below(2);
  const std::size_t h = 3 + rng.below(6), w = 3 + rng.below(6);

  const Tensor input = normal_tensor(rng, {cin, h, w});
  const ConvKernel kernel(normal_tensor(rng, {cout, cin, k, k}));
  Tensor off({2 * k * k, h, w});
  for (auto& v : off.data()) {
    v = static_cast<double>(rng.below(3)) - 1.0 + rng.uniform(0.01, 0.99);
  }
  const OffsetField field(off);
  const Tensor upstream = normal_tensor(rng, {cout, h, w});
  const auto grads = deformable_conv2d_backward(input, kernel, field, upstream);

  const auto objective = [&](const Tensor& x, const Tensor& wt, const Tensor& o) {
    return dot(upstream.data(), deformable_conv2d(x, ConvKernel(wt), OffsetField(o)).data());
  };

  const auto num_input = central_finite_difference(
      [&](std::span<const double> v) {
        return objective(Tensor(input.shape(), {v.begin(), v.end()}), kernel.weights(), off);
      },
      input.data(), eps);
  const auto num_weights = central_finite_difference(
      [&](std::span<const double> v) {
        return objective(input, Tensor(kernel.weights().shape(), {v.begin(), v.end()}), off);
      },
      kernel.weights().data(), eps);
  const auto num_offsets = central_finite_difference(
      [&](std::span<const double> v) {
        return objective(input, kernel.weights(), Tensor(off.shape(), {v.begin(), v.end()}));
      },
      off.data(), eps);

  const auto record = [](SuiteResult& s, std::span<const double> a, std::span<const double> n) {
    ++s.instances;
    s.max_relative_error = std::max(s.max_relative_error, gradient_relative_error(a, n));
  };
  record(input_suite, grads.d_input.data(), num_input);
  record(weight_suite, grads.d_weights.data(), num_weights);
  record(offset_suite, grads.d_offsets.data(), num_offsets);
}

std::vector<double> flatten(std::span<const Point2> pts) {
  std::vector<double> out;
  out.reserve(2 * pts.size());
  for (const auto& p : pts) {
    out.push_back(p.x);
    out.push_back(p.y);
  }
  return out;
}

std::vector<Point2> unflatten(std::span<const double> v) {
  std::vector<Point2> out(v.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {v[2 * i], v[2 * i + 1]};
  return out;
}

void check_defgrid(Rng& rng, double eps, SuiteResult& area_suite, SuiteResult& dir_suite) {
  const DeformableGrid grid = build_grid(3 + rng.below(6), 3 + rng.below(6));
  std::vector<Point2> raw(grid.vertex_count());
  for (auto& p : raw) p = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
  const auto at = flatten(raw);

  const auto num_area = central_finite_difference(
      [&](std::span<const double> v) {
        return area_uniformity_loss(apply_offsets(grid, unflatten(v)));
      },
      at, eps);
  const auto num_dir = central_finite_difference(
      [&](std::span<const double> v) { return neighbor_direction_loss(grid, unflatten(v)); }, at,
      eps);

  ++area_suite.instances;
  area_suite.max_relative_error =
      std::max(area_suite.max_relative_error,
               gradient_relative_error(flatten(area_uniformity_gradient(grid, raw)), num_area));
  ++dir_suite.instances;
  dir_suite.max_relative_error =
      std::max(dir_suite.max_relative_error,
               gradient_relative_error(flatten(neighbor_direction_gradient(grid, raw)), num_dir));
}

}  // namespace

std::vector<SuiteResult> run_gradient_checks(const GradcheckOptions& options) {
  std::vector<SuiteResult> suites = {{"deform_conv.input"},
                                     {"deform_conv.weights"},
                                     {"deform_conv.offsets"},
                                     {"defgrid.area_uniformity"},
                                     {"defgrid.neighbor_direction"}};
  Rng conv_rng(options.seed);
  Rng grid_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = 0; i < options.instances; ++i) {
    check_deform_conv(conv_rng, options.eps, suites[0], suites[1], suites[2]);
    check_defgrid(grid_rng, options.eps, suites[3], suites[4]);
  }
  return suites;
}

}  // namespace mslayout
