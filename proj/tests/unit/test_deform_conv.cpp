#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mslayout/deform_conv.hpp"
#include "mslayout/errors.hpp"

using namespace mslayout;

namespace {

double max_abs(const Tensor& t, const oracle::T3& o) {
  double m = 0.0;
  for (std::size_t c = 0; c < t.dim(0); ++c)
    for (std::size_t r = 0; r < t.dim(1); ++r)
      for (std::size_t k = 0; k < t.dim(2); ++k) m = std::max(m, std::abs(t(c, r, k) - o[c][r][k]));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("tap grid") {
  const auto taps = tap_grid(3);
  REQUIRE(taps.size() == 9);
  CHECK(taps[0] == Point2{-1, -1});
  CHECK(taps[1] == Point2{0, -1});
  CHECK(taps[4] == Point2{0, 0});
  CHECK(taps[5] == Point2{1, 0});
  CHECK(taps[8] == Point2{1, 1});
  CHECK(tap_grid(5).size() == 25);
  CHECK_THROWS_AS(tap_grid(4), ValidationError);
}

TEST_CASE("regular_conv2d examples") {
  Rng rng(21);
  const Tensor x = testing::random_tensor(rng, {1, 5, 6});
  Tensor delta({1, 1, 3, 3});
  delta(0, 0, 1, 1) = 1.0;
  CHECK(max_abs_diff(regular_conv2d(x, ConvKernel(delta)), x) == 0.0);

  const Tensor zero_out = regular_conv2d(x, ConvKernel(Tensor({2, 1, 3, 3})));
  for (double v : zero_out.data()) CHECK(v == 0.0);

  const Tensor ones = regular_conv2d(Tensor({1, 5, 5}, 1.0), ConvKernel(Tensor({1, 1, 3, 3}, 1.0)));
  CHECK(ones(0, 2, 2) == 9.0);
  CHECK(ones(0, 0, 0) == 4.0);
  CHECK(ones(0, 0, 2) == 6.0);

  CHECK_THROWS_AS(regular_conv2d(Tensor({2, 4, 4}), ConvKernel(Tensor({1, 1, 3, 3}))), ValidationError);
}

TEST_CASE("zero offsets reproduce regular convolution exactly") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = testing::random_tensor(rng, {2, 7, 5});
    const ConvKernel k(testing::random_tensor(rng, {3, 2, 3, 3}));
    const Tensor d = deformable_conv2d(x, k, OffsetField::zeros(9, 7, 5));
    CHECK(max_abs_diff(d, regular_conv2d(x, k)) < 1e-12);
  }
}

TEST_CASE("integer offset (0,1) equals convolving the input shifted left away from the left edge") {
  Rng rng(23);
  const Tensor x = testing::random_tensor(rng, {1, 5, 6});
  const ConvKernel k(testing::random_tensor(rng, {1, 1, 3, 3}));
  Tensor off({18, 5, 6});
  for (std::size_t n = 0; n < 9; ++n)
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 6; ++c) off(2 * n + 1, r, c) = 1.0;  // Δx = 1, Δy = 0
  Tensor shifted({1, 5, 6});
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c + 1 < 6; ++c) shifted(0, r, c) = x(0, r, c + 1);
  const Tensor a = deformable_conv2d(x, k, OffsetField(off)), b = regular_conv2d(shifted, k);
  double worst = 0.0;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 1; c < 6; ++c) worst = std::max(worst, std::abs(a(0, r, c) - b(0, r, c)));
  CHECK(worst < 1e-12);
}

TEST_CASE("deformable_conv2d matches the definition-level oracle") {
  Rng rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor x = testing::random_tensor(rng, {1 + rng.below(2), 4, 4});
    const ConvKernel k(testing::random_tensor(rng, {2, x.dim(0), 3, 3}));
    Tensor off({18, 4, 4});
    for (auto& v : off.data()) v = rng.uniform(-2.0, 2.0);
    const Tensor y = deformable_conv2d(x, k, OffsetField(off));
    CHECK(max_abs(y, oracle::deformable_conv(testing::to_t3(x), testing::to_t4(k.weights()), testing::to_t3(off))) < 1e-12);
  }
}

TEST_CASE("offset field layout is (dy, dx) per tap") {
  Tensor off({18, 2, 2});
  off(2 * 4, 1, 0) = 0.25;
  off(2 * 4 + 1, 1, 0) = -0.5;
  const OffsetField f(off);
  CHECK(f.at(4, 1, 0) == Point2{-0.5, 0.25});
  CHECK(f.tap_count() == 9);
  CHECK_THROWS_AS(OffsetField(Tensor({3, 2, 2})), ValidationError);
}

TEST_CASE("deformable_conv2d rejects mismatched shapes") {
  const ConvKernel k(Tensor({1, 1, 3, 3}));
  CHECK_THROWS_AS(deformable_conv2d(Tensor({1, 4, 4}), k, OffsetField::zeros(9, 4, 5)), ValidationError);
  CHECK_THROWS_AS(deformable_conv2d(Tensor({1, 4, 4}), k, OffsetField::zeros(4, 4, 4)), ValidationError);
  CHECK_THROWS_AS(deformable_conv2d(Tensor({2, 4, 4}), k, OffsetField::zeros(9, 4, 4)), ValidationError);
}

TEST_CASE("generate_offsets") {
  Rng rng(25);
  const Tensor x = testing::random_tensor(rng, {1, 4, 4});
  const ConvKernel zero(Tensor({18, 1, 3, 3}));
  const OffsetField none = generate_offsets(x, zero);
  CHECK(none.offsets().shape() == Tensor::Shape{18, 4, 4});
  for (double v : none.offsets().data()) CHECK(v == 0.0);

  const ConvKernel main(testing::random_tensor(rng, {2, 1, 3, 3}));
  CHECK(max_abs_diff(deformable_conv2d(x, main, none), regular_conv2d(x, main)) < 1e-12);

  const ConvKernel gen(testing::random_tensor(rng, {18, 1, 3, 3}));
  Tensor x2 = x;
  for (auto& v : x2.data()) v *= 2.0;
  const OffsetField a = generate_offsets(x, gen), b = generate_offsets(x2, gen);
  for (std::size_t i = 0; i < a.offsets().size(); ++i) {
    CHECK(std::abs(b.offsets()[i] - 2.0 * a.offsets()[i]) < 1e-12);
  }
  CHECK_THROWS_AS(generate_offsets(x, ConvKernel(Tensor({9, 1, 3, 3}))), ValidationError);
}

TEST_CASE("output is linear in the weights") {
  Rng rng(26);
  const Tensor x = testing::random_tensor(rng, {2, 5, 5});
  Tensor off({18, 5, 5});
  for (auto& v : off.data()) v = rng.uniform(-1.0, 1.0);
  const OffsetField f(off);
  const Tensor w1 = testing::random_tensor(rng, {2, 2, 3, 3}), w2 = testing::random_tensor(rng, {2, 2, 3, 3});
  Tensor mix(w1.shape());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.3 * w1[i] - 1.7 * w2[i];
  const Tensor y1 = deformable_conv2d(x, ConvKernel(w1), f), y2 = deformable_conv2d(x, ConvKernel(w2), f);
  const Tensor ym = deformable_conv2d(x, ConvKernel(mix), f);
  for (std::size_t i = 0; i < ym.size(); ++i) CHECK(std::abs(ym[i] - (0.3 * y1[i] - 1.7 * y2[i])) < 1e-12);
}

TEST_CASE("regular_conv2d is translation equivariant away from the border") {
  Rng rng(27);
  const Tensor x = testing::random_tensor(rng, {1, 8, 8});
  const ConvKernel k(testing::random_tensor(rng, {1, 1, 3, 3}));
  Tensor sx({1, 8, 8});
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 1; c < 8; ++c) sx(0, r, c) = x(0, r, c - 1);
  const Tensor y = regular_conv2d(x, k), ys = regular_conv2d(sx, k);
  for (std::size_t r = 1; r < 7; ++r)
    for (std::size_t c = 2; c < 7; ++c) CHECK(std::abs(ys(0, r, c) - y(0, r, c - 1)) < 1e-12);
}

TEST_CASE("deformable_conv2d_backward") {
  Rng rng(28);
  const Tensor x = testing::random_tensor(rng, {2, 5, 4});
  const ConvKernel k(testing::random_tensor(rng, {2, 2, 3, 3}));
  Tensor off({18, 5, 4});
  for (auto& v : off.data()) v = static_cast<double>(rng.below(3)) - 1.0 + rng.uniform(0.01, 0.99);
  const OffsetField f(off);

  const auto zero = deformable_conv2d_backward(x, k, f, Tensor({2, 5, 4}));
  for (const Tensor* t : {&zero.d_input, &zero.d_weights, &zero.d_offsets})
    for (double v : t->data()) CHECK(v == 0.0);

  const Tensor up = testing::random_tensor(rng, {2, 5, 4});
  const auto g = deformable_conv2d_backward(x, k, f, up);
  CHECK(g.d_input.shape() == x.shape());
  CHECK(g.d_weights.shape() == k.weights().shape());
  CHECK(g.d_offsets.shape() == off.shape());

  const auto num_w = central_finite_difference(
      [&](std::span<const double> v) {
        return dot(up.data(), deformable_conv2d(x, ConvKernel(Tensor(k.weights().shape(), {v.begin(), v.end()})), f).data());
      },
      k.weights().data(), 1e-6);
  CHECK(gradient_relative_error(g.d_weights.data(), num_w) < 1e-6);

  const auto num_o = central_finite_difference(
      [&](std::span<const double> v) {
        return dot(up.data(), deformable_conv2d(x, k, OffsetField(Tensor(off.shape(), {v.begin(), v.end()}))).data());
      },
      off.data(), 1e-6);
  CHECK(gradient_relative_error(g.d_offsets.data(), num_o) < 1e-5);

  const auto num_x = central_finite_difference(
      [&](std::span<const double> v) {
        return dot(up.data(), deformable_conv2d(Tensor(x.shape(), {v.begin(), v.end()}), k, f).data());
      },
      x.data(), 1e-6);
  CHECK(gradient_relative_error(g.d_input.data(), num_x) < 1e-6);

  CHECK_THROWS_AS(deformable_conv2d_backward(x, k, f, Tensor({1, 5, 4})), ValidationError);
}
