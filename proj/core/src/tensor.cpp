#include "mslayout/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mslayout/errors.hpp"

namespace mslayout {

std::size_t shape_volume(const Tensor::Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  for (auto d : shape_) {
    if (d == 0) throw ValidationError("tensor dimensions must be positive");
  }
  data_.assign(shape_volume(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_) {
    if (d == 0) throw ValidationError("tensor dimensions must be positive");
  }
  if (data_.size() != shape_volume(shape_)) {
    throw ValidationError("tensor data length " + std::to_string(data_.size()) +
                          " does not match shape volume " +
                          std::to_string(shape_volume(shape_)));
  }
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t h = rows.size();
  const std::size_t w = h == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(h * w);
  for (const auto& row : rows) {
    if (row.size() != w) throw ValidationError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({h, w}, std::move(data));
}

std::span<const double> Tensor::channel(std::size_t c) const {
  if (rank() != 3) throw ValidationError("channel() requires a rank-3 tensor");
  const std::size_t plane = shape_[1] * shape_[2];
  return std::span<const double>(data_).subspan(c * plane, plane);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ValidationError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace {

struct Corners {
  long y0, x0;
  double ly, lx;
};

// Points further than this outside the map only ever touch padding.
bool far_outside(Point2 p, std::size_t height, std::size_t width) {
  return p.x < -1.0 || p.y < -1.0 || p.x >= static_cast<double>(width) ||
         p.y >= static_cast<double>(height);
}

Corners corners_of(Point2 p) {
  const double fy = std::floor(p.y);
  const double fx = std::floor(p.x);
  return {static_cast<long>(fy), static_cast<long>(fx), p.y - fy, p.x - fx};
}

double value_at(std::span<const double> map, std::size_t height, std::size_t width, long r,
                long c) {
  if (r < 0 || c < 0 || r >= static_cast<long>(height) || c >= static_cast<long>(width)) {
    return 0.0;
  }
  return map[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)];
}

void check_map(std::span<const double> map, std::size_t height, std::size_t width, Point2 p) {
  if (height == 0 || width == 0 || map.size() != height * width) {
    throw ValidationError("bilinear_sample: empty or inconsistent map");
  }
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw ValidationError("bilinear_sample: non-finite sampling location");
  }
}

void check_rank2(const Tensor& map) {
  if (map.rank() != 2 || map.empty()) {
    throw ValidationError("bilinear_sample: expected a non-empty 2D map");
  }
}

}  // namespace

double bilinear_sample(std::span<const double> map, std::size_t height, std::size_t width,
                       Point2 p) {
  check_map(map, height, width, p);
  if (far_outside(p, height, width)) return 0.0;
  const auto [y0, x0, ly, lx] = corners_of(p);
  const double v00 = value_at(map, height, width, y0, x0);
  const double v01 = value_at(map, height, width, y0, x0 + 1);
  const double v10 = value_at(map, height, width, y0 + 1, x0);
  const double v11 = value_at(map, height, width, y0 + 1, x0 + 1);
  const double top = v00 + lx * (v01 - v00);
  const double bottom = v10 + lx * (v11 - v10);
  return top + ly * (bottom - top);
}

double bilinear_sample(const Tensor& map, Point2 p) {
  check_rank2(map);
  return bilinear_sample(map.data(), map.dim(0), map.dim(1), p);
}

BilinearGrad bilinear_sample_grad(std::span<const double> map, std::size_t height,
                                  std::size_t width, Point2 p) {
  check_map(map, height, width, p);
  BilinearGrad g;
  if (far_outside(p, height, width)) return g;
  const auto [y0, x0, ly, lx] = corners_of(p);
  const double hy = 1.0 - ly;
  const double hx = 1.0 - lx;
  const long rows[4] = {y0, y0, y0 + 1, y0 + 1};
  const long cols[4] = {x0, x0 + 1, x0, x0 + 1};
  const double weights[4] = {hy * hx, hy * lx, ly * hx, ly * lx};
  double v[4];
  for (int i = 0; i < 4; ++i) {
    const bool inside = rows[i] >= 0 && cols[i] >= 0 && rows[i] < static_cast<long>(height) &&
                        cols[i] < static_cast<long>(width);
    g.taps[i] = {rows[i], cols[i], weights[i], inside};
    v[i] = value_at(map, height, width, rows[i], cols[i]);
  }
  g.d_point.x = hy * (v[1] - v[0]) + ly * (v[3] - v[2]);
  g.d_point.y = hx * (v[2] - v[0]) + lx * (v[3] - v[1]);
  return g;
}

BilinearGrad bilinear_sample_grad(const Tensor& map, Point2 p) {
  check_rank2(map);
  return bilinear_sample_grad(map.data(), map.dim(0), map.dim(1), p);
}

std::vector<double> central_finite_difference(
    const std::function<double(std::span<const double>)>& f, std::span<const double> at,
    double eps) {
  if (!(eps > 0.0)) throw ValidationError("central_finite_difference: eps must be positive");
  std::vector<double> x(at.begin(), at.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double fp = f(x);
    x[i] = orig - eps;
    const double fm = f(x);
    x[i] = orig;
    grad[i] = (fp - fm) / (2.0 * eps);
  }
  return grad;
}

double gradient_relative_error(std::span<const double> analytic,
                               std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) {
    throw ValidationError("gradient_relative_error: length mismatch");
  }
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return scale == 0.0 ? 0.0 : diff / scale;
}

}  // namespace mslayout
