#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace mslayout {

/// A location on a 2D feature map or image. `x` runs along columns (right),
/// `y` along rows (down); one unit is one cell of the sampling lattice.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

/// Dense row-major tensor of doubles.
class Tensor {
 public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  /// Builds a 2D tensor from nested rows; all rows must have equal length.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }

  /// Read-only view of channel `c` of a rank-3 tensor as a rank-2 slab.
  std::span<const double> channel(std::size_t c) const;

  bool all_finite() const noexcept;

 private:
  Shape shape_;
  std::vector<double> data_;
};

std::size_t shape_volume(const Tensor::Shape& shape);

/// Maximum absolute elementwise difference; shapes must match.
double max_abs_diff(const Tensor& a, const Tensor& b);

/// One of the four integer neighbours that contribute to a bilinear sample.
struct BilinearTap {
  long row = 0;
  long col = 0;
  double weight = 0.0;
  bool in_bounds = false;
};

struct BilinearGrad {
  /// Partial derivatives of the sample w.r.t. the four neighbour values.
  /// Out-of-range taps keep their weight but are flagged `in_bounds = false`.
  std::array<BilinearTap, 4> taps{};
  /// Partial derivative of the sample w.r.t. the sampling location.
  Point2 d_point{};
};

/// Bilinear interpolation of a H×W slab stored row-major. Taps falling
/// outside [0,H-1]×[0,W-1] read as zero.
double bilinear_sample(std::span<const double> map, std::size_t height, std::size_t width,
                       Point2 p);
double bilinear_sample(const Tensor& map, Point2 p);

/// Analytic derivatives of bilinear_sample. On lattice lines, where the
/// sample is not differentiable, the right-hand derivative is returned.
BilinearGrad bilinear_sample_grad(std::span<const double> map, std::size_t height,
                                  std::size_t width, Point2 p);
BilinearGrad bilinear_sample_grad(const Tensor& map, Point2 p);

/// Central finite differences of `f` at `at`, one coordinate at a time.
std::vector<double> central_finite_difference(
    const std::function<double(std::span<const double>)>& f, std::span<const double> at,
    double eps);

/// ‖analytic − numeric‖∞ / max(‖analytic‖∞, ‖numeric‖∞); 0 when both vanish.
double gradient_relative_error(std::span<const double> analytic,
                               std::span<const double> numeric);

}  // namespace mslayout
