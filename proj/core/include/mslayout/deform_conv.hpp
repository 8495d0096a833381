#pragma once

#include <cstddef>
#include <vector>

#include "mslayout/tensor.hpp"

namespace mslayout {

/// Convolution filter bank with an odd square support.
///
/// `weights` has shape C_out×C_in×k×k. Tap n = i·k + j sits at the integer
/// displacement (x = j − k/2, y = i − k/2); for k = 3 the taps enumerate the
/// 3×3 neighbourhood row by row, starting at (−1, −1).
class ConvKernel {
 public:
  explicit ConvKernel(Tensor weights);

  const Tensor& weights() const noexcept { return weights_; }
  Tensor& weights() noexcept { return weights_; }

  std::size_t out_channels() const { return weights_.dim(0); }
  std::size_t in_channels() const { return weights_.dim(1); }
  std::size_t size() const { return weights_.dim(2); }
  std::size_t tap_count() const { return taps_.size(); }
  const std::vector<Point2>& taps() const noexcept { return taps_; }

 private:
  Tensor weights_;
  std::vector<Point2> taps_;
};

/// Integer tap displacements of a k×k kernel, row-major.
std::vector<Point2> tap_grid(std::size_t k);

/// Per-location fractional displacements for every kernel tap.
///
/// Shape 2k²×H×W. Channel 2n holds Δy of tap n and channel 2n+1 holds Δx.
class OffsetField {
 public:
  explicit OffsetField(Tensor offsets);
  static OffsetField zeros(std::size_t taps, std::size_t height, std::size_t width);

  const Tensor& offsets() const noexcept { return offsets_; }
  Tensor& offsets() noexcept { return offsets_; }

  std::size_t tap_count() const { return offsets_.dim(0) / 2; }
  std::size_t height() const { return offsets_.dim(1); }
  std::size_t width() const { return offsets_.dim(2); }

  Point2 at(std::size_t tap, std::size_t row, std::size_t col) const {
    return {offsets_(2 * tap + 1, row, col), offsets_(2 * tap, row, col)};
  }

 private:
  Tensor offsets_;
};

/// Stride-1, zero-padded "same" convolution: C_in×H×W → C_out×H×W.
Tensor regular_conv2d(const Tensor& input, const ConvKernel& kernel);

/// Convolution whose taps are displaced by `field`, sampled bilinearly with
/// zero padding. With a zero field this reproduces regular_conv2d exactly.
Tensor deformable_conv2d(const Tensor& input, const ConvKernel& kernel, const OffsetField& field);

/// Runs the offset-predicting filter bank and reinterprets its output as an
/// OffsetField. The bank shares the main kernel's k×k support, so its output
/// channel count must be 2k².
OffsetField generate_offsets(const Tensor& input, const ConvKernel& offset_kernel);

struct DeformConvGradients {
  Tensor d_input;
  Tensor d_weights;
  Tensor d_offsets;
};

/// Gradients of Σ(upstream ⊙ deformable_conv2d(input, kernel, field)).
DeformConvGradients deformable_conv2d_backward(const Tensor& input, const ConvKernel& kernel,
                                               const OffsetField& field,
                                               const Tensor& upstream);

}  // namespace mslayout
