#include "mslayout/deform_conv.hpp"

#include <string>

#include "mslayout/errors.hpp"

namespace mslayout {

std::vector<Point2> tap_grid(std::size_t k) {
  if (k == 0 || k % 2 == 0) throw ValidationError("kernel size must be odd");
  const long r = static_cast<long>(k / 2);
  std::vector<Point2> taps;
  taps.reserve(k * k);
  for (long i = -r; i <= r; ++i) {
    for (long j = -r; j <= r; ++j) taps.push_back({static_cast<double>(j), static_cast<double>(i)});
  }
  return taps;
}

ConvKernel::ConvKernel(Tensor weights) : weights_(std::move(weights)) {
  if (weights_.rank() != 4) throw ValidationError("kernel weights must be C_out×C_in×k×k");
  if (weights_.dim(2) != weights_.dim(3)) throw ValidationError("kernel must be square");
  taps_ = tap_grid(weights_.dim(2));
}

OffsetField::OffsetField(Tensor offsets) : offsets_(std::move(offsets)) {
  if (offsets_.rank() != 3 || offsets_.dim(0) % 2 != 0) {
    throw ValidationError("offset field must be 2k²×H×W");
  }
  if (!offsets_.all_finite()) throw ValidationError("offset field contains non-finite values");
}

OffsetField OffsetField::zeros(std::size_t taps, std::size_t height, std::size_t width) {
  return OffsetField(Tensor({2 * taps, height, width}));
}

namespace {

void check_input(const Tensor& input, const ConvKernel& kernel) {
  if (input.rank() != 3) throw ValidationError("convolution input must be C×H×W");
  if (input.dim(0) != kernel.in_channels()) {
    throw ValidationError("channel mismatch: input has " + std::to_string(input.dim(0)) +
                          " channels, kernel expects " + std::to_string(kernel.in_channels()));
  }
}

void check_field(const Tensor& input, const ConvKernel& kernel, const OffsetField& field) {
  check_input(input, kernel);
  if (field.tap_count() != kernel.tap_count() || field.height() != input.dim(1) ||
      field.width() != input.dim(2)) {
    throw ValidationError("offset field shape does not match kernel taps and input size");
  }
}

// Bilinear samples for every (channel, tap, output location): C_in×k²×H×W.
std::vector<double> deformable_columns(const Tensor& input, const ConvKernel& kernel,
                                       const OffsetField& field) {
  const std::size_t channels = input.dim(0), height = input.dim(1), width = input.dim(2);
  const std::size_t taps = kernel.tap_count();
  std::vector<double> cols(channels * taps * height * width);
  std::size_t idx = 0;
  for (std::size_t ci = 0; ci < channels; ++ci) {
    const auto plane = input.channel(ci);
    for (std::size_t n = 0; n < taps; ++n) {
      const Point2 tap = kernel.taps()[n];
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          const Point2 base{static_cast<double>(c), static_cast<double>(r)};
          cols[idx++] = bilinear_sample(plane, height, width, base + tap + field.at(n, r, c));
        }
      }
    }
  }
  return cols;
}

}  // namespace

Tensor regular_conv2d(const Tensor& input, const ConvKernel& kernel) {
  check_input(input, kernel);
  const std::size_t channels = input.dim(0);
  const long height = static_cast<long>(input.dim(1)), width = static_cast<long>(input.dim(2));
  const std::size_t k = kernel.size();
  const long half = static_cast<long>(k / 2);
  const Tensor& w = kernel.weights();
  Tensor out({kernel.out_channels(), input.dim(1), input.dim(2)});
  for (std::size_t o = 0; o < kernel.out_channels(); ++o) {
    for (long r = 0; r < height; ++r) {
      for (long c = 0; c < width; ++c) {
        double acc = 0.0;
        for (std::size_t ci = 0; ci < channels; ++ci) {
          for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
              const long rr = r + static_cast<long>(i) - half;
              const long cc = c + static_cast<long>(j) - half;
              const bool inside = rr >= 0 && cc >= 0 && rr < height && cc < width;
              const double v = inside ? input(ci, static_cast<std::size_t>(rr),
                                              static_cast<std::size_t>(cc))
                                      : 0.0;
              acc += w(o, ci, i, j) * v;
            }
          }
        }
        out(o, static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
      }
    }
  }
  return out;
}

Tensor deformable_conv2d(const Tensor& input, const ConvKernel& kernel,
                         const OffsetField& field) {
  check_field(input, kernel, field);
  const std::size_t channels = input.dim(0), height = input.dim(1), width = input.dim(2);
  const std::size_t taps = kernel.tap_count();
  const std::size_t plane = height * width;
  const auto cols = deformable_columns(input, kernel, field);
  const auto w = kernel.weights().data();
  Tensor out({kernel.out_channels(), height, width});
  for (std::size_t o = 0; o < kernel.out_channels(); ++o) {
    for (std::size_t p = 0; p < plane; ++p) {
      double acc = 0.0;
      for (std::size_t ci = 0; ci < channels; ++ci) {
        for (std::size_t n = 0; n < taps; ++n) {
          acc += w[(o * channels + ci) * taps + n] * cols[(ci * taps + n) * plane + p];
        }
      }
      out[o * plane + p] = acc;
    }
  }
  return out;
}

OffsetField generate_offsets(const Tensor& input, const ConvKernel& offset_kernel) {
  const std::size_t expected = 2 * offset_kernel.tap_count();
  if (offset_kernel.out_channels() != expected) {
    throw ValidationError("offset kernel must have " + std::to_string(expected) +
                          " output channels, got " +
                          std::to_string(offset_kernel.out_channels()));
  }
  return OffsetField(regular_conv2d(input, offset_kernel));
}

DeformConvGradients deformable_conv2d_backward(const Tensor& input, const ConvKernel& kernel,
                                               const OffsetField& field,
                                               const Tensor& upstream) {
  check_field(input, kernel, field);
  const std::size_t channels = input.dim(0), height = input.dim(1), width = input.dim(2);
  const std::size_t out_channels = kernel.out_channels();
  if (upstream.shape() != Tensor::Shape{out_channels, height, width}) {
    throw ValidationError("upstream gradient shape does not match convolution output");
  }
  const std::size_t taps = kernel.tap_count();
  const std::size_t plane = height * width;
  const auto w = kernel.weights().data();
  const auto up = upstream.data();

  DeformConvGradients g{Tensor(input.shape()), Tensor(kernel.weights().shape()),
                        Tensor(field.offsets().shape())};
  auto dx = g.d_input.data();
  auto dw = g.d_weights.data();
  auto doff = g.d_offsets.data();

  for (std::size_t ci = 0; ci < channels; ++ci) {
    const auto in_plane = input.channel(ci);
    for (std::size_t n = 0; n < taps; ++n) {
      const Point2 tap = kernel.taps()[n];
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          const std::size_t p = r * width + c;
          const Point2 q = Point2{static_cast<double>(c), static_cast<double>(r)} + tap +
                           field.at(n, r, c);
          const BilinearGrad bg = bilinear_sample_grad(in_plane, height, width, q);
          double sample = 0.0;
          for (const auto& t : bg.taps) {
            if (t.in_bounds) {
              sample += t.weight * in_plane[static_cast<std::size_t>(t.row) * width +
                                            static_cast<std::size_t>(t.col)];
            }
          }
          double coef = 0.0;
          for (std::size_t o = 0; o < out_channels; ++o) {
            const double u = up[o * plane + p];
            coef += u * w[(o * channels + ci) * taps + n];
            dw[(o * channels + ci) * taps + n] += u * sample;
          }
          if (coef == 0.0) continue;
          for (const auto& t : bg.taps) {
            if (t.in_bounds) {
              dx[ci * plane + static_cast<std::size_t>(t.row) * width +
                 static_cast<std::size_t>(t.col)] += coef * t.weight;
            }
          }
          doff[(2 * n) * plane + p] += coef * bg.d_point.y;
          doff[(2 * n + 1) * plane + p] += coef * bg.d_point.x;
        }
      }
    }
  }
  return g;
}

}  // namespace mslayout
