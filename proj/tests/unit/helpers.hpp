#pragma once

#include <vector>

#include "brute_force.hpp"
#include "mslayout/geometry.hpp"
#include "mslayout/random.hpp"
#include "mslayout/tensor.hpp"

namespace testing {

inline mslayout::Tensor random_tensor(mslayout::Rng& rng, mslayout::Tensor::Shape shape) {
  mslayout::Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.normal();
  return t;
}

inline oracle::Grid2 to_grid(const mslayout::Tensor& t, std::size_t channel = 0) {
  const std::size_t h = t.rank() == 2 ? t.dim(0) : t.dim(1);
  const std::size_t w = t.rank() == 2 ? t.dim(1) : t.dim(2);
  oracle::Grid2 g(h, std::vector<double>(w));
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) g[r][c] = t.rank() == 2 ? t(r, c) : t(channel, r, c);
  }
  return g;
}

inline oracle::T3 to_t3(const mslayout::Tensor& t) {
  oracle::T3 out;
  for (std::size_t c = 0; c < t.dim(0); ++c) out.push_back(to_grid(t, c));
  return out;
}

inline oracle::T4 to_t4(const mslayout::Tensor& t) {
  oracle::T4 out(t.dim(0), oracle::T3(t.dim(1), oracle::Grid2(t.dim(2), std::vector<double>(t.dim(3)))));
  for (std::size_t a = 0; a < t.dim(0); ++a)
    for (std::size_t b = 0; b < t.dim(1); ++b)
      for (std::size_t i = 0; i < t.dim(2); ++i)
        for (std::size_t j = 0; j < t.dim(3); ++j) out[a][b][i][j] = t(a, b, i, j);
  return out;
}

inline std::vector<oracle::Pt> to_pts(const std::vector<mslayout::Point2>& v) {
  std::vector<oracle::Pt> out;
  for (const auto& p : v) out.push_back({p.x, p.y});
  return out;
}

inline std::vector<mslayout::Point2> random_points(mslayout::Rng& rng, std::size_t n, double extent) {
  std::vector<mslayout::Point2> out(n);
  for (auto& p : out) p = {rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
  return out;
}

}  // namespace testing
