#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "ndcnp/image.hpp"
#include "ndcnp/neuron.hpp"

namespace ndcnp::testing {

inline Grid<double> gaussian_blur(const Grid<double>& in, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += w[k + radius];
  }
  for (double& v : w) v /= total;
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };
  Grid<double> tmp(in.rows(), in.cols());
  Grid<double> out(in.rows(), in.cols());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += w[k + radius] * in(i, clampi(j + k, cols));
      tmp(i, j) = acc;
    }
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += w[k + radius] * tmp(clampi(i + k, rows), j);
      out(i, j) = acc;
    }
  }
  return out;
}

/// Smoothed uniform noise stretched to [0,1].
inline Grid<double> random_texture(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Grid<double> g(rows, cols);
  for (double& x : g.values()) x = u(rng);
  g = gaussian_blur(g, std::uniform_real_distribution<double>(0.5, 1.5)(rng));
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  const double lo_v = *lo;
  const double span = *hi - *lo;
  for (double& x : g.values()) x = (x - lo_v) / span;
  return g;
}

inline Raster to_raster8(const Grid<double>& g) {
  Raster r(g.rows(), g.cols(), 1, 255.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    r.samples[n] = std::round(std::clamp(g.values()[n], 0.0, 1.0) * 255.0);
  }
  return r;
}

struct HalfBlurPair {
  Raster a;      // left half defocused
  Raster b;      // right half defocused
  Raster sharp;  // all-in-focus reference
  std::size_t seam = 0;  // first column of the right half
};

inline HalfBlurPair half_blur_pair(std::size_t size, double sigma, std::mt19937_64& rng) {
  const Grid<double> base = random_texture(size, size, rng);
  const Grid<double> blurred = gaussian_blur(base, sigma);
  Grid<double> a = base;
  Grid<double> b = base;
  const std::size_t seam = size / 2;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (j < seam) {
        a(i, j) = blurred(i, j);
      } else {
        b(i, j) = blurred(i, j);
      }
    }
  }
  return {to_raster8(a), to_raster8(b), to_raster8(base), seam};
}

inline NeuronParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> decay(0.1, 0.9);
  NeuronParams p;
  p.alpha = decay(rng);
  p.beta = decay(rng);
  p.gamma = decay(rng);
  p.lambda = std::uniform_real_distribution<double>(2.0, 30.0)(rng);
  Grid<double> w(3, 3);
  std::uniform_real_distribution<double> weight(0.0, 0.3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != 1 || j != 1) w(i, j) = weight(rng);
    }
  }
  w(0, 1) += 0.05;  // keep the weight sum positive
  p.kernel = SynapticKernel(w);
  return p;
}

}  // namespace ndcnp::testing
