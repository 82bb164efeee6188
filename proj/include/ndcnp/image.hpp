#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ndcnp/grid.hpp"

namespace ndcnp {

/// Interleaved multi-channel raster. Samples keep their native scale:
/// `max_value` is 255 for 8-bit data, 65535 for 16-bit data and 1 for real data.
/// Integer samples are held exactly, so copying a sample is bit-preserving.
struct Raster {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t channels = 1;
  double max_value = 255.0;
  std::vector<double> samples;

  Raster() = default;
  Raster(std::size_t rows, std::size_t cols, std::size_t channels, double max_value,
         double fill = 0.0)
      : rows(rows), cols(cols), channels(channels), max_value(max_value),
        samples(rows * cols * channels, fill) {}

  double& at(std::size_t i, std::size_t j, std::size_t c) noexcept {
    return samples[(i * cols + j) * channels + c];
  }
  double at(std::size_t i, std::size_t j, std::size_t c) const noexcept {
    return samples[(i * cols + j) * channels + c];
  }
  std::span<const double> pixel(std::size_t i, std::size_t j) const noexcept {
    return std::span<const double>(samples).subspan((i * cols + j) * channels, channels);
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

/// Single-plane intensity image with values in [0,1].
struct GrayImage : Grid<double> {
  using Grid<double>::Grid;
  GrayImage() = default;
  explicit GrayImage(Grid<double> g) : Grid<double>(std::move(g)) {}
};

/// Non-negative focus feature per pixel; the external input of a lattice.
struct FocusMap : Grid<double> {
  using Grid<double>::Grid;
  FocusMap() = default;
  explicit FocusMap(Grid<double> g) : Grid<double>(std::move(g)) {}
};

}  // namespace ndcnp
