#include "ndcnp/focus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ndcnp {

GrayImage to_luminance(const Raster& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw std::invalid_argument("to_luminance: unsupported channel count " +
                                std::to_string(image.channels));
  }
  if (!(image.max_value > 0.0)) throw std::invalid_argument("to_luminance: bad sample range");
  GrayImage out(image.rows, image.cols);
  const double inv = 1.0 / image.max_value;
  for (std::size_t i = 0; i < image.rows; ++i) {
    for (std::size_t j = 0; j < image.cols; ++j) {
      double y = 0.0;
      if (image.channels == 1) {
        y = image.at(i, j, 0);
      } else {
        y = 0.299 * image.at(i, j, 0) + 0.587 * image.at(i, j, 1) + 0.114 * image.at(i, j, 2);
      }
      if (!std::isfinite(y)) throw std::invalid_argument("to_luminance: non-finite sample");
      out(i, j) = std::clamp(y * inv, 0.0, 1.0);
    }
  }
  return out;
}

FocusMap modified_laplacian(const GrayImage& image, std::size_t step) {
  if (step == 0) throw std::invalid_argument("modified_laplacian: step must be >= 1");
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  if (rows < 2 * step + 1 || cols < 2 * step + 1) {
    throw std::invalid_argument("modified_laplacian: image smaller than 2*step+1");
  }
  FocusMap out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t up = i >= step ? i - step : 0;
    const std::size_t down = std::min(i + step, rows - 1);
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t left = j >= step ? j - step : 0;
      const std::size_t right = std::min(j + step, cols - 1);
      const double c2 = 2.0 * image(i, j);
      out(i, j) = std::abs(c2 - image(up, j) - image(down, j)) +
                  std::abs(c2 - image(i, left) - image(i, right));
    }
  }
  return out;
}

FocusMap sml(const GrayImage& image, std::size_t step, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw std::invalid_argument("sml: window must be odd");
  FocusMap ml = modified_laplacian(image, step);
  if (window == 1) return ml;
  const std::size_t half = window / 2;
  FocusMap out(image.rows(), image.cols());
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t top = i >= half ? i - half : 0;
    const std::size_t bottom = std::min(i + half, rows - 1);
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t left = j >= half ? j - half : 0;
      const std::size_t right = std::min(j + half, cols - 1);
      double acc = 0.0;
      for (std::size_t y = top; y <= bottom; ++y) {
        for (std::size_t x = left; x <= right; ++x) acc += ml(y, x);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace ndcnp
