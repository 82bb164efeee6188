#pragma once

#include <cstddef>

#include "ndcnp/image.hpp"

namespace ndcnp {

/// Rec. 601 luma for 3-channel rasters, identity for 1-channel ones, scaled to [0,1].
GrayImage to_luminance(const Raster& image);

/// |2f(i,j) - f(i-s,j) - f(i+s,j)| + |2f(i,j) - f(i,j-s) - f(i,j+s)| with
/// replicated borders.
FocusMap modified_laplacian(const GrayImage& image, std::size_t step);

/// Sum of the modified Laplacian over a window x window box, truncated at the borders.
FocusMap sml(const GrayImage& image, std::size_t step = 1, std::size_t window = 3);

}  // namespace ndcnp
