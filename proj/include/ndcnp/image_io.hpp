#pragma once

#include <filesystem>
#include <stdexcept>

#include "ndcnp/fusion.hpp"
#include "ndcnp/image.hpp"
#include "ndcnp/neuron.hpp"

namespace ndcnp {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads PNG/JPEG (or anything OpenCV decodes) as a 1- or 3-channel RGB raster
/// keeping the native 8- or 16-bit sample values. Alpha is dropped.
Raster load_raster(const std::filesystem::path& path);

/// Writes an 8- or 16-bit PNG; the depth follows `image.max_value`.
void save_png(const Raster& image, const std::filesystem::path& path);

/// Pair maps are written 0/255. Multi-source maps spread the indices over 0..255.
void save_decision_map(const DecisionMap& dm, const std::filesystem::path& path);
DecisionMap load_decision_map(const std::filesystem::path& path, std::size_t sources);

/// 16-bit grayscale; counts are clamped to the iteration count.
void save_spike_matrix(const SpikeMatrix& spikes, const std::filesystem::path& path);

/// Whitespace-separated rows of weights, one kernel row per line. Lines
/// starting with '#' are ignored.
SynapticKernel load_kernel(const std::filesystem::path& path);

}  // namespace ndcnp
