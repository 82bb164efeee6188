#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ndcnp/image.hpp"
#include "ndcnp/neuron.hpp"

namespace ndcnp {

/// Per-pixel source selection.
///
/// For two sources `labels` is the binary mask of the pair rule: 1 takes the
/// first source (A), 0 takes the second (B). For three or more sources it
/// holds the selected source index directly.
struct DecisionMap {
  Grid<std::uint8_t> labels;
  std::size_t sources = 2;

  bool is_pair() const noexcept { return sources == 2; }
  std::size_t source_index(std::size_t i, std::size_t j) const noexcept {
    return is_pair() ? (labels(i, j) == 1 ? 0 : 1) : labels(i, j);
  }
};

struct FusionConfig {
  std::size_t radius = 16;
  std::size_t iterations = 110;
  NeuronParams params;
  std::size_t sml_step = 1;
  std::size_t sml_window = 3;
  bool use_sml = true;
  bool auto_configure = true;
  double input_gain = 1.0;  // fixed input scale, used only when auto_configure is off
  bool parallel = true;  // run the per-source lattices on separate threads

  void validate() const;
};

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

struct FusionResult {
  Raster fused;
  DecisionMap decision;
  std::vector<SpikeMatrix> spikes;
  std::vector<Grid<double>> densities;
  std::vector<FocusMap> lattice_inputs;  // after scaling
  double scale = 1.0;
  std::vector<StageTiming> timings;
};

/// F(i,j) = sum of counts over the (2r+1)^2 square centred at (i,j), clipped to
/// the lattice. Cost is independent of r.
Grid<double> spike_density(const SpikeMatrix& spikes, std::size_t radius);

/// 1 where f_a > f_b strictly; ties go to B.
DecisionMap decision_map(const Grid<double>& f_a, const Grid<double>& f_b);

/// Per-pixel argmax over the densities; ties go to the lowest index. Two
/// inputs are delegated to decision_map so the pair tie rule still applies.
DecisionMap select_by_density(std::span<const Grid<double>> densities);

/// Hard per-pixel selection: every output sample is a copy of a source sample.
Raster fuse_pair(const Raster& a, const Raster& b, const DecisionMap& dm);
Raster fuse_select(std::span<const Raster> sources, const DecisionMap& dm);

/// Luminance -> SML -> jointly scaled lattices -> densities -> decision -> fusion.
FusionResult run_fusion(std::span<const Raster> sources, const FusionConfig& config);

/// Lattice input for one source under `config` (before joint scaling).
FocusMap focus_features(const Raster& source, const FusionConfig& config);

}  // namespace ndcnp
