#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ndcnp/grid.hpp"
#include "ndcnp/image.hpp"

namespace ndcnp {

/// Synaptic weight map over an odd-sized neighbourhood. The centre entry is
/// the neuron itself and must be zero.
class SynapticKernel {
 public:
  /// 3x3, orthogonal 0.2, diagonal 0.1; weights sum to 1.2.
  SynapticKernel();
  explicit SynapticKernel(Grid<double> weights);

  const Grid<double>& weights() const noexcept { return weights_; }
  double sum() const noexcept { return sum_; }
  std::size_t radius_rows() const noexcept { return weights_.rows() / 2; }
  std::size_t radius_cols() const noexcept { return weights_.cols() / 2; }

  friend bool operator==(const SynapticKernel& a, const SynapticKernel& b) {
    return a.weights_ == b.weights_;
  }

 private:
  Grid<double> weights_;
  double sum_ = 0.0;
};

struct NeuronParams {
  double alpha = 0.8;
  double beta = 0.2;
  double gamma = 0.5;
  double lambda = 15.0;
  SynapticKernel kernel;

  /// Throws std::invalid_argument when a decay factor leaves (0,1) or lambda < 0.
  void validate() const;

  friend bool operator==(const NeuronParams&, const NeuronParams&) = default;
};

struct LatticeState {
  Grid<double> feeding;    // U
  Grid<double> linking;    // V
  Grid<double> threshold;  // T
  Grid<std::uint8_t> spikes;  // P, spike plane of the current step
  std::size_t step = 0;

  static LatticeState zeros(std::size_t rows, std::size_t cols);
  std::size_t rows() const noexcept { return spikes.rows(); }
  std::size_t cols() const noexcept { return spikes.cols(); }
};

struct SpikeMatrix {
  Grid<std::uint32_t> counts;
  std::size_t total_steps = 0;
};

/// U(1+V) > T, strictly.
constexpr bool fire_predicate(double feeding, double linking, double threshold) noexcept {
  return feeding * (1.0 + linking) > threshold;
}

/// One synchronous update of every neuron. Reads only the step-t buffers.
/// Throws ShapeError if `input` and `state` differ in shape.
LatticeState lattice_step(const LatticeState& state, const FocusMap& input,
                          const NeuronParams& params);

/// Simulates from the all-zero state for `iterations` steps and returns the
/// per-pixel firing counts.
SpikeMatrix run_lattice(const FocusMap& input, const NeuronParams& params,
                        std::size_t iterations);

/// Stepping engine behind lattice_step/run_lattice. Keeps a zero-padded copy of
/// the spike plane so neighbour gathering needs no bounds checks.
class Lattice {
 public:
  Lattice(const FocusMap& input, const NeuronParams& params);
  Lattice(LatticeState initial, const FocusMap& input, const NeuronParams& params);

  void step();
  void run(std::size_t iterations, Grid<std::uint32_t>* counts = nullptr);

  LatticeState state() const;
  std::size_t steps_taken() const noexcept { return step_; }

 private:
  struct Tap {
    std::ptrdiff_t offset;
    double weight;
  };

  void build_taps();
  void load_spikes(const Grid<std::uint8_t>& spikes);

  std::vector<double> input_;
  NeuronParams params_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t pad_rows_;
  std::size_t pad_cols_;
  std::size_t stride_;
  std::vector<Tap> taps_;
  std::vector<double> feeding_;
  std::vector<double> linking_;
  std::vector<double> threshold_;
  std::vector<std::uint8_t> spikes_;       // padded, step t
  std::vector<std::uint8_t> next_spikes_;  // padded, step t+1
  std::size_t step_ = 0;
};

}  // namespace ndcnp
