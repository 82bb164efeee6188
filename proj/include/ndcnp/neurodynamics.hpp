#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ndcnp/image.hpp"
#include "ndcnp/neuron.hpp"

namespace ndcnp {

/// Constant external input above which a neuron under saturated synaptic
/// drive eventually fires at every step:
///   lambda (1-alpha)(1-beta) / [(1-gamma)(1-beta+sum W)] - sum W.
/// Inputs equal to the threshold are safe.
double continuous_firing_threshold(const NeuronParams& params);

/// Feeding value U(t) when the neuron has fired at every step 1..t-1.
/// `k_history[i]` is the synaptic drive K(i); K(0) must be 0.
double closed_form_feeding(std::size_t t, double input, const NeuronParams& params,
                           std::span<const double> k_history);
/// Linking value V(t) under the same assumption.
double closed_form_linking(std::size_t t, const NeuronParams& params,
                           std::span<const double> k_history);
/// Dynamic threshold T(t) under the same assumption.
double closed_form_threshold(std::size_t t, const NeuronParams& params);

/// How neighbour spikes are modelled for an isolated neuron.
enum class NeighborDrive {
  kSaturated,  // neighbours fire at every step after the first: K(t) = sum W for t >= 1
  kMirrored,   // neighbours copy the neuron's previous spike: K(t) = sum W * P(t-1)
  kNone,       // no neighbours (a 1x1 lattice)
};

std::string_view to_string(NeighborDrive drive);
NeighborDrive parse_neighbor_drive(std::string_view name);

struct NeuronSample {
  double feeding = 0.0;
  double linking = 0.0;
  double threshold = 0.0;
  bool fired = false;
};

/// Trajectory of one neuron. Element t is the state at time t, so the result
/// has `iterations + 1` entries and element 0 is all zero.
std::vector<NeuronSample> single_neuron_trace(double input, const NeuronParams& params,
                                              std::size_t iterations,
                                              NeighborDrive drive = NeighborDrive::kSaturated);

/// Fraction of steps in [first, last] (1-based, inclusive) on which the neuron fired.
double firing_rate(std::span<const NeuronSample> trace, std::size_t first, std::size_t last);

enum class FiringRegime { kSafe, kContinuous };
std::string_view to_string(FiringRegime regime);

struct FiringRegimeReport {
  double threshold = 0.0;
  double input_max = 0.0;
  FiringRegime regime = FiringRegime::kSafe;  // predicted from the threshold
  FiringRegime simulated = FiringRegime::kSafe;
  double firing_rate = 0.0;  // over the whole horizon
  std::size_t horizon = 0;

  bool consistent() const noexcept { return regime == simulated; }
};

/// A trace is classified continuous when the neuron fires at every step in the
/// second half of the horizon. The first half absorbs the start-up transient,
/// during which T(2) = lambda typically suppresses a spike.
FiringRegime classify_trace(std::span<const NeuronSample> trace);

FiringRegimeReport regime_report(double input, const NeuronParams& params, std::size_t horizon,
                                 NeighborDrive drive = NeighborDrive::kSaturated);

struct InputScaling {
  NeuronParams params;
  double scale = 1.0;
};

/// Chooses one joint scale s so that s * max(all maps) equals the continuous
/// firing threshold of `base`. Parameters are returned unchanged.
InputScaling auto_configure(std::span<const FocusMap> focus_maps, const NeuronParams& base);

/// Multiplies every value by `scale`.
FocusMap scaled(const FocusMap& map, double scale);

}  // namespace ndcnp
