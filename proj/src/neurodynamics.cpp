#include "ndcnp/neurodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ndcnp {

double continuous_firing_threshold(const NeuronParams& params) {
  params.validate();
  const double s = params.kernel.sum();
  const double a = params.alpha;
  const double b = params.beta;
  const double g = params.gamma;
  return params.lambda * (1.0 - a) * (1.0 - b) / ((1.0 - g) * (1.0 - b + s)) - s;
}

namespace {

void check_history(std::size_t t, std::span<const double> k_history) {
  if (k_history.size() < t) {
    throw std::invalid_argument("closed form: k_history shorter than t");
  }
  if (!k_history.empty() && k_history[0] != 0.0) {
    throw std::invalid_argument("closed form: K(0) must be 0");
  }
}

// sum_{i<t} K(i) * decay^(t-i-1), evaluated by Horner's rule.
double discounted_drive(std::size_t t, double decay, std::span<const double> k_history) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t; ++i) acc = acc * decay + k_history[i];
  return acc;
}

}  // namespace

double closed_form_feeding(std::size_t t, double input, const NeuronParams& params,
                           std::span<const double> k_history) {
  check_history(t, k_history);
  const double a = params.alpha;
  return input * (1.0 - std::pow(a, static_cast<double>(t))) / (1.0 - a) +
         discounted_drive(t, a, k_history);
}

double closed_form_linking(std::size_t t, const NeuronParams& params,
                           std::span<const double> k_history) {
  check_history(t, k_history);
  return discounted_drive(t, params.beta, k_history);
}

double closed_form_threshold(std::size_t t, const NeuronParams& params) {
  if (t == 0) return 0.0;
  const double g = params.gamma;
  return params.lambda * (1.0 - std::pow(g, static_cast<double>(t - 1))) / (1.0 - g);
}

std::string_view to_string(NeighborDrive drive) {
  switch (drive) {
    case NeighborDrive::kSaturated: return "saturated";
    case NeighborDrive::kMirrored: return "mirrored";
    case NeighborDrive::kNone: return "none";
  }
  return "?";
}

NeighborDrive parse_neighbor_drive(std::string_view name) {
  if (name == "saturated") return NeighborDrive::kSaturated;
  if (name == "mirrored") return NeighborDrive::kMirrored;
  if (name == "none") return NeighborDrive::kNone;
  throw std::invalid_argument("unknown neighbour drive '" + std::string(name) + "'");
}

std::vector<NeuronSample> single_neuron_trace(double input, const NeuronParams& params,
                                              std::size_t iterations, NeighborDrive drive) {
  params.validate();
  if (iterations == 0) throw std::invalid_argument("single_neuron_trace: iterations must be >= 1");
  if (!std::isfinite(input)) throw std::invalid_argument("single_neuron_trace: non-finite input");

  const double s = params.kernel.sum();
  std::vector<NeuronSample> trace(iterations + 1);
  NeuronSample cur;
  for (std::size_t t = 0; t < iterations; ++t) {
    double k = 0.0;
    switch (drive) {
      case NeighborDrive::kSaturated: k = t >= 1 ? s : 0.0; break;
      case NeighborDrive::kMirrored: k = cur.fired ? s : 0.0; break;
      case NeighborDrive::kNone: break;
    }
    NeuronSample next = cur;
    if (cur.fired) {
      next.feeding *= params.alpha;
      next.linking *= params.beta;
      next.threshold = params.gamma * next.threshold + params.lambda;
    }
    next.feeding += input + k;
    next.linking += k;
    next.fired = fire_predicate(next.feeding, next.linking, next.threshold);
    trace[t + 1] = next;
    cur = next;
  }
  return trace;
}

double firing_rate(std::span<const NeuronSample> trace, std::size_t first, std::size_t last) {
  if (first < 1 || last < first || last >= trace.size()) {
    throw std::out_of_range("firing_rate: step range outside the trace");
  }
  std::size_t fired = 0;
  for (std::size_t t = first; t <= last; ++t) fired += trace[t].fired ? 1 : 0;
  return static_cast<double>(fired) / static_cast<double>(last - first + 1);
}

std::string_view to_string(FiringRegime regime) {
  return regime == FiringRegime::kContinuous ? "continuous" : "safe";
}

FiringRegime classify_trace(std::span<const NeuronSample> trace) {
  if (trace.size() < 3) throw std::invalid_argument("classify_trace: horizon too short");
  const std::size_t horizon = trace.size() - 1;
  const std::size_t first = horizon / 2 + 1;
  const bool all_fired = std::all_of(trace.begin() + static_cast<std::ptrdiff_t>(first),
                                     trace.end(), [](const NeuronSample& s) { return s.fired; });
  return all_fired ? FiringRegime::kContinuous : FiringRegime::kSafe;
}

FiringRegimeReport regime_report(double input, const NeuronParams& params, std::size_t horizon,
                                 NeighborDrive drive) {
  FiringRegimeReport report;
  report.threshold = continuous_firing_threshold(params);
  report.input_max = input;
  report.regime = input > report.threshold ? FiringRegime::kContinuous : FiringRegime::kSafe;
  const auto trace = single_neuron_trace(input, params, horizon, drive);
  report.simulated = classify_trace(trace);
  report.firing_rate = firing_rate(trace, 1, horizon);
  report.horizon = horizon;
  return report;
}

InputScaling auto_configure(std::span<const FocusMap> focus_maps, const NeuronParams& base) {
  if (focus_maps.empty()) throw std::invalid_argument("auto_configure: no focus maps supplied");
  double global_max = 0.0;
  for (const FocusMap& map : focus_maps) {
    for (double x : map.values()) {
      if (!std::isfinite(x) || x < 0.0) {
        throw std::invalid_argument("auto_configure: feature values must be finite and >= 0");
      }
      global_max = std::max(global_max, x);
    }
  }
  const double threshold = continuous_firing_threshold(base);
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("auto_configure: parameters admit no positive safe input (threshold " +
                                std::to_string(threshold) + ")");
  }
  InputScaling out{base, 1.0};
  if (global_max > 0.0) {
    out.scale = threshold / global_max;
    // Rounding may push the brightest feature one ulp past the bound.
    while (out.scale * global_max > threshold) out.scale = std::nextafter(out.scale, 0.0);
  }
  return out;
}

FocusMap scaled(const FocusMap& map, double scale) {
  FocusMap out = map;
  for (double& x : out.values()) x *= scale;
  return out;
}

}  // namespace ndcnp
