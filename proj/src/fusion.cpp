#include "ndcnp/fusion.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>

#include "ndcnp/focus.hpp"
#include "ndcnp/neurodynamics.hpp"

namespace ndcnp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void require_same_raster_shape(const Raster& a, const Raster& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ShapeError("sources differ in size: " + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols));
  }
  if (a.channels != b.channels) throw ShapeError("sources differ in channel count");
}

}  // namespace

void FusionConfig::validate() const {
  if (radius < 1) throw std::invalid_argument("coupling radius must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (sml_step < 1) throw std::invalid_argument("SML step must be >= 1");
  if (sml_window == 0 || sml_window % 2 == 0) throw std::invalid_argument("SML window must be odd");
  if (!(input_gain > 0.0) || !std::isfinite(input_gain)) {
    throw std::invalid_argument("input gain must be finite and > 0");
  }
  params.validate();
}

Grid<double> spike_density(const SpikeMatrix& spikes, std::size_t radius) {
  if (radius < 1) throw std::invalid_argument("spike_density: radius must be >= 1");
  const auto& counts = spikes.counts;
  const std::size_t rows = counts.rows();
  const std::size_t cols = counts.cols();
  Grid<std::int64_t> integral(rows + 1, cols + 1);
  for (std::size_t i = 0; i < rows; ++i) {
    std::int64_t acc = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      acc += counts(i, j);
      integral(i + 1, j + 1) = integral(i, j + 1) + acc;
    }
  }
  Grid<double> out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t top = i >= radius ? i - radius : 0;
    const std::size_t bottom = std::min(i + radius + 1, rows);
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t left = j >= radius ? j - radius : 0;
      const std::size_t right = std::min(j + radius + 1, cols);
      out(i, j) = static_cast<double>(integral(bottom, right) - integral(top, right) -
                                      integral(bottom, left) + integral(top, left));
    }
  }
  return out;
}

DecisionMap decision_map(const Grid<double>& f_a, const Grid<double>& f_b) {
  require_same_shape(f_a, f_b, "decision_map");
  DecisionMap dm{Grid<std::uint8_t>(f_a.rows(), f_a.cols()), 2};
  auto a = f_a.values();
  auto b = f_b.values();
  auto out = dm.labels.values();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = a[n] > b[n] ? 1 : 0;
  return dm;
}

DecisionMap select_by_density(std::span<const Grid<double>> densities) {
  if (densities.size() < 2) throw std::invalid_argument("select_by_density: need >= 2 sources");
  if (densities.size() > 255) throw std::invalid_argument("select_by_density: at most 255 sources");
  if (densities.size() == 2) return decision_map(densities[0], densities[1]);
  for (const auto& d : densities) require_same_shape(d, densities[0], "select_by_density");
  DecisionMap dm{Grid<std::uint8_t>(densities[0].rows(), densities[0].cols()), densities.size()};
  auto out = dm.labels.values();
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::size_t best = 0;
    double best_value = densities[0].values()[n];
    for (std::size_t k = 1; k < densities.size(); ++k) {
      const double v = densities[k].values()[n];
      if (v > best_value) {
        best = k;
        best_value = v;
      }
    }
    out[n] = static_cast<std::uint8_t>(best);
  }
  return dm;
}

namespace {

Raster fuse_sources(std::span<const Raster* const> sources, const DecisionMap& dm) {
  if (sources.size() != dm.sources) {
    throw std::invalid_argument("fuse: decision map built for " + std::to_string(dm.sources) +
                                " sources, got " + std::to_string(sources.size()));
  }
  const Raster& first = *sources[0];
  for (const Raster* s : sources) require_same_raster_shape(*s, first);
  if (dm.labels.rows() != first.rows || dm.labels.cols() != first.cols) {
    throw ShapeError("fuse: decision map size does not match the sources");
  }
  Raster out(first.rows, first.cols, first.channels, first.max_value);
  for (std::size_t i = 0; i < first.rows; ++i) {
    for (std::size_t j = 0; j < first.cols; ++j) {
      const std::size_t k = dm.source_index(i, j);
      if (k >= sources.size()) throw std::invalid_argument("fuse: label out of range");
      for (std::size_t c = 0; c < first.channels; ++c) out.at(i, j, c) = sources[k]->at(i, j, c);
    }
  }
  return out;
}

}  // namespace

Raster fuse_select(std::span<const Raster> sources, const DecisionMap& dm) {
  std::vector<const Raster*> ptrs;
  for (const auto& s : sources) ptrs.push_back(&s);
  return fuse_sources(ptrs, dm);
}

Raster fuse_pair(const Raster& a, const Raster& b, const DecisionMap& dm) {
  if (!dm.is_pair()) throw std::invalid_argument("fuse_pair: decision map is not binary");
  const Raster* pair[] = {&a, &b};
  return fuse_sources(pair, dm);
}

FocusMap focus_features(const Raster& source, const FusionConfig& config) {
  GrayImage gray = to_luminance(source);
  if (!config.use_sml) return FocusMap(std::move(gray));
  return sml(gray, config.sml_step, config.sml_window);
}

FusionResult run_fusion(std::span<const Raster> sources, const FusionConfig& config) {
  config.validate();
  if (sources.size() < 2) throw std::invalid_argument("run_fusion: need at least two sources");
  for (const auto& s : sources) {
    require_same_raster_shape(s, sources[0]);
    for (double x : s.samples) {
      if (!std::isfinite(x)) throw std::invalid_argument("run_fusion: non-finite pixel");
    }
  }

  FusionResult result;
  auto t0 = Clock::now();
  std::vector<FocusMap> features;
  features.reserve(sources.size());
  for (const auto& s : sources) features.push_back(focus_features(s, config));
  result.timings.push_back({"focus", elapsed_ms(t0)});

  t0 = Clock::now();
  NeuronParams params = config.params;
  if (config.auto_configure) {
    const InputScaling scaling = auto_configure(features, config.params);
    params = scaling.params;
    result.scale = scaling.scale;
  } else {
    result.scale = config.input_gain;
  }
  result.lattice_inputs.reserve(features.size());
  for (const auto& f : features) result.lattice_inputs.push_back(scaled(f, result.scale));
  result.timings.push_back({"configure", elapsed_ms(t0)});

  t0 = Clock::now();
  result.spikes.resize(sources.size());
  if (config.parallel) {
    std::vector<std::future<SpikeMatrix>> jobs;
    for (const auto& input : result.lattice_inputs) {
      jobs.push_back(std::async(std::launch::async, [&input, &params, &config] {
        return run_lattice(input, params, config.iterations);
      }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) result.spikes[k] = jobs[k].get();
  } else {
    for (std::size_t k = 0; k < sources.size(); ++k) {
      result.spikes[k] = run_lattice(result.lattice_inputs[k], params, config.iterations);
    }
  }
  result.timings.push_back({"lattice", elapsed_ms(t0)});

  t0 = Clock::now();
  for (const auto& sm : result.spikes) result.densities.push_back(spike_density(sm, config.radius));
  result.timings.push_back({"density", elapsed_ms(t0)});

  t0 = Clock::now();
  result.decision = select_by_density(result.densities);
  result.timings.push_back({"decision", elapsed_ms(t0)});

  t0 = Clock::now();
  result.fused = fuse_select(sources, result.decision);
  result.timings.push_back({"fusion", elapsed_ms(t0)});
  return result;
}

}  // namespace ndcnp
