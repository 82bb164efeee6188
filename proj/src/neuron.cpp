#include "ndcnp/neuron.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ndcnp {

namespace {

Grid<double> default_weights() {
  return Grid<double>(3, 3, {0.1, 0.2, 0.1,
                             0.2, 0.0, 0.2,
                             0.1, 0.2, 0.1});
}

}  // namespace

SynapticKernel::SynapticKernel() : SynapticKernel(default_weights()) {}

SynapticKernel::SynapticKernel(Grid<double> weights) : weights_(std::move(weights)) {
  if (weights_.rows() % 2 == 0 || weights_.cols() % 2 == 0) {
    throw std::invalid_argument("synaptic kernel dimensions must be odd");
  }
  if (weights_(weights_.rows() / 2, weights_.cols() / 2) != 0.0) {
    throw std::invalid_argument("synaptic kernel centre must be 0 (no self-synapse)");
  }
  sum_ = 0.0;
  for (double w : weights_.values()) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("synaptic weights must be finite and non-negative");
    }
    sum_ += w;
  }
  if (!(sum_ > 0.0)) {
    throw std::invalid_argument("synaptic kernel must have a positive weight sum");
  }
}

void NeuronParams::validate() const {
  auto unit = [](double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) {
      throw std::invalid_argument(std::string(name) + " must lie in (0,1), got " +
                                  std::to_string(x));
    }
  };
  unit(alpha, "alpha");
  unit(beta, "beta");
  unit(gamma, "gamma");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and >= 0, got " + std::to_string(lambda));
  }
}

LatticeState LatticeState::zeros(std::size_t rows, std::size_t cols) {
  return {Grid<double>(rows, cols), Grid<double>(rows, cols), Grid<double>(rows, cols),
          Grid<std::uint8_t>(rows, cols), 0};
}

Lattice::Lattice(const FocusMap& input, const NeuronParams& params)
    : Lattice(LatticeState::zeros(input.rows(), input.cols()), input, params) {}

Lattice::Lattice(LatticeState initial, const FocusMap& input, const NeuronParams& params)
    : input_(input.values().begin(), input.values().end()),
      params_(params),
      rows_(input.rows()),
      cols_(input.cols()),
      pad_rows_(params.kernel.radius_rows()),
      pad_cols_(params.kernel.radius_cols()),
      stride_(input.cols() + 2 * params.kernel.radius_cols()),
      step_(initial.step) {
  params_.validate();
  require_same_shape(initial.spikes, input, "lattice_step");
  require_same_shape(initial.feeding, input, "lattice_step");
  require_same_shape(initial.linking, input, "lattice_step");
  require_same_shape(initial.threshold, input, "lattice_step");
  feeding_.assign(initial.feeding.values().begin(), initial.feeding.values().end());
  linking_.assign(initial.linking.values().begin(), initial.linking.values().end());
  threshold_.assign(initial.threshold.values().begin(), initial.threshold.values().end());
  const std::size_t padded = (rows_ + 2 * pad_rows_) * stride_;
  spikes_.assign(padded, 0);
  next_spikes_.assign(padded, 0);
  load_spikes(initial.spikes);
  build_taps();
}

void Lattice::build_taps() {
  const auto& w = params_.kernel.weights();
  taps_.clear();
  for (std::size_t k = 0; k < w.rows(); ++k) {
    for (std::size_t l = 0; l < w.cols(); ++l) {
      if (w(k, l) == 0.0) continue;
      const auto dy = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad_rows_);
      const auto dx = static_cast<std::ptrdiff_t>(l) - static_cast<std::ptrdiff_t>(pad_cols_);
      taps_.push_back({dy * static_cast<std::ptrdiff_t>(stride_) + dx, w(k, l)});
    }
  }
}

void Lattice::load_spikes(const Grid<std::uint8_t>& spikes) {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (spikes(i, j) > 1) throw std::invalid_argument("spike plane must be binary");
      spikes_[(i + pad_rows_) * stride_ + j + pad_cols_] = spikes(i, j);
    }
  }
}

void Lattice::step() {
  const double alpha = params_.alpha;
  const double beta = params_.beta;
  const double gamma = params_.gamma;
  const double lambda = params_.lambda;
  for (std::size_t i = 0; i < rows_; ++i) {
    const std::size_t base = i * cols_;
    const std::size_t pbase = (i + pad_rows_) * stride_ + pad_cols_;
    for (std::size_t j = 0; j < cols_; ++j) {
      const std::size_t p = pbase + j;
      double drive = 0.0;
      for (const Tap& tap : taps_) {
        drive += tap.weight * spikes_[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) +
                                                               tap.offset)];
      }
      const std::size_t n = base + j;
      double u = feeding_[n];
      double v = linking_[n];
      double t = threshold_[n];
      if (spikes_[p]) {
        u *= alpha;
        v *= beta;
        t = gamma * t + lambda;
      }
      u += input_[n] + drive;
      v += drive;
      feeding_[n] = u;
      linking_[n] = v;
      threshold_[n] = t;
      next_spikes_[p] = fire_predicate(u, v, t) ? 1 : 0;
    }
  }
  spikes_.swap(next_spikes_);
  ++step_;
}

void Lattice::run(std::size_t iterations, Grid<std::uint32_t>* counts) {
  for (std::size_t s = 0; s < iterations; ++s) {
    step();
    if (counts == nullptr) continue;
    auto out = counts->values();
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::uint8_t* src = spikes_.data() + (i + pad_rows_) * stride_ + pad_cols_;
      std::uint32_t* dst = out.data() + i * cols_;
      for (std::size_t j = 0; j < cols_; ++j) dst[j] += src[j];
    }
  }
}

LatticeState Lattice::state() const {
  LatticeState s{Grid<double>(rows_, cols_, feeding_), Grid<double>(rows_, cols_, linking_),
                 Grid<double>(rows_, cols_, threshold_), Grid<std::uint8_t>(rows_, cols_), step_};
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      s.spikes(i, j) = spikes_[(i + pad_rows_) * stride_ + j + pad_cols_];
    }
  }
  return s;
}

LatticeState lattice_step(const LatticeState& state, const FocusMap& input,
                          const NeuronParams& params) {
  Lattice lattice(state, input, params);
  lattice.step();
  return lattice.state();
}

SpikeMatrix run_lattice(const FocusMap& input, const NeuronParams& params,
                        std::size_t iterations) {
  if (iterations == 0) throw std::invalid_argument("run_lattice: iterations must be >= 1");
  for (double x : input.values()) {
    if (!std::isfinite(x)) throw std::invalid_argument("run_lattice: non-finite input value");
    if (x < 0.0) throw std::invalid_argument("run_lattice: negative input value");
  }
  Lattice lattice(input, params);
  SpikeMatrix result{Grid<std::uint32_t>(input.rows(), input.cols()), iterations};
  lattice.run(iterations, &result.counts);
  return result;
}

}  // namespace ndcnp
