// Acceptance suite: one line per criterion, non-zero exit if any fails.
// Usage: ndcnp_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "metric_oracles.hpp"
#include "ndcnp/cli.hpp"
#include "ndcnp/focus.hpp"
#include "ndcnp/fusion.hpp"
#include "ndcnp/metrics.hpp"
#include "ndcnp/neurodynamics.hpp"
#include "support.hpp"

using namespace ndcnp;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

NeuronParams sum_params(double a, double b, double g, double l) {
  NeuronParams p;
  p.alpha = a;
  p.beta = b;
  p.gamma = g;
  p.lambda = l;
  return p;
}

// C1: threshold of the verified parameter set.
Verdict threshold_reproduction() {
  Verdict v;
  const NeuronParams p = sum_params(0.8, 0.2, 0.5, 15.0);
  const auto t0 = Clock::now();
  const double th = continuous_firing_threshold(p);
  const double elapsed = ms_since(t0);
  v.require(std::abs(th - 1.2) <= 1e-12, fmt("threshold %.17g", th));
  v.require(elapsed < 1.0, fmt("took %.3f ms", elapsed));
  v.note(fmt("threshold %.15g", th) + fmt(", %.4f ms", elapsed));
  return v;
}

// C2: firing regimes under inputs 0.5, 1.0, 1.5, 2.0.
Verdict regime_reproduction() {
  Verdict v;
  const NeuronParams p;
  const auto t0 = Clock::now();
  std::vector<std::vector<NeuronSample>> traces;
  for (double input : {0.5, 1.0, 1.5, 2.0}) traces.push_back(single_neuron_trace(input, p, 500));
  const double elapsed = ms_since(t0);

  const double r05 = firing_rate(traces[0], 1, 500);
  const double r10 = firing_rate(traces[1], 1, 500);
  const double r15 = firing_rate(traces[2], 1, 500);
  const double r20 = firing_rate(traces[3], 1, 500);
  v.require(r15 == 1.0, fmt("I=1.5 fires on %.1f%% of 500 steps, not 100%%", 100 * r15));
  v.require(r20 == 1.0, fmt("I=2.0 fires on %.1f%% of 500 steps, not 100%%", 100 * r20));
  v.require(r05 < 1.0 && r10 < 1.0, "low inputs fire at every step");
  v.require(r05 < r10, fmt2("rate(0.5)=%.3f >= rate(1.0)=%.3f", r05, r10));
  const double e05 = firing_rate(traces[0], 1, 20);
  const double e10 = firing_rate(traces[1], 1, 20);
  v.require(std::abs(e05 - 0.60) <= 0.10 + 1e-12, fmt("first-20 rate(0.5)=%.2f", e05));
  v.require(std::abs(e10 - 0.70) <= 0.10 + 1e-12, fmt("first-20 rate(1.0)=%.2f", e10));
  v.require(elapsed < 10.0, fmt("took %.3f ms", elapsed));
  v.note(fmt2("first-20 rates %.0f%%/%.0f%%", 100 * e05, 100 * e10) +
         fmt2(", steady-state (steps 251-500) I=1.5 %.0f%% I=2.0 %.0f%%",
              100 * firing_rate(traces[2], 251, 500), 100 * firing_rate(traces[3], 251, 500)) +
         fmt(", %.3f ms", elapsed));
  return v;
}

// Smallest input for which the closed forms predict a spike at every step
// 1..horizon (the closed forms' own hypothesis).
double every_step_bound(const NeuronParams& p, std::size_t horizon) {
  const double s = p.kernel.sum();
  std::vector<double> k(horizon + 1, s);
  k[0] = 0.0;
  double bound = 0.0;
  for (std::size_t t = 2; t <= horizon; ++t) {
    const double gain = (1.0 - std::pow(p.alpha, static_cast<double>(t))) / (1.0 - p.alpha);
    const double drive = closed_form_feeding(t, 0.0, p, k);
    const double need = closed_form_threshold(t, p) / (1.0 + closed_form_linking(t, p, k));
    bound = std::max(bound, (need - drive) / gain);
  }
  return bound;
}

// C3: simulated U/V/T follow the closed forms.
Verdict closed_form_equivalence() {
  Verdict v;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> margin(1e-3, 2.0);
  const std::size_t horizon = 200;
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    const NeuronParams p = testing::random_params(rng);
    const double input =
        std::max(continuous_firing_threshold(p), every_step_bound(p, horizon)) + margin(rng);
    const auto trace = single_neuron_trace(input, p, horizon);
    std::vector<double> k(horizon + 1, p.kernel.sum());
    k[0] = 0.0;
    for (std::size_t t = 1; t <= horizon; ++t) {
      if (!trace[t].fired) {
        v.require(false, "trial " + std::to_string(trial) + " missed a spike at t=" +
                             std::to_string(t));
        break;
      }
      const double refs[3] = {closed_form_feeding(t, input, p, k), closed_form_linking(t, p, k),
                              closed_form_threshold(t, p)};
      const double sims[3] = {trace[t].feeding, trace[t].linking, trace[t].threshold};
      for (int c = 0; c < 3; ++c) {
        worst = std::max(worst, std::abs(sims[c] - refs[c]) / std::max(1e-300, std::abs(refs[c])) *
                                    (refs[c] == 0.0 && sims[c] == 0.0 ? 0.0 : 1.0));
      }
    }
  }
  const double elapsed = ms_since(t0);
  v.require(worst <= 1e-9, fmt("max relative error %.3g", worst));
  v.require(elapsed < 1000.0, fmt("took %.1f ms", elapsed));
  v.note(fmt("max relative error %.3g", worst) + fmt(", %.1f ms", elapsed));
  return v;
}

// C4: threshold +/- 1e-3 flips the classification.
Verdict threshold_sharpness() {
  Verdict v;
  std::mt19937_64 rng(404);
  int checked = 0;
  const auto t0 = Clock::now();
  while (checked < 10) {
    const NeuronParams p = testing::random_params(rng);
    const double th = continuous_firing_threshold(p);
    if (th < 0.05) continue;
    ++checked;
    const auto above = classify_trace(single_neuron_trace(th + 1e-3, p, 500));
    const auto below = classify_trace(single_neuron_trace(th - 1e-3, p, 500));
    v.require(above == FiringRegime::kContinuous && below == FiringRegime::kSafe,
              "no flip at threshold " + fmt("%.6f", th));
  }
  const double elapsed = ms_since(t0);
  v.require(elapsed < 1000.0, fmt("took %.1f ms", elapsed));
  v.note("10 parameter sets" + fmt(", %.2f ms", elapsed));
  return v;
}

// C5: spike density against brute force.
Verdict density_oracle() {
  Verdict v;
  std::mt19937_64 rng(505);
  const std::size_t radii[] = {1, 2, 3, 8};
  std::size_t mismatches = 0;
  double elapsed = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 32;
    const std::size_t cols = 1 + rng() % 32;
    const std::size_t r = radii[trial % 4];
    SpikeMatrix sm{Grid<std::uint32_t>(rows, cols), 110};
    for (auto& c : sm.counts.values()) c = static_cast<std::uint32_t>(rng() % 111);
    const auto t0 = Clock::now();
    const Grid<double> f = spike_density(sm, r);
    elapsed += ms_since(t0);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        double acc = 0.0;
        for (std::size_t y = i >= r ? i - r : 0; y <= std::min(i + r, rows - 1); ++y) {
          for (std::size_t x = j >= r ? j - r : 0; x <= std::min(j + r, cols - 1); ++x) {
            acc += sm.counts(y, x);
          }
        }
        mismatches += f(i, j) == acc ? 0 : 1;
      }
    }
  }
  v.require(mismatches == 0, std::to_string(mismatches) + " mismatching pixels");
  v.require(elapsed < 1000.0, fmt("took %.1f ms", elapsed));
  v.note("200 instances" + fmt(", %.2f ms", elapsed));
  return v;
}

struct SyntheticRun {
  double worst_accuracy = 1.0;
  bool pure = true;
  std::uint32_t max_count = 0;
  double elapsed_ms = 0.0;
};

const SyntheticRun& synthetic_runs() {
  static const SyntheticRun run = [] {
    SyntheticRun out;
    std::mt19937_64 rng(606);
    const FusionConfig config;
    for (int trial = 0; trial < 20; ++trial) {
      const auto pair = testing::half_blur_pair(128, 3.0, rng);
      const std::vector<Raster> sources = {pair.a, pair.b};
      const auto t0 = Clock::now();
      const FusionResult r = run_fusion(sources, config);
      out.elapsed_ms += ms_since(t0);
      std::size_t correct = 0;
      std::size_t total = 0;
      for (std::size_t i = 0; i < 128; ++i) {
        for (std::size_t j = 0; j < 128; ++j) {
          const double f = r.fused.at(i, j, 0);
          out.pure = out.pure && (f == pair.a.at(i, j, 0) || f == pair.b.at(i, j, 0));
          const std::size_t dist = j >= pair.seam ? j - pair.seam : pair.seam - j;
          if (dist < config.radius) continue;
          ++total;
          correct += r.decision.labels(i, j) == (j >= pair.seam ? 1 : 0) ? 1 : 0;
        }
      }
      out.worst_accuracy =
          std::min(out.worst_accuracy, static_cast<double>(correct) / static_cast<double>(total));
      for (const auto& sm : r.spikes) {
        out.max_count = std::max(out.max_count,
                                 *std::max_element(sm.counts.values().begin(), sm.counts.values().end()));
      }
    }
    return out;
  }();
  return run;
}

// C6: decision maps on synthetic half-blur pairs.
Verdict synthetic_fusion() {
  Verdict v;
  const SyntheticRun& run = synthetic_runs();
  v.require(run.worst_accuracy >= 0.95, fmt("worst accuracy %.4f", run.worst_accuracy));
  v.require(run.pure, "fused pixel not taken from a source");
  v.require(run.elapsed_ms < 30000.0, fmt("took %.0f ms", run.elapsed_ms));
  v.note(fmt("worst accuracy %.4f", run.worst_accuracy) + fmt(", %.0f ms for 20 pairs", run.elapsed_ms));
  return v;
}

// C7: identical sources.
Verdict identity_fusion() {
  Verdict v;
  std::mt19937_64 rng(707);
  const Raster img = testing::to_raster8(testing::random_texture(128, 128, rng));
  const std::vector<Raster> sources = {img, img};
  const auto t0 = Clock::now();
  const FusionResult r = run_fusion(sources, FusionConfig{});
  const double elapsed = ms_since(t0);
  v.require(r.fused == img, "fused image differs from the input");
  v.require(std::all_of(r.decision.labels.values().begin(), r.decision.labels.values().end(),
                        [](std::uint8_t x) { return x == 0; }),
            "decision map not all zero");
  v.require(elapsed < 1000.0, fmt("took %.1f ms", elapsed));
  v.note(fmt("%.1f ms", elapsed));
  return v;
}

// C8: auto-configuration prevents saturation; disabling it with large inputs does not.
Verdict no_continuous_firing() {
  Verdict v;
  const SyntheticRun& run = synthetic_runs();
  v.require(run.max_count < 110, "a pixel fired at all 110 steps with auto-configuration");

  std::mt19937_64 rng(606);
  const auto pair = testing::half_blur_pair(128, 3.0, rng);
  const std::vector<Raster> sources = {pair.a, pair.b};
  FusionConfig ablated;
  ablated.auto_configure = false;
  FocusMap fa = focus_features(pair.a, ablated);
  const double peak = *std::max_element(fa.values().begin(), fa.values().end());
  ablated.input_gain = 10.0 * continuous_firing_threshold(ablated.params) / peak;
  const FusionResult r = run_fusion(sources, ablated);
  std::size_t saturated = 0;
  for (const auto& sm : r.spikes) {
    for (auto c : sm.counts.values()) saturated += c == ablated.iterations ? 1 : 0;
  }
  v.require(saturated > 0, "no saturated pixel without auto-configuration");
  v.note("max count " + std::to_string(run.max_count) + "/110 with auto-configuration; " +
         std::to_string(saturated) + " saturated pixels at 10x threshold without");
  return v;
}

// C9: metric maxima, ranges and brute-force agreement.
Verdict metric_sanity() {
  Verdict v;
  std::mt19937_64 rng(909);
  const GrayImage a(testing::random_texture(32, 32, rng));
  v.require(psnr(a, a, a) == MetricConstants::kPsnrCapDb, "psnr(A,A,A) below cap");
  v.require(std::abs(ssim(a, a, a) - 1.0) < 1e-12, "ssim(A,A,A) != 1");
  v.require(std::abs(qabf(a, a, a) - 1.0) < 1e-12, "qabf(A,A,A) != 1");

  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto noise = [&](std::size_t n) {
    GrayImage g(n, n);
    for (double& x : g.values()) x = u(rng);
    return g;
  };
  double worst_ssim = 0.0;
  double worst_qabf = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const GrayImage f = noise(16);
    const GrayImage x = noise(16);
    const GrayImage y(testing::gaussian_blur(x, 1.0));
    const double q = qabf(f, x, y);
    const double s = ssim(f, x, y);
    const double p = psnr(f, x, y);
    v.require(q >= 0.0 && q <= 1.0, fmt("qabf out of range %.6f", q));
    v.require(s >= -1.0 && s <= 1.0, fmt("ssim out of range %.6f", s));
    v.require(p >= 0.0 && p <= MetricConstants::kPsnrCapDb, fmt("psnr out of range %.3f", p));
    worst_ssim = std::max(worst_ssim, std::abs(s - 0.5 * (testing::ssim_direct(f, x) +
                                                          testing::ssim_direct(f, y))));
    worst_qabf = std::max(worst_qabf, std::abs(q - testing::qabf_direct(f, x, y)));
  }
  v.require(worst_ssim <= 1e-4, fmt("ssim deviates by %.3g", worst_ssim));
  v.require(worst_qabf <= 1e-4, fmt("qabf deviates by %.3g", worst_qabf));
  v.note(fmt2("max deviation ssim %.2g qabf %.2g", worst_ssim, worst_qabf));
  return v;
}

// C10: end-to-end budget and radius-independent density cost.
Verdict performance() {
  Verdict v;
  std::mt19937_64 rng(1010);
  const std::size_t size = 520;
  const Grid<double> base = testing::random_texture(size, size, rng);
  const Grid<double> blurred = testing::gaussian_blur(base, 3.0);
  Raster a(size, size, 3, 255.0);
  Raster b(size, size, 3, 255.0);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double tint = 0.8 + 0.1 * static_cast<double>(c);
        a.at(i, j, c) = std::round(255.0 * tint * (j < size / 2 ? blurred(i, j) : base(i, j)));
        b.at(i, j, c) = std::round(255.0 * tint * (j < size / 2 ? base(i, j) : blurred(i, j)));
      }
    }
  }
  FusionConfig config;
  config.parallel = false;
  const std::vector<Raster> sources = {a, b};
  double best = 1e300;
  FusionResult result;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    result = run_fusion(sources, config);
    best = std::min(best, ms_since(t0));
  }
  v.require(best <= 2000.0, fmt("end-to-end %.0f ms", best));

  auto density_time = [&](std::size_t r) {
    double fastest = 1e300;
    for (int rep = 0; rep < 15; ++rep) {
      const auto t0 = Clock::now();
      const Grid<double> f = spike_density(result.spikes[0], r);
      fastest = std::min(fastest, ms_since(t0));
      if (f(0, 0) < 0) std::abort();
    }
    return fastest;
  };
  const double t2 = density_time(2);
  const double t32 = density_time(32);
  const double ratio = t32 / t2;
  v.require(ratio >= 1.0 / 1.2 && ratio <= 1.2, fmt2("density r=2 %.3f ms vs r=32 %.3f ms", t2, t32));
  v.note(fmt("520x520 pair %.0f ms single-threaded", best) +
         fmt2(", density r=2 %.3f ms r=32 %.3f ms", t2, t32));
  return v;
}

// Optional: a locally supplied Lytro directory (<id>_A/<id>_B). Informational only.
void lytro_reference() {
  const char* dir = std::getenv("NDCNP_LYTRO_DIR");
  if (dir == nullptr) {
    std::printf("[INFO] Lytro reference: NDCNP_LYTRO_DIR not set, skipped\n");
    return;
  }
  const std::string out = std::string(dir) + "/../ndcnp_lytro_eval";
  std::vector<std::string> args = {"eval", dir, "-o", out};
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run(args, o, e);
  std::printf("[INFO] Lytro reference (Qabf target 0.7621 +/- 0.03): exit %d, %s", code,
              o.str().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"threshold reproduction", threshold_reproduction},
      {"regime reproduction", regime_reproduction},
      {"closed-form equivalence", closed_form_equivalence},
      {"threshold sharpness", threshold_sharpness},
      {"density oracle", density_oracle},
      {"synthetic fusion oracle", synthetic_fusion},
      {"identity fusion", identity_fusion},
      {"no-continuous-firing guarantee", no_continuous_firing},
      {"metric sanity", metric_sanity},
      {"performance budget", performance},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  int failures = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    const int id = static_cast<int>(n) + 1;
    if (!selected.empty() && selected.count(id) == 0) continue;
    const Verdict v = criteria[n].second();
    std::printf("[%s] C%-2d %-32s %s\n", v.pass ? "PASS" : "FAIL", id, criteria[n].first.c_str(),
                v.detail.c_str());
    failures += v.pass ? 0 : 1;
  }
  if (selected.empty() || selected.count(0) != 0) lytro_reference();
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
