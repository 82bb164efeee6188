#include "ndcnp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ndcnp/focus.hpp"
#include "ndcnp/fusion.hpp"
#include "ndcnp/image_io.hpp"
#include "ndcnp/metrics.hpp"
#include "ndcnp/neurodynamics.hpp"

namespace ndcnp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct ParamFlags {
  double alpha = 0.8;
  double beta = 0.2;
  double gamma = 0.5;
  double lambda = 15.0;
  std::string kernel_path;

  void add_to(CLI::App& app) {
    app.add_option("--alpha", alpha, "Feeding decay factor in (0,1)")->capture_default_str();
    app.add_option("--beta", beta, "Linking decay factor in (0,1)")->capture_default_str();
    app.add_option("--gamma", gamma, "Threshold decay factor in (0,1)")->capture_default_str();
    app.add_option("--lambda", lambda, "Threshold weight (>= 0)")->capture_default_str();
    app.add_option("--kernel", kernel_path, "Text file with the synaptic weight matrix");
  }

  NeuronParams resolve() const {
    NeuronParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.lambda = lambda;
    if (!kernel_path.empty()) p.kernel = load_kernel(kernel_path);
    p.validate();
    return p;
  }
};

struct FusionFlags {
  ParamFlags params;
  std::size_t radius = 16;
  std::size_t iterations = 110;
  std::size_t sml_window = 3;
  std::size_t sml_step = 1;
  bool no_sml = false;
  bool no_autoconfig = false;
  double input_gain = 1.0;
  bool sequential = false;

  void add_to(CLI::App& app) {
    app.add_option("--radius", radius, "Coupling radius r for spike densities")->capture_default_str();
    app.add_option("--iters", iterations, "Lattice iterations t")->capture_default_str();
    app.add_option("--sml-window", sml_window, "SML window (odd)")->capture_default_str();
    app.add_option("--sml-step", sml_step, "Modified Laplacian step")->capture_default_str();
    app.add_flag("--no-sml", no_sml, "Drive the lattices with luminance instead of SML");
    app.add_flag("--no-autoconfig", no_autoconfig, "Skip the joint input scaling");
    app.add_option("--input-gain", input_gain, "Fixed input scale used with --no-autoconfig")
        ->capture_default_str();
    app.add_flag("--sequential", sequential, "Run the per-source lattices on one thread");
    params.add_to(app);
  }

  FusionConfig resolve() const {
    FusionConfig c;
    c.radius = radius;
    c.iterations = iterations;
    c.sml_window = sml_window;
    c.sml_step = sml_step;
    c.use_sml = !no_sml;
    c.auto_configure = !no_autoconfig;
    c.input_gain = input_gain;
    c.parallel = !sequential;
    c.params = params.resolve();
    c.validate();
    return c;
  }
};

json kernel_json(const SynapticKernel& k) {
  json rows = json::array();
  for (std::size_t i = 0; i < k.weights().rows(); ++i) {
    json row = json::array();
    for (double w : k.weights().row(i)) row.push_back(w);
    rows.push_back(row);
  }
  return rows;
}

json config_json(const FusionConfig& c) {
  return {
      {"radius", c.radius},
      {"iterations", c.iterations},
      {"alpha", c.params.alpha},
      {"beta", c.params.beta},
      {"gamma", c.params.gamma},
      {"lambda", c.params.lambda},
      {"kernel", kernel_json(c.params.kernel)},
      {"kernel_sum", c.params.kernel.sum()},
      {"continuous_firing_threshold", continuous_firing_threshold(c.params)},
      {"sml", c.use_sml},
      {"sml_step", c.sml_step},
      {"sml_window", c.sml_window},
      {"auto_configure", c.auto_configure},
      {"input_gain", c.input_gain},
  };
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ImageIoError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ImageIoError("write failed for '" + path.string() + "'");
}

int cmd_fuse(const std::vector<std::string>& inputs, const fs::path& out_dir,
             const FusionFlags& flags, bool emit_spikes, std::ostream& out) {
  const FusionConfig config = flags.resolve();
  if (inputs.size() < 2) throw std::invalid_argument("fuse needs at least two images");

  json timings = json::object();
  auto t0 = Clock::now();
  std::vector<Raster> sources;
  for (const auto& p : inputs) sources.push_back(load_raster(p));
  timings["load"] = elapsed_ms(t0);

  const FusionResult result = run_fusion(sources, config);
  for (const auto& t : result.timings) timings[t.stage] = t.milliseconds;

  t0 = Clock::now();
  fs::create_directories(out_dir);
  json outputs = json::array();
  const fs::path fused_path = out_dir / "fused.png";
  save_png(result.fused, fused_path);
  outputs.push_back(fused_path.string());
  const fs::path dm_path = out_dir / "dm.png";
  save_decision_map(result.decision, dm_path);
  outputs.push_back(dm_path.string());
  if (emit_spikes) {
    for (std::size_t k = 0; k < result.spikes.size(); ++k) {
      const fs::path p = out_dir / ("spikes_" + std::to_string(k) + ".png");
      save_spike_matrix(result.spikes[k], p);
      outputs.push_back(p.string());
    }
  }
  const fs::path manifest_path = out_dir / "manifest.json";
  outputs.push_back(manifest_path.string());
  timings["write"] = elapsed_ms(t0);

  json manifest = {
      {"inputs", inputs},
      {"config", config_json(config)},
      {"scale", result.scale},
      {"outputs", outputs},
      {"timings_ms", timings},
  };
  write_text(manifest_path, manifest.dump(2) + "\n");
  out << "fused " << inputs.size() << " images -> " << fused_path.string() << "\n";
  return kSuccess;
}

struct PairFiles {
  std::optional<fs::path> a;
  std::optional<fs::path> b;
  std::optional<fs::path> fused;
};

std::map<std::string, PairFiles> scan_dataset(const fs::path& dir) {
  static const std::regex pattern(R"(^(.+)_(A|B|fused)\.(png|jpe?g|tiff?|bmp)$)",
                                  std::regex::icase);
  std::map<std::string, PairFiles> pairs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    PairFiles& pf = pairs[m[1].str()];
    const std::string role = m[2].str();
    if (role == "A" || role == "a") {
      pf.a = entry.path();
    } else if (role == "B" || role == "b") {
      pf.b = entry.path();
    } else {
      pf.fused = entry.path();
    }
  }
  return pairs;
}

int cmd_eval(const fs::path& dir, const fs::path& out_dir, const FusionFlags& flags,
             bool write_fused, std::size_t jobs, std::ostream& out, std::ostream& err) {
  const FusionConfig config = flags.resolve();
  if (!fs::is_directory(dir)) throw ImageIoError("not a directory: '" + dir.string() + "'");
  const auto pairs = scan_dataset(dir);

  struct Task {
    std::string id;
    PairFiles files;
  };
  std::vector<Task> tasks;
  for (const auto& [id, files] : pairs) {
    if (!files.a || !files.b) {
      err << "warning: skipping '" << id << "': missing " << (files.a ? "B" : "A") << " image\n";
      continue;
    }
    tasks.push_back({id, files});
  }

  if (write_fused) fs::create_directories(out_dir);
  std::vector<std::optional<MetricRow>> rows(tasks.size());
  std::vector<std::string> warnings(tasks.size());
  FusionConfig task_config = config;
  task_config.parallel = false;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& task = tasks[k];
      try {
        const Raster a = load_raster(*task.files.a);
        const Raster b = load_raster(*task.files.b);
        Raster fused;
        if (task.files.fused) {
          fused = load_raster(*task.files.fused);
        } else {
          const Raster sources[] = {a, b};
          fused = run_fusion(sources, task_config).fused;
          if (write_fused) save_png(fused, out_dir / (task.id + "_fused.png"));
        }
        rows[k] = evaluate(task.id, to_luminance(fused), to_luminance(a), to_luminance(b));
      } catch (const std::exception& e) {
        warnings[k] = "warning: skipping '" + task.id + "': " + e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  MetricReport report;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (!warnings[k].empty()) err << warnings[k] << "\n";
    if (rows[k]) report.rows.push_back(*rows[k]);
  }
  if (report.rows.empty()) {
    err << "error: no evaluable image pairs in '" << dir.string() << "'\n";
    return kIoError;
  }
  fs::create_directories(out_dir);
  write_text(out_dir / "metrics.csv", report.to_csv());
  write_text(out_dir / "metrics.json", report.to_json() + "\n");
  const MetricRow mean = report.mean();
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu pairs: Qabf %.4f  SSIM %.4f  PSNR %.3f dB\n",
                report.rows.size(), mean.qabf, mean.ssim, mean.psnr);
  out << buf;
  return kSuccess;
}

std::vector<double> parse_inputs(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad input value '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("--inputs is empty");
  return values;
}

int cmd_verify_dynamics(const ParamFlags& flags, const std::string& inputs_text,
                        std::size_t horizon, const std::string& drive_name, std::ostream& out) {
  const NeuronParams params = flags.resolve();
  const NeighborDrive drive = parse_neighbor_drive(drive_name);
  const std::vector<double> inputs = parse_inputs(inputs_text);
  if (horizon < 2) throw std::invalid_argument("--horizon must be >= 2");

  const double threshold = continuous_firing_threshold(params);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "alpha=%g beta=%g gamma=%g lambda=%g sum(W)=%g drive=%s horizon=%zu\n", params.alpha,
                params.beta, params.gamma, params.lambda, params.kernel.sum(),
                std::string(to_string(drive)).c_str(), horizon);
  out << buf;
  std::snprintf(buf, sizeof buf, "continuous firing threshold: %.12g\n", threshold);
  out << buf;
  out << "    input   rate(all)  rate(1-20)   predicted   simulated  match\n";
  bool all_match = true;
  for (double input : inputs) {
    const FiringRegimeReport r = regime_report(input, params, horizon, drive);
    const auto trace = single_neuron_trace(input, params, horizon, drive);
    const double early = firing_rate(trace, 1, std::min<std::size_t>(20, horizon));
    all_match = all_match && r.consistent();
    std::snprintf(buf, sizeof buf, "%9.4f %10.1f%% %10.1f%% %11s %11s  %s\n", input,
                  100.0 * r.firing_rate, 100.0 * early, std::string(to_string(r.regime)).c_str(),
                  std::string(to_string(r.simulated)).c_str(), r.consistent() ? "yes" : "NO");
    out << buf;
  }
  out << (all_match ? "all regimes match the threshold prediction\n"
                    : "regime mismatch against the threshold prediction\n");
  return all_match ? kSuccess : kVerificationFailure;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-focus image fusion with neurodynamics-constrained coupled neural P lattices",
               "ndcnp"};
  app.require_subcommand(1);

  std::vector<std::string> fuse_inputs;
  std::string fuse_out = "out";
  bool emit_spikes = false;
  FusionFlags fuse_flags;
  CLI::App* fuse = app.add_subcommand("fuse", "Fuse two or more registered multi-focus images");
  fuse->add_option("images", fuse_inputs, "Source images (>= 2, same size)")->required();
  fuse->add_option("-o,--out", fuse_out, "Output directory")->capture_default_str();
  fuse->add_flag("--emit-spikes", emit_spikes, "Also write 16-bit spike-count PNGs");
  fuse_flags.add_to(*fuse);

  std::string eval_dir;
  std::string eval_out = "eval_out";
  bool write_fused = false;
  std::size_t jobs = 1;
  FusionFlags eval_flags;
  CLI::App* eval = app.add_subcommand("eval", "Fuse and score a directory of <id>_A/<id>_B pairs");
  eval->add_option("dataset", eval_dir, "Dataset directory")->required();
  eval->add_option("-o,--out", eval_out, "Directory for metrics.csv / metrics.json")
      ->capture_default_str();
  eval->add_flag("--write-fused", write_fused, "Save the fused images next to the metrics");
  eval->add_option("-j,--jobs", jobs, "Pairs processed concurrently")->capture_default_str();
  eval_flags.add_to(*eval);

  ParamFlags verify_flags;
  std::string verify_inputs = "0.5,1.0,1.5,2.0";
  std::size_t horizon = 500;
  std::string drive = "saturated";
  CLI::App* verify = app.add_subcommand(
      "verify-dynamics", "Check simulated firing regimes against the continuous firing threshold");
  verify_flags.add_to(*verify);
  verify->add_option("--inputs", verify_inputs, "Comma-separated constant inputs")
      ->capture_default_str();
  verify->add_option("--horizon", horizon, "Simulated steps")->capture_default_str();
  verify->add_option("--drive", drive, "Neighbour drive: saturated, mirrored or none")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (fuse->parsed()) return cmd_fuse(fuse_inputs, fuse_out, fuse_flags, emit_spikes, out);
    if (eval->parsed()) {
      return cmd_eval(eval_dir, eval_out, eval_flags, write_fused, jobs, out, err);
    }
    if (verify->parsed()) return cmd_verify_dynamics(verify_flags, verify_inputs, horizon, drive, out);
  } catch (const ImageIoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace ndcnp::cli
