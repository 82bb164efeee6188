#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "ndcnp/focus.hpp"
#include "ndcnp/fusion.hpp"
#include "ndcnp/metrics.hpp"
#include "ndcnp/neurodynamics.hpp"

namespace py = pybind11;
using namespace ndcnp;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Grid<double> to_grid(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Grid<double>(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

template <typename T>
py::array_t<T> to_array(const Grid<T>& g) {
  py::array_t<T> out({g.rows(), g.cols()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

// HxW or HxWxC array; max_value 255 for uint8 input, 65535 for uint16, else 1.
Raster to_raster(const py::array& a) {
  double max_value = 1.0;
  if (py::isinstance<py::array_t<std::uint8_t>>(a)) max_value = 255.0;
  if (py::isinstance<py::array_t<std::uint16_t>>(a)) max_value = 65535.0;
  const DoubleArray d = DoubleArray::ensure(a);
  if (!d || (d.ndim() != 2 && d.ndim() != 3)) throw py::value_error("expected HxW or HxWxC");
  const auto rows = static_cast<std::size_t>(d.shape(0));
  const auto cols = static_cast<std::size_t>(d.shape(1));
  const auto channels = d.ndim() == 3 ? static_cast<std::size_t>(d.shape(2)) : 1;
  Raster r(rows, cols, channels, max_value);
  std::copy(d.data(), d.data() + r.samples.size(), r.samples.begin());
  return r;
}

py::array from_raster(const Raster& r) {
  std::vector<py::ssize_t> shape = {static_cast<py::ssize_t>(r.rows),
                                    static_cast<py::ssize_t>(r.cols)};
  if (r.channels > 1) shape.push_back(static_cast<py::ssize_t>(r.channels));
  auto fill = [&](auto arr) {
    auto* out = arr.mutable_data();
    for (std::size_t k = 0; k < r.samples.size(); ++k) out[k] = static_cast<std::remove_pointer_t<decltype(out)>>(r.samples[k]);
    return py::array(arr);
  };
  if (r.max_value == 255.0) return fill(py::array_t<std::uint8_t>(shape));
  if (r.max_value == 65535.0) return fill(py::array_t<std::uint16_t>(shape));
  return fill(py::array_t<double>(shape));
}

GrayImage gray(const DoubleArray& a) { return GrayImage(to_grid(a)); }

NeuronParams make_params(double alpha, double beta, double gamma, double lambda,
                         const std::optional<DoubleArray>& kernel) {
  NeuronParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.lambda = lambda;
  if (kernel) p.kernel = SynapticKernel(to_grid(*kernel));
  p.validate();
  return p;
}

std::vector<double> constant_drive(const NeuronParams& p, std::size_t t) {
  std::vector<double> k(t + 1, p.kernel.sum());
  k[0] = 0.0;
  return k;
}

}  // namespace

PYBIND11_MODULE(_ndcnp, m) {
  m.doc() = "Spiking-lattice multi-focus image fusion";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);

  py::class_<NeuronParams>(m, "NeuronParams")
      .def(py::init(&make_params), py::arg("alpha") = 0.8, py::arg("beta") = 0.2,
           py::arg("gamma") = 0.5, py::arg("lambda_") = 15.0, py::arg("kernel") = py::none())
      .def_readwrite("alpha", &NeuronParams::alpha)
      .def_readwrite("beta", &NeuronParams::beta)
      .def_readwrite("gamma", &NeuronParams::gamma)
      .def_readwrite("lambda_", &NeuronParams::lambda)
      .def_property_readonly("kernel", [](const NeuronParams& p) { return to_array(p.kernel.weights()); })
      .def("__repr__", [](const NeuronParams& p) {
        return "NeuronParams(alpha=" + std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) +
               ", gamma=" + std::to_string(p.gamma) + ", lambda_=" + std::to_string(p.lambda) + ")";
      });

  py::class_<FusionConfig>(m, "FusionConfig")
      .def(py::init<>())
      .def_readwrite("radius", &FusionConfig::radius)
      .def_readwrite("iterations", &FusionConfig::iterations)
      .def_readwrite("params", &FusionConfig::params)
      .def_readwrite("sml_step", &FusionConfig::sml_step)
      .def_readwrite("sml_window", &FusionConfig::sml_window)
      .def_readwrite("use_sml", &FusionConfig::use_sml)
      .def_readwrite("auto_configure", &FusionConfig::auto_configure)
      .def_readwrite("input_gain", &FusionConfig::input_gain)
      .def_readwrite("parallel", &FusionConfig::parallel);

  m.def("continuous_firing_threshold", &continuous_firing_threshold,
        py::arg("params") = NeuronParams{});

  m.def(
      "closed_form",
      [](std::size_t t, double input, const NeuronParams& p) {
        const auto k = constant_drive(p, t);
        return py::make_tuple(closed_form_feeding(t, input, p, k), closed_form_linking(t, p, k),
                              closed_form_threshold(t, p));
      },
      py::arg("t"), py::arg("input"), py::arg("params") = NeuronParams{},
      "(U, V, T) at step t for a neuron firing at every step with saturated neighbours.");

  m.def(
      "single_neuron_trace",
      [](double input, const NeuronParams& p, std::size_t iterations, const std::string& drive) {
        const auto trace = single_neuron_trace(input, p, iterations, parse_neighbor_drive(drive));
        py::array_t<double> state({trace.size(), std::size_t{3}});
        py::array_t<bool> fired(trace.size());
        auto s = state.mutable_unchecked<2>();
        auto f = fired.mutable_unchecked<1>();
        for (std::size_t t = 0; t < trace.size(); ++t) {
          s(t, 0) = trace[t].feeding;
          s(t, 1) = trace[t].linking;
          s(t, 2) = trace[t].threshold;
          f(t) = trace[t].fired;
        }
        return py::make_tuple(state, fired);
      },
      py::arg("input"), py::arg("params") = NeuronParams{}, py::arg("iterations") = 500,
      py::arg("drive") = "saturated");

  m.def(
      "regime",
      [](double input, const NeuronParams& p, std::size_t horizon, const std::string& drive) {
        const auto r = regime_report(input, p, horizon, parse_neighbor_drive(drive));
        py::dict d;
        d["threshold"] = r.threshold;
        d["predicted"] = std::string(to_string(r.regime));
        d["simulated"] = std::string(to_string(r.simulated));
        d["firing_rate"] = r.firing_rate;
        d["consistent"] = r.consistent();
        return d;
      },
      py::arg("input"), py::arg("params") = NeuronParams{}, py::arg("horizon") = 500,
      py::arg("drive") = "saturated");

  m.def(
      "run_lattice",
      [](const DoubleArray& input, const NeuronParams& p, std::size_t iterations) {
        return to_array(run_lattice(FocusMap(to_grid(input)), p, iterations).counts);
      },
      py::arg("input"), py::arg("params") = NeuronParams{}, py::arg("iterations") = 110);

  m.def(
      "auto_configure",
      [](const std::vector<DoubleArray>& maps, const NeuronParams& p) {
        std::vector<FocusMap> fm;
        for (const auto& a : maps) fm.emplace_back(to_grid(a));
        return auto_configure(fm, p).scale;
      },
      py::arg("maps"), py::arg("params") = NeuronParams{});

  m.def(
      "luminance", [](const py::array& img) { return to_array<double>(to_luminance(to_raster(img))); },
      py::arg("image"));

  m.def(
      "sml",
      [](const DoubleArray& img, std::size_t step, std::size_t window) {
        return to_array<double>(sml(gray(img), step, window));
      },
      py::arg("image"), py::arg("step") = 1, py::arg("window") = 3);

  m.def(
      "spike_density",
      [](const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& counts,
         std::size_t radius) {
        if (counts.ndim() != 2) throw py::value_error("expected a 2-D array");
        const auto rows = static_cast<std::size_t>(counts.shape(0));
        const auto cols = static_cast<std::size_t>(counts.shape(1));
        SpikeMatrix sm{Grid<std::uint32_t>(rows, cols, std::vector<std::uint32_t>(
                                                           counts.data(), counts.data() + rows * cols)),
                       0};
        return to_array(spike_density(sm, radius));
      },
      py::arg("counts"), py::arg("radius") = 16);

  m.def(
      "decision_map",
      [](const DoubleArray& fa, const DoubleArray& fb) {
        return to_array(decision_map(to_grid(fa), to_grid(fb)).labels);
      },
      py::arg("density_a"), py::arg("density_b"));

  m.def(
      "fuse",
      [](const std::vector<py::array>& images, const FusionConfig& config) {
        std::vector<Raster> sources;
        for (const auto& a : images) sources.push_back(to_raster(a));
        FusionResult r;
        {
          py::gil_scoped_release release;
          r = run_fusion(sources, config);
        }
        py::dict d;
        d["fused"] = from_raster(r.fused);
        d["decision"] = to_array(r.decision.labels);
        py::list spikes;
        for (const auto& sm : r.spikes) spikes.append(to_array(sm.counts));
        d["spikes"] = spikes;
        d["scale"] = r.scale;
        py::dict timings;
        for (const auto& t : r.timings) timings[py::str(t.stage)] = t.milliseconds;
        d["timings_ms"] = timings;
        return d;
      },
      py::arg("images"), py::arg("config") = FusionConfig{});

  m.def(
      "psnr", [](const DoubleArray& f, const DoubleArray& a, const DoubleArray& b) { return psnr(gray(f), gray(a), gray(b)); },
      py::arg("fused"), py::arg("a"), py::arg("b"));
  m.def(
      "ssim", [](const DoubleArray& f, const DoubleArray& a, const DoubleArray& b) { return ssim(gray(f), gray(a), gray(b)); },
      py::arg("fused"), py::arg("a"), py::arg("b"));
  m.def(
      "qabf", [](const DoubleArray& f, const DoubleArray& a, const DoubleArray& b) { return qabf(gray(f), gray(a), gray(b)); },
      py::arg("fused"), py::arg("a"), py::arg("b"));
}
