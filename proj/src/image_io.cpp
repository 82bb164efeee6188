#include "ndcnp/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace ndcnp {

Raster load_raster(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
  if (m.empty()) throw ImageIoError("cannot read image '" + path.string() + "'");
  double max_value = 0.0;
  switch (m.depth()) {
    case CV_8U: max_value = 255.0; break;
    case CV_16U: max_value = 65535.0; break;
    case CV_32F:
    case CV_64F: max_value = 1.0; break;
    default: throw ImageIoError("unsupported sample type in '" + path.string() + "'");
  }
  const int ch = m.channels();
  if (ch != 1 && ch != 3 && ch != 4) {
    throw ImageIoError("unsupported channel count in '" + path.string() + "'");
  }
  cv::Mat md;
  m.convertTo(md, CV_MAKETYPE(CV_64F, ch));
  const std::size_t out_ch = ch == 1 ? 1 : 3;
  Raster r(static_cast<std::size_t>(m.rows), static_cast<std::size_t>(m.cols), out_ch, max_value);
  for (int i = 0; i < md.rows; ++i) {
    const double* row = md.ptr<double>(i);
    for (int j = 0; j < md.cols; ++j) {
      const double* px = row + static_cast<std::ptrdiff_t>(j) * ch;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (out_ch == 1) {
        r.at(ui, uj, 0) = px[0];
      } else {
        // OpenCV stores BGR(A).
        r.at(ui, uj, 0) = px[2];
        r.at(ui, uj, 1) = px[1];
        r.at(ui, uj, 2) = px[0];
      }
    }
  }
  return r;
}

void save_png(const Raster& image, const std::filesystem::path& path) {
  const bool wide = image.max_value > 255.0;
  const int depth = wide ? CV_16U : CV_8U;
  const double gain = image.max_value == 1.0 ? 255.0 : 1.0;
  const int ch = static_cast<int>(image.channels);
  if (ch != 1 && ch != 3) throw ImageIoError("save_png: only 1 or 3 channels supported");
  cv::Mat m(static_cast<int>(image.rows), static_cast<int>(image.cols), CV_MAKETYPE(CV_64F, ch));
  for (std::size_t i = 0; i < image.rows; ++i) {
    double* row = m.ptr<double>(static_cast<int>(i));
    for (std::size_t j = 0; j < image.cols; ++j) {
      double* px = row + j * image.channels;
      if (ch == 1) {
        px[0] = image.at(i, j, 0) * gain;
      } else {
        px[0] = image.at(i, j, 2) * gain;
        px[1] = image.at(i, j, 1) * gain;
        px[2] = image.at(i, j, 0) * gain;
      }
    }
  }
  cv::Mat out;
  m.convertTo(out, CV_MAKETYPE(depth, ch));
  if (!cv::imwrite(path.string(), out)) {
    throw ImageIoError("cannot write '" + path.string() + "'");
  }
}

void save_decision_map(const DecisionMap& dm, const std::filesystem::path& path) {
  Raster r(dm.labels.rows(), dm.labels.cols(), 1, 255.0);
  const double step = dm.is_pair() ? 255.0 : 255.0 / static_cast<double>(dm.sources - 1);
  for (std::size_t n = 0; n < dm.labels.size(); ++n) {
    r.samples[n] = std::round(dm.labels.values()[n] * step);
  }
  save_png(r, path);
}

DecisionMap load_decision_map(const std::filesystem::path& path, std::size_t sources) {
  if (sources < 2) throw std::invalid_argument("load_decision_map: need >= 2 sources");
  const Raster r = load_raster(path);
  if (r.channels != 1) throw ImageIoError("decision map must be single-channel");
  DecisionMap dm{Grid<std::uint8_t>(r.rows, r.cols), sources};
  const double step = sources == 2 ? 255.0 : 255.0 / static_cast<double>(sources - 1);
  for (std::size_t n = 0; n < dm.labels.size(); ++n) {
    const double label = std::round(r.samples[n] / step);
    dm.labels.values()[n] =
        static_cast<std::uint8_t>(std::clamp(label, 0.0, static_cast<double>(sources - 1)));
  }
  return dm;
}

void save_spike_matrix(const SpikeMatrix& spikes, const std::filesystem::path& path) {
  const auto& c = spikes.counts;
  cv::Mat m(static_cast<int>(c.rows()), static_cast<int>(c.cols()), CV_16UC1);
  const std::uint32_t cap = static_cast<std::uint32_t>(
      std::min<std::size_t>(spikes.total_steps, 65535));
  for (std::size_t i = 0; i < c.rows(); ++i) {
    auto* row = m.ptr<std::uint16_t>(static_cast<int>(i));
    for (std::size_t j = 0; j < c.cols(); ++j) {
      row[j] = static_cast<std::uint16_t>(std::min(c(i, j), cap));
    }
  }
  if (!cv::imwrite(path.string(), m)) throw ImageIoError("cannot write '" + path.string() + "'");
}

SynapticKernel load_kernel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ImageIoError("cannot read kernel file '" + path.string() + "'");
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::size_t n = 0;
    double w = 0.0;
    while (ss >> w) {
      values.push_back(w);
      ++n;
    }
    if (!ss.eof()) throw std::invalid_argument("kernel file: malformed number in '" + line + "'");
    if (rows == 0) cols = n;
    if (n != cols) throw std::invalid_argument("kernel file: ragged rows");
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument("kernel file: no weights");
  return SynapticKernel(Grid<double>(rows, cols, std::move(values)));
}

}  // namespace ndcnp
