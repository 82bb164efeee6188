#include "ndcnp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace ndcnp {

namespace {

using C = MetricConstants;

void check_pair(const GrayImage& x, const GrayImage& y, const char* what) {
  require_same_shape(x, y, what);
  if (x.empty()) throw std::invalid_argument(std::string(what) + ": empty image");
}

std::vector<double> gaussian_window() {
  std::vector<double> w(C::kSsimWindow);
  const int half = C::kSsimWindow / 2;
  double total = 0.0;
  for (int k = 0; k < C::kSsimWindow; ++k) {
    const double d = k - half;
    w[k] = std::exp(-d * d / (2.0 * C::kSsimSigma * C::kSsimSigma));
    total += w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

// Separable 'valid' correlation with the SSIM window.
Grid<double> filter_valid(const Grid<double>& in, const std::vector<double>& w) {
  const std::size_t n = w.size();
  const std::size_t rows = in.rows() - n + 1;
  const std::size_t cols = in.cols() - n + 1;
  Grid<double> horiz(in.rows(), cols);
  for (std::size_t i = 0; i < in.rows(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += w[k] * in(i, j + k);
      horiz(i, j) = acc;
    }
  }
  Grid<double> out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += w[k] * horiz(i + k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Grid<double> product(const Grid<double>& x, const Grid<double>& y) {
  Grid<double> out(x.rows(), x.cols());
  for (std::size_t n = 0; n < out.size(); ++n) out.values()[n] = x.values()[n] * y.values()[n];
  return out;
}

struct Gradients {
  Grid<double> strength;
  Grid<double> orientation;
};

Gradients sobel(const GrayImage& img) {
  const std::size_t rows = img.rows();
  const std::size_t cols = img.cols();
  Gradients g{Grid<double>(rows, cols), Grid<double>(rows, cols)};
  auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(rows) - 1);
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(cols) - 1);
    return img(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  for (std::size_t ui = 0; ui < rows; ++ui) {
    for (std::size_t uj = 0; uj < cols; ++uj) {
      const auto i = static_cast<std::ptrdiff_t>(ui);
      const auto j = static_cast<std::ptrdiff_t>(uj);
      const double gx = (at(i - 1, j + 1) + 2.0 * at(i, j + 1) + at(i + 1, j + 1)) -
                        (at(i - 1, j - 1) + 2.0 * at(i, j - 1) + at(i + 1, j - 1));
      const double gy = (at(i + 1, j - 1) + 2.0 * at(i + 1, j) + at(i + 1, j + 1)) -
                        (at(i - 1, j - 1) + 2.0 * at(i - 1, j) + at(i - 1, j + 1));
      g.strength(ui, uj) = std::sqrt(gx * gx + gy * gy);
      if (gx == 0.0) {
        g.orientation(ui, uj) = gy == 0.0 ? 0.0 : std::copysign(std::numbers::pi / 2.0, gy);
      } else {
        g.orientation(ui, uj) = std::atan(gy / gx);
      }
    }
  }
  return g;
}

double sigmoid(double x, double kappa, double sigma) {
  return 1.0 / (1.0 + std::exp(kappa * (x - sigma)));
}

// Per-pixel preservation of source edges in the fused image.
double preservation(double g_src, double a_src, double g_fused, double a_fused) {
  double rel_strength = 1.0;
  if (g_src > g_fused) {
    rel_strength = g_fused / g_src;
  } else if (g_fused > g_src) {
    rel_strength = g_src / g_fused;
  }
  const double rel_orientation = 1.0 - std::abs(a_src - a_fused) / (std::numbers::pi / 2.0);
  const double gain_g = 1.0 / sigmoid(1.0, C::kQabfKappaG, C::kQabfSigmaG);
  const double gain_a = 1.0 / sigmoid(1.0, C::kQabfKappaA, C::kQabfSigmaA);
  return gain_g * sigmoid(rel_strength, C::kQabfKappaG, C::kQabfSigmaG) * gain_a *
         sigmoid(rel_orientation, C::kQabfKappaA, C::kQabfSigmaA);
}

}  // namespace

double psnr(const GrayImage& x, const GrayImage& y) {
  check_pair(x, y, "psnr");
  double sq = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double d = x.values()[n] - y.values()[n];
    sq += d * d;
  }
  const double mse = sq / static_cast<double>(x.size());
  if (mse == 0.0) return C::kPsnrCapDb;
  return std::min(C::kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

double psnr(const GrayImage& fused, const GrayImage& a, const GrayImage& b) {
  return 0.5 * (psnr(fused, a) + psnr(fused, b));
}

double ssim(const GrayImage& x, const GrayImage& y) {
  check_pair(x, y, "ssim");
  if (x.rows() < static_cast<std::size_t>(C::kSsimWindow) ||
      x.cols() < static_cast<std::size_t>(C::kSsimWindow)) {
    throw std::invalid_argument("ssim: images must be at least 11x11");
  }
  const auto w = gaussian_window();
  const double c1 = (C::kSsimK1) * (C::kSsimK1);
  const double c2 = (C::kSsimK2) * (C::kSsimK2);
  const Grid<double> mu_x = filter_valid(x, w);
  const Grid<double> mu_y = filter_valid(y, w);
  const Grid<double> xx = filter_valid(product(x, x), w);
  const Grid<double> yy = filter_valid(product(y, y), w);
  const Grid<double> xy = filter_valid(product(x, y), w);
  double total = 0.0;
  for (std::size_t n = 0; n < mu_x.size(); ++n) {
    const double mx = mu_x.values()[n];
    const double my = mu_y.values()[n];
    const double vx = xx.values()[n] - mx * mx;
    const double vy = yy.values()[n] - my * my;
    const double cov = xy.values()[n] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return std::clamp(total / static_cast<double>(mu_x.size()), -1.0, 1.0);
}

double ssim(const GrayImage& fused, const GrayImage& a, const GrayImage& b) {
  return 0.5 * (ssim(fused, a) + ssim(fused, b));
}

double qabf(const GrayImage& fused, const GrayImage& a, const GrayImage& b) {
  check_pair(fused, a, "qabf");
  check_pair(fused, b, "qabf");
  const Gradients gf = sobel(fused);
  const Gradients ga = sobel(a);
  const Gradients gb = sobel(b);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < fused.size(); ++n) {
    const double wa = std::pow(ga.strength.values()[n], C::kQabfEdgeExponent);
    const double wb = std::pow(gb.strength.values()[n], C::kQabfEdgeExponent);
    const double qa = preservation(ga.strength.values()[n], ga.orientation.values()[n],
                                   gf.strength.values()[n], gf.orientation.values()[n]);
    const double qb = preservation(gb.strength.values()[n], gb.orientation.values()[n],
                                   gf.strength.values()[n], gf.orientation.values()[n]);
    num += qa * wa + qb * wb;
    den += wa + wb;
  }
  if (den == 0.0) return 1.0;
  return std::clamp(num / den, 0.0, 1.0);
}

MetricRow evaluate(std::string image_id, const GrayImage& fused, const GrayImage& a,
                   const GrayImage& b) {
  return {std::move(image_id), qabf(fused, a, b), ssim(fused, a, b), psnr(fused, a, b)};
}

MetricRow MetricReport::mean() const {
  MetricRow m{"mean"};
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    m.qabf += r.qabf;
    m.ssim += r.ssim;
    m.psnr += r.psnr;
  }
  const auto n = static_cast<double>(rows.size());
  m.qabf /= n;
  m.ssim /= n;
  m.psnr /= n;
  return m;
}

std::string MetricReport::to_csv() const {
  std::string out = "image_id,qabf,ssim,psnr\n";
  char buf[128];
  auto emit = [&](const MetricRow& r) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.4f\n", r.qabf, r.ssim, r.psnr);
    out += r.image_id;
    out += buf;
  };
  for (const auto& r : rows) emit(r);
  emit(mean());
  return out;
}

std::string MetricReport::to_json() const {
  using nlohmann::json;
  json j;
  j["constants"] = {
      {"psnr_peak", 1.0},
      {"psnr_cap_db", C::kPsnrCapDb},
      {"ssim_window", C::kSsimWindow},
      {"ssim_sigma", C::kSsimSigma},
      {"ssim_k1", C::kSsimK1},
      {"ssim_k2", C::kSsimK2},
      {"qabf_kappa_g", C::kQabfKappaG},
      {"qabf_sigma_g", C::kQabfSigmaG},
      {"qabf_kappa_a", C::kQabfKappaA},
      {"qabf_sigma_a", C::kQabfSigmaA},
      {"qabf_edge_exponent", C::kQabfEdgeExponent},
      {"reference", "mean of the two source-referenced scores, luminance only"},
  };
  json images = json::array();
  for (const auto& r : rows) {
    images.push_back({{"image_id", r.image_id}, {"qabf", r.qabf}, {"ssim", r.ssim}, {"psnr", r.psnr}});
  }
  j["images"] = images;
  const MetricRow m = mean();
  j["mean"] = {{"qabf", m.qabf}, {"ssim", m.ssim}, {"psnr", m.psnr}, {"count", rows.size()}};
  return j.dump(2);
}

}  // namespace ndcnp
