#pragma once

#include <string>
#include <vector>

#include "ndcnp/image.hpp"

namespace ndcnp {

/// Constants shared by every report so numbers stay comparable across runs.
struct MetricConstants {
  static constexpr double kPsnrCapDb = 120.0;
  static constexpr int kSsimWindow = 11;
  static constexpr double kSsimSigma = 1.5;
  static constexpr double kSsimK1 = 0.01;
  static constexpr double kSsimK2 = 0.03;
  // Gradient-preservation sigmoids (strength g, orientation a).
  static constexpr double kQabfKappaG = -15.0;
  static constexpr double kQabfSigmaG = 0.5;
  static constexpr double kQabfKappaA = -22.0;
  static constexpr double kQabfSigmaA = 0.8;
  static constexpr double kQabfEdgeExponent = 1.0;
};

/// Mean of PSNR(fused, A) and PSNR(fused, B) with unit peak; each term is
/// capped at 120 dB.
double psnr(const GrayImage& fused, const GrayImage& a, const GrayImage& b);
double psnr(const GrayImage& x, const GrayImage& y);

/// Mean of SSIM(fused, A) and SSIM(fused, B). Gaussian 11x11 window
/// (sigma 1.5) evaluated over valid positions only.
double ssim(const GrayImage& fused, const GrayImage& a, const GrayImage& b);
double ssim(const GrayImage& x, const GrayImage& y);

/// Edge-preservation score in [0,1]. Sobel gradients with replicated borders;
/// the sigmoid gains are normalised so perfect preservation scores exactly 1.
/// Sources without any edges score 1.
double qabf(const GrayImage& fused, const GrayImage& a, const GrayImage& b);

struct MetricRow {
  std::string image_id;
  double qabf = 0.0;
  double ssim = 0.0;
  double psnr = 0.0;
};

MetricRow evaluate(std::string image_id, const GrayImage& fused, const GrayImage& a,
                   const GrayImage& b);

struct MetricReport {
  std::vector<MetricRow> rows;

  MetricRow mean() const;
  /// image_id,qabf,ssim,psnr with a final `mean` row.
  std::string to_csv() const;
  std::string to_json() const;
};

}  // namespace ndcnp
