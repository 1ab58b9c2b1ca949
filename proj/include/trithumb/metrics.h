#ifndef TRITHUMB_METRICS_H_
#define TRITHUMB_METRICS_H_

#include <cstdint>
#include <vector>

#include "trithumb/model.h"

namespace trithumb {

constexpr double kPsnrCap = 99.0;  // reported for identical images

struct QualityReport {
  double psnr = 0;
  double ssim = 0;
  double mse = 0;
  size_t bytes = 0;
};

// All functions below throw Error(kDimensionMismatch) for rasters of
// different sizes.

// Sum of squared differences over every RGB sample.
int64_t SquaredError(const Raster& a, const Raster& b);
// SquaredError divided by the number of samples (3 per pixel).
double Mse(const Raster& a, const Raster& b);
double PsnrFromMse(double mse);
double Psnr(const Raster& a, const Raster& b);

// BT.601 luma, 0.299 R + 0.587 G + 0.114 B, unrounded.
std::vector<double> Luma(const Raster& image);

// Mean SSIM of the luma planes over all fully contained 11x11 windows,
// Gaussian weighted with sigma 1.5 (truncated at radius 5), K1 = 0.01,
// K2 = 0.03, L = 255 and population variances. Also throws
// Error(kDimensionMismatch) for images smaller than the window.
double Ssim(const Raster& a, const Raster& b);

QualityReport Measure(const Raster& reference, const Raster& decoded,
                      size_t bytes);

}  // namespace trithumb

#endif  // TRITHUMB_METRICS_H_
