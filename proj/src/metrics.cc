#include "trithumb/metrics.h"

#include <array>
#include <cmath>

#include "trithumb/error.h"

namespace trithumb {
namespace {

constexpr int kRadius = 5;
constexpr int kWindow = 2 * kRadius + 1;

void CheckSameSize(const Raster& a, const Raster& b) {
  if (a.width != b.width || a.height != b.height) {
    Fail(ErrorCode::kDimensionMismatch, "images differ in size");
  }
}

std::array<double, kWindow> GaussianKernel() {
  std::array<double, kWindow> k;
  double sum = 0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kRadius;
    k[i] = std::exp(-0.5 * d * d / (1.5 * 1.5));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable filter keeping only positions where the window fits.
std::vector<double> FilterValid(const std::vector<double>& in, int w, int h) {
  static const std::array<double, kWindow> k = GaussianKernel();
  const int ow = w - 2 * kRadius, oh = h - 2 * kRadius;
  std::vector<double> rows(size_t(ow) * h);
  for (int y = 0; y < h; ++y) {
    const double* src = &in[size_t(y) * w];
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * src[x + i];
      rows[size_t(y) * ow + x] = s;
    }
  }
  std::vector<double> out(size_t(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * rows[size_t(y + i) * ow + x];
      out[size_t(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

int64_t SquaredError(const Raster& a, const Raster& b) {
  CheckSameSize(a, b);
  int64_t sse = 0;
  for (size_t i = 0; i < a.rgb.size(); ++i) {
    const int d = int(a.rgb[i]) - int(b.rgb[i]);
    sse += d * d;
  }
  return sse;
}

double Mse(const Raster& a, const Raster& b) {
  const int64_t sse = SquaredError(a, b);
  return a.rgb.empty() ? 0.0 : double(sse) / double(a.rgb.size());
}

double PsnrFromMse(double mse) {
  if (mse <= 0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double Psnr(const Raster& a, const Raster& b) { return PsnrFromMse(Mse(a, b)); }

std::vector<double> Luma(const Raster& image) {
  std::vector<double> y(size_t(image.width) * image.height);
  for (size_t i = 0; i < y.size(); ++i) {
    const uint8_t* p = &image.rgb[3 * i];
    y[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return y;
}

double Ssim(const Raster& a, const Raster& b) {
  CheckSameSize(a, b);
  const int w = a.width, h = a.height;
  if (w < kWindow || h < kWindow) {
    Fail(ErrorCode::kDimensionMismatch, "image smaller than the SSIM window");
  }
  const std::vector<double> x = Luma(a), y = Luma(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto ux = FilterValid(x, w, h), uy = FilterValid(y, w, h);
  const auto uxx = FilterValid(xx, w, h), uyy = FilterValid(yy, w, h);
  const auto uxy = FilterValid(xy, w, h);
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);
  double total = 0;
  for (size_t i = 0; i < ux.size(); ++i) {
    const double vx = uxx[i] - ux[i] * ux[i];
    const double vy = uyy[i] - uy[i] * uy[i];
    const double vxy = uxy[i] - ux[i] * uy[i];
    total += (2 * ux[i] * uy[i] + c1) * (2 * vxy + c2) /
             ((ux[i] * ux[i] + uy[i] * uy[i] + c1) * (vx + vy + c2));
  }
  return total / double(ux.size());
}

QualityReport Measure(const Raster& reference, const Raster& decoded,
                      size_t bytes) {
  QualityReport r;
  r.mse = Mse(reference, decoded);
  r.psnr = PsnrFromMse(r.mse);
  r.ssim = Ssim(reference, decoded);
  r.bytes = bytes;
  return r;
}

}  // namespace trithumb
