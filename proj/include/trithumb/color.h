#ifndef TRITHUMB_COLOR_H_
#define TRITHUMB_COLOR_H_

#include <array>
#include <cstdint>

#include "trithumb/model.h"

namespace trithumb {

// Real-valued YCoCg. Y in [0, 255]; Co, Cg in [-127.5, 127.5] for colors
// that come from 8-bit RGB.
struct YCoCgF {
  double y = 0;
  double co = 0;
  double cg = 0;
};

using Rgb = std::array<uint8_t, 3>;

// Y = r/4 + g/2 + b/4, Co = (r - b)/2, Cg = -r/4 + g/2 - b/4.
YCoCgF RgbToYCoCg(int r, int g, int b);

// Inverse transform, rounded half away from zero and clamped to 0..255.
Rgb YCoCgToRgb(const YCoCgF& c);

// 6-bit quantization. Y -> round(Y*63/255); Co, Cg ->
// round((C/2 + 63.5)*63/127). Results are clamped to 0..63.
QColor Quantize(const YCoCgF& c);
YCoCgF Dequantize(QColor q);

// Squared Euclidean distance in dequantized YCoCg.
inline double DistanceSquared(const YCoCgF& a, const YCoCgF& b) {
  const double dy = a.y - b.y, dco = a.co - b.co, dcg = a.cg - b.cg;
  return dy * dy + dco * dco + dcg * dcg;
}

}  // namespace trithumb

#endif  // TRITHUMB_COLOR_H_
