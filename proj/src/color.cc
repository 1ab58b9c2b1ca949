#include "trithumb/color.h"

#include <algorithm>
#include <cmath>

namespace trithumb {
namespace {

uint8_t ClampRound(double v) {
  const double r = std::round(v);
  return uint8_t(std::clamp(r, 0.0, 255.0));
}

uint8_t QuantizeLevel(double v) {
  return uint8_t(std::clamp(std::round(v), 0.0, double(kChannelLevels - 1)));
}

}  // namespace

YCoCgF RgbToYCoCg(int r, int g, int b) {
  return {r * 0.25 + g * 0.5 + b * 0.25, (r - b) * 0.5,
          -r * 0.25 + g * 0.5 - b * 0.25};
}

Rgb YCoCgToRgb(const YCoCgF& c) {
  const double tmp = c.y - c.cg;
  return {ClampRound(tmp + c.co), ClampRound(c.y + c.cg),
          ClampRound(tmp - c.co)};
}

QColor Quantize(const YCoCgF& c) {
  return {QuantizeLevel(c.y * 63.0 / 255.0),
          QuantizeLevel((c.co * 0.5 + 63.5) * 63.0 / 127.0),
          QuantizeLevel((c.cg * 0.5 + 63.5) * 63.0 / 127.0)};
}

YCoCgF Dequantize(QColor q) {
  return {q.y * 255.0 / 63.0, q.co * 254.0 / 63.0 - 127.0,
          q.cg * 254.0 / 63.0 - 127.0};
}

}  // namespace trithumb
