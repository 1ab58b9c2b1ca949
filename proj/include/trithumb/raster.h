#ifndef TRITHUMB_RASTER_H_
#define TRITHUMB_RASTER_H_

// Triangle fill and model rendering.
//
// Pixel centers sit at integer coordinates. A pixel belongs to a triangle if
// its center, nudged by an infinitesimal offset, lies inside. Interior pixels
// are nudged right, then down, which is the usual top-left convention. Pixels
// on the image border are first nudged toward the image center so that the
// right and bottom borders are covered as well. Since the union of all
// triangles is the full image rectangle, every pixel has exactly one owner.
//
// Colors are interpolated linearly in dequantized YCoCg with exact integer
// barycentric weights and converted to RGB with a single rounding.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include "trithumb/color.h"
#include "trithumb/model.h"
#include "trithumb/triangulate.h"

namespace trithumb {

namespace raster_internal {

// Sign of the edge function's derivative along the nudge directions, used
// when a pixel center lies exactly on the edge line.
inline bool OwnsOnEdge(int64_t gx, int64_t gy, int x, int y, int width,
                       int height) {
  if (x == 0 || y == 0 || x == width - 1 || y == height - 1) {
    const int64_t t = gx * (width - 1 - 2 * x) + gy * (height - 1 - 2 * y);
    if (t != 0) return t > 0;
  }
  if (gx != 0) return gx > 0;
  return gy > 0;
}

}  // namespace raster_internal

// Calls visit(x, y, wa, wb, wc) for every pixel owned by triangle (a, b, c),
// which must satisfy Orient2d(a, b, c) > 0. The weights are the exact edge
// functions; they are non-negative and sum to Orient2d(a, b, c). Pixels
// outside [0, width) x [0, height) are skipped.
template <typename Visit>
void RasterizeTriangle(PixelPoint a, PixelPoint b, PixelPoint c, int width,
                       int height, Visit&& visit) {
  using raster_internal::OwnsOnEdge;
  const int x0 = std::max(0, std::min({a.x, b.x, c.x}));
  const int x1 = std::min(width - 1, std::max({a.x, b.x, c.x}));
  const int y0 = std::max(0, std::min({a.y, b.y, c.y}));
  const int y1 = std::min(height - 1, std::max({a.y, b.y, c.y}));
  // Edge function of the edge opposite each vertex; its gradient with
  // respect to the sample point is (-(qy - py), qx - px) for edge p->q.
  const PixelPoint p[3] = {b, c, a};
  const PixelPoint q[3] = {c, a, b};
  int64_t gx[3], gy[3];
  for (int k = 0; k < 3; ++k) {
    gx[k] = -int64_t(q[k].y - p[k].y);
    gy[k] = int64_t(q[k].x - p[k].x);
  }
  for (int y = y0; y <= y1; ++y) {
    int64_t w[3];
    for (int k = 0; k < 3; ++k) w[k] = Orient2d(p[k], q[k], {x0, y});
    for (int x = x0; x <= x1; ++x) {
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k) {
        if (w[k] < 0 ||
            (w[k] == 0 && !OwnsOnEdge(gx[k], gy[k], x, y, width, height))) {
          inside = false;
        }
      }
      if (inside) visit(x, y, w[0], w[1], w[2]);
      for (int k = 0; k < 3; ++k) w[k] += gx[k];
    }
  }
}

// RGB of a quantized color, exact.
Rgb QColorToRgb(QColor q);

// Interpolates three quantized colors with integer weights summing to
// `area` > 0 and converts to RGB.
Rgb ShadePixel(QColor ca, QColor cb, QColor cc, int64_t wa, int64_t wb,
               int64_t wc, int64_t area);

// ShadePixel with the per-triangle work done once. Gives identical results:
// channel numerators are exact integers and the final division goes through
// a reciprocal whose error is far below the distance of any non-integer
// quotient from the next integer.
class TriangleShader {
 public:
  TriangleShader(QColor ca, QColor cb, QColor cc, int64_t area);

  Rgb operator()(int64_t wa, int64_t wb, int64_t wc) const {
    Rgb out;
    for (int k = 0; k < 3; ++k) {
      const int64_t num = wa * coef_[k][0] + wb * coef_[k][1] + wc * coef_[k][2];
      if (num <= 0) {
        out[k] = 0;
        continue;
      }
      const double q = double(2 * num + den_) * inv_ + 0x1.0p-38;
      out[k] = q >= 255.0 ? 255 : uint8_t(q);
    }
    return out;
  }

 private:
  int64_t coef_[3][3];  // [channel][vertex], numerators over den_
  int64_t den_;
  double inv_;  // 1 / (2 den_)
};

// Renders a valid model at its grid's pixel size. Throws Error(kContract)
// for invalid models.
Raster Render(const TriModel& model);

// Renders with a precomputed triangulation of the model's vertices.
Raster Render(const TriModel& model, const Triangulation& triangulation);

// Same model drawn at `scale` times the native size. Vertices move to the
// lattice positions of the enlarged rectangle.
Raster RenderScaled(const TriModel& model, int scale);

// Draws triangle edges over `base` in the given color (Bresenham).
void DrawWireframe(const TriModel& model, Raster& base, Rgb color);

// Binary PPM (P6) with maxval 255.
std::string EncodePpm(const Raster& raster);
// Throws Error(kIo) for malformed input.
Raster DecodePpm(const std::string& bytes);

}  // namespace trithumb

#endif  // TRITHUMB_RASTER_H_
