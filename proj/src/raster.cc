#include "trithumb/raster.h"

#include <cctype>
#include <cstdlib>
#include <utility>

#include "trithumb/error.h"

namespace trithumb {
namespace {

// num/den rounded half away from zero; den > 0.
int64_t RoundDiv(int64_t num, int64_t den) {
  if (num >= 0) return (2 * num + den) / (2 * den);
  return -((-2 * num + den) / (2 * den));
}

uint8_t Clamp8(int64_t v) { return uint8_t(std::clamp<int64_t>(v, 0, 255)); }

void DrawLine(Raster& raster, PixelPoint a, PixelPoint b, Rgb color) {
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x), dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1, sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x >= 0 && y >= 0 && x < raster.width && y < raster.height) {
      uint8_t* px = raster.At(x, y);
      px[0] = color[0], px[1] = color[1], px[2] = color[2];
    }
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) err += dy, x += sx;
    if (e2 <= dx) err += dx, y += sy;
  }
}

}  // namespace

Rgb ShadePixel(QColor ca, QColor cb, QColor cc, int64_t wa, int64_t wb,
               int64_t wc, int64_t area) {
  const int64_t ny = wa * ca.y + wb * cb.y + wc * cc.y;
  const int64_t nco = wa * ca.co + wb * cb.co + wc * cc.co;
  const int64_t ncg = wa * ca.cg + wb * cb.cg + wc * cc.cg;
  // Dequantized y = 255q/63 and co, cg = 254q/63 - 127, over a common
  // denominator 63 * area.
  const int64_t den = 63 * area;
  const int64_t r = 255 * ny + 254 * (nco - ncg);
  const int64_t g = 255 * ny + 254 * ncg - 127 * den;
  const int64_t b = 255 * ny - 254 * nco - 254 * ncg + 254 * den;
  return {Clamp8(RoundDiv(r, den)), Clamp8(RoundDiv(g, den)),
          Clamp8(RoundDiv(b, den))};
}

Rgb QColorToRgb(QColor q) { return ShadePixel(q, q, q, 1, 0, 0, 1); }

TriangleShader::TriangleShader(QColor ca, QColor cb, QColor cc, int64_t area)
    : den_(63 * area), inv_(1.0 / double(2 * 63 * area)) {
  // Same expansion as ShadePixel with den = 63 (wa + wb + wc) folded into
  // the per-vertex terms.
  const QColor c[3] = {ca, cb, cc};
  for (int v = 0; v < 3; ++v) {
    const int64_t y = c[v].y, co = c[v].co, cg = c[v].cg;
    coef_[0][v] = 255 * y + 254 * (co - cg);
    coef_[1][v] = 255 * y + 254 * cg - 127 * 63;
    coef_[2][v] = 255 * y - 254 * co - 254 * cg + 254 * 63;
  }
}

Raster Render(const TriModel& model) {
  if (auto violation = Validate(model)) {
    Fail(ErrorCode::kContract, "invalid model: " + violation->what);
  }
  return Render(model, Delaunay(model.grid, model.vertices));
}

Raster Render(const TriModel& model, const Triangulation& triangulation) {
  const GridSpec& grid = model.grid;
  Raster out(grid.width(), grid.height());
  for (const Triangle& t : triangulation.triangles) {
    int ia = t[0], ib = t[1], ic = t[2];
    PixelPoint a = grid.ToPixel(ia), b = grid.ToPixel(ib),
               c = grid.ToPixel(ic);
    int64_t area = Orient2d(a, b, c);
    if (area < 0) {
      std::swap(ib, ic);
      std::swap(b, c);
      area = -area;
    }
    Require(area > 0, "degenerate triangle");
    const QColor ca = model.VertexColor(ia), cb = model.VertexColor(ib),
                 cc = model.VertexColor(ic);
    const TriangleShader shade(ca, cb, cc, area);
    RasterizeTriangle(a, b, c, out.width, out.height,
                      [&](int x, int y, int64_t wa, int64_t wb, int64_t wc) {
                        const Rgb rgb = shade(wa, wb, wc);
                        uint8_t* px = out.At(x, y);
                        px[0] = rgb[0], px[1] = rgb[1], px[2] = rgb[2];
                      });
  }
  return out;
}

Raster RenderScaled(const TriModel& model, int scale) {
  Require(scale >= 1, "scale must be positive");
  const int64_t w = int64_t(model.grid.width()) * scale;
  const int64_t h = int64_t(model.grid.height()) * scale;
  Require(w <= kMaxDimension && h <= kMaxDimension, "scaled size too large");
  TriModel scaled = model;
  scaled.grid = model.grid.Rescaled(int(w), int(h));
  return Render(scaled);
}

void DrawWireframe(const TriModel& model, Raster& base, Rgb color) {
  Require(base.width == model.grid.width() &&
              base.height == model.grid.height(),
          "raster does not match model size");
  const Triangulation tri = Delaunay(model.grid, model.vertices);
  for (const Triangle& t : tri.triangles) {
    for (int k = 0; k < 3; ++k) {
      DrawLine(base, model.grid.ToPixel(t[k]), model.grid.ToPixel(t[(k + 1) % 3]),
               color);
    }
  }
}

std::string EncodePpm(const Raster& raster) {
  std::string out = "P6\n" + std::to_string(raster.width) + " " +
                    std::to_string(raster.height) + "\n255\n";
  out.append(raster.rgb.begin(), raster.rgb.end());
  return out;
}

Raster DecodePpm(const std::string& bytes) {
  size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    int64_t v = 0;
    const size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos])) &&
           v < 100000) {
      v = v * 10 + (bytes[pos++] - '0');
    }
    if (pos == start) Fail(ErrorCode::kIo, "malformed PPM header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    Fail(ErrorCode::kIo, "not a binary PPM");
  }
  pos = 2;
  const int64_t w = read_int(), h = read_int(), maxval = read_int();
  if (w < 1 || h < 1 || w > 65535 || h > 65535 || maxval != 255) {
    Fail(ErrorCode::kIo, "unsupported PPM dimensions or depth");
  }
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    Fail(ErrorCode::kIo, "malformed PPM header");
  }
  ++pos;
  const size_t need = size_t(w) * size_t(h) * 3;
  if (bytes.size() - pos < need) Fail(ErrorCode::kIo, "truncated PPM data");
  Raster out{int(w), int(h)};
  std::copy(bytes.begin() + pos, bytes.begin() + pos + need, out.rgb.begin());
  return out;
}

}  // namespace trithumb
