#ifndef TRITHUMB_SRC_SEARCH_INTERNAL_H_
#define TRITHUMB_SRC_SEARCH_INTERNAL_H_

#include <cstdint>
#include <vector>

#include "trithumb/color.h"
#include "trithumb/mesh.h"
#include "trithumb/model.h"
#include "trithumb/raster.h"

namespace trithumb::search_internal {

inline int32_t PixelError(const uint8_t* a, const uint8_t* b) {
  int32_t e = 0;
  for (int c = 0; c < 3; ++c) {
    const int32_t d = int32_t(a[c]) - int32_t(b[c]);
    e += d * d;
  }
  return e;
}

// Mesh over all lattice points of a grid, with the given vertices inserted.
DelaunayMesh MeshFor(const GridSpec& grid, const std::vector<uint8_t>& occupied);

// Calls visit(pixel index, rgb) for every pixel owned by the solid triangle
// with vertex ids v, colored by color_of(id).
template <typename ColorOf, typename Visit>
void ShadeTriangle(const DelaunayMesh& mesh, const std::array<int, 3>& v,
                   int width, int height, ColorOf&& color_of, Visit&& visit) {
  const PixelPoint a = mesh.Position(v[0]), b = mesh.Position(v[1]),
                   c = mesh.Position(v[2]);
  const int64_t area = Orient2d(a, b, c);
  const TriangleShader shade(color_of(v[0]), color_of(v[1]), color_of(v[2]),
                             area);
  RasterizeTriangle(a, b, c, width, height,
                    [&](int x, int y, int64_t wa, int64_t wb, int64_t wc) {
                      visit(y * width + x, shade(wa, wb, wc));
                    });
}

// Change in squared error over the pixels of the triangles a mesh change
// removes, when they are repainted with the triangles it adds.
template <typename ColorOf>
int64_t ChangeDelta(const DelaunayMesh& mesh, const DelaunayMesh::Change& change,
                    const Raster& target, const std::vector<int32_t>& err,
                    ColorOf&& color_of) {
  int64_t delta = 0;
  for (const auto& v : change.added) {
    if (v[2] == DelaunayMesh::kGhost) continue;
    ShadeTriangle(mesh, v, target.width, target.height, color_of,
                  [&](int p, const Rgb& rgb) {
                    delta += PixelError(rgb.data(), &target.rgb[3 * size_t(p)]) -
                             err[size_t(p)];
                  });
  }
  return delta;
}

// Color a vertex at each lattice point should take: the mean target color
// over a box reaching half the lattice spacing around the point. Single
// pixels are too noisy to stand for the area a vertex influences.
std::vector<YCoCgF> VertexTargets(const Raster& target, const GridSpec& grid);

// Index of the palette entry closest to c; ties go to the lower index.
int NearestEntry(const ColorTable& table, const YCoCgF& c);

// Agglomerative clustering: repeatedly merges the two closest clusters (by
// Euclidean distance between means, ties to the lowest index pair) into
// their weighted mean until at most k remain.
std::vector<QColor> ClusterColors(const std::vector<YCoCgF>& colors, int k);

}  // namespace trithumb::search_internal

#endif  // TRITHUMB_SRC_SEARCH_INTERNAL_H_
