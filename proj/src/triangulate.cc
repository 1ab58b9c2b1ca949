#include "trithumb/triangulate.h"

#include <algorithm>
#include <numeric>

#include "trithumb/error.h"
#include "trithumb/mesh.h"

namespace trithumb {

__int128 InCircleDet(PixelPoint a, PixelPoint b, PixelPoint c, PixelPoint d) {
  const int64_t adx = a.x - d.x, ady = a.y - d.y;
  const int64_t bdx = b.x - d.x, bdy = b.y - d.y;
  const int64_t cdx = c.x - d.x, cdy = c.y - d.y;
  const __int128 alift = adx * adx + ady * ady;
  const __int128 blift = bdx * bdx + bdy * bdy;
  const __int128 clift = cdx * cdx + cdy * cdy;
  return adx * (bdy * clift - cdy * blift) - ady * (bdx * clift - cdx * blift) +
         alift * (__int128(bdx) * cdy - __int128(cdx) * bdy);
}

bool InCircumcircle(PixelPoint a, int rank_a, PixelPoint b, int rank_b,
                    PixelPoint c, int rank_c, PixelPoint d, int rank_d) {
  const __int128 det = InCircleDet(a, b, c, d);
  if (det != 0) return det > 0;
  // Cocircular. The lowest-ranked of the four points decides: if it is d, d
  // sinks below the circle's plane and is inside. Otherwise d is inside iff
  // it and the lowest-ranked vertex lie on opposite sides of the line
  // through the two remaining triangle vertices.
  const int lowest = std::min({rank_a, rank_b, rank_c, rank_d});
  if (lowest == rank_d) return true;
  PixelPoint m, e1, e2;
  if (lowest == rank_a) {
    m = a, e1 = b, e2 = c;
  } else if (lowest == rank_b) {
    m = b, e1 = c, e2 = a;
  } else {
    m = c, e1 = a, e2 = b;
  }
  const int64_t side_d = Orient2d(e1, e2, d);
  const int64_t side_m = Orient2d(e1, e2, m);
  return (side_d > 0 && side_m < 0) || (side_d < 0 && side_m > 0);
}

Triangulation Delaunay(const GridSpec& grid, const VertexSet& vertices) {
  const int n = grid.NumPoints();
  Require(int(vertices.occupied.size()) == n, "vertex set does not match grid");
  std::vector<PixelPoint> positions(n);
  std::vector<int> ids;
  for (int p = 0; p < n; ++p) {
    positions[p] = grid.ToPixel(p);
    if (vertices.occupied[p]) ids.push_back(p);
  }
  if (ids.size() < 3) {
    Fail(ErrorCode::kDegenerateGeometry, "fewer than three vertices");
  }
  DelaunayMesh mesh(std::move(positions));
  mesh.Build(ids);
  return mesh.Triangles();
}

Triangulation DelaunayPoints(std::span<const PixelPoint> points) {
  if (points.size() < 3) {
    Fail(ErrorCode::kDegenerateGeometry, "fewer than three points");
  }
  std::vector<int> ids(points.size());
  std::iota(ids.begin(), ids.end(), 0);
  DelaunayMesh mesh(std::vector<PixelPoint>(points.begin(), points.end()));
  mesh.Build(ids);
  return mesh.Triangles();
}

}  // namespace trithumb
