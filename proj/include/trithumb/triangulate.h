#ifndef TRITHUMB_TRIANGULATE_H_
#define TRITHUMB_TRIANGULATE_H_

// Canonical Delaunay triangulation.
//
// Lattice points produce cocircular quadruples everywhere, so "the" Delaunay
// triangulation is only defined once ties are broken. Every point carries a
// rank (its row-major lattice index); its lifted height x^2 + y^2 is lowered
// by eps^(rank+1) for an infinitesimal eps. The lifted set is then in general
// position and its lower hull projects to a unique triangulation. Among
// cocircular configurations the diagonal incident to the lowest-ranked point
// wins. All predicates are exact integer arithmetic.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trithumb/model.h"

namespace trithumb {

// Vertex ids, ascending.
using Triangle = std::array<int, 3>;

struct Triangulation {
  std::vector<Triangle> triangles;  // lexicographically sorted
  bool operator==(const Triangulation&) const = default;
};

// Twice the signed area of (a, b, c); positive when c lies to the left of
// a->b in a y-up frame.
inline int64_t Orient2d(PixelPoint a, PixelPoint b, PixelPoint c) {
  return int64_t(b.x - a.x) * (c.y - a.y) - int64_t(b.y - a.y) * (c.x - a.x);
}

// Positive when d lies strictly inside the circumcircle of (a, b, c), with
// Orient2d(a, b, c) > 0. Coordinates up to 2^16 in magnitude.
__int128 InCircleDet(PixelPoint a, PixelPoint b, PixelPoint c, PixelPoint d);

// InCircleDet with cocircular ties resolved by the rank perturbation.
// Requires Orient2d(a, b, c) > 0 and four distinct points.
bool InCircumcircle(PixelPoint a, int rank_a, PixelPoint b, int rank_b,
                    PixelPoint c, int rank_c, PixelPoint d, int rank_d);

// Triangulates the occupied lattice points. Vertex ids are lattice indices.
Triangulation Delaunay(const GridSpec& grid, const VertexSet& vertices);

// Triangulates arbitrary distinct points; the rank of a point is its
// position in `points` and the returned ids index into `points`. Throws
// Error(kDegenerateGeometry) when fewer than three points are given or all
// are collinear.
Triangulation DelaunayPoints(std::span<const PixelPoint> points);

}  // namespace trithumb

#endif  // TRITHUMB_TRIANGULATE_H_
