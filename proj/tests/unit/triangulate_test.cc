#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "support/delaunay_oracle.h"
#include "trithumb/error.h"
#include "trithumb/mesh.h"
#include "trithumb/triangulate.h"

namespace trithumb {
namespace {

using oracle::BruteForce;
using oracle::OracleInside;

VertexSet CornersOnly(const GridSpec& grid) {
  VertexSet vs;
  vs.occupied.assign(grid.NumPoints(), 0);
  vs.color_index.assign(grid.NumPoints(), 0);
  for (int c : grid.Corners()) vs.occupied[c] = 1;
  return vs;
}

TEST_SUITE("triangulate") {

TEST_CASE("four corners split along the diagonal through index 0") {
  for (int g : {2, 3, 15, 52}) {
    const GridSpec grid(g, 221, 221);
    const Triangulation t = Delaunay(grid, CornersOnly(grid));
    const int last = g * g - 1;
    const Triangulation expected{{{0, g - 1, last}, {0, g * (g - 1), last}}};
    CHECK(t == expected);
  }
}

TEST_CASE("corners plus center make a fan of four") {
  const GridSpec grid(15, 221, 221);
  VertexSet vs = CornersOnly(grid);
  const int center = grid.Index(7, 7);
  vs.occupied[center] = 1;
  const Triangulation t = Delaunay(grid, vs);
  const Triangulation expected{{{0, 14, center},
                                {0, center, 210},
                                {14, center, 224},
                                {center, 210, 224}}};
  CHECK(t == expected);
}

TEST_CASE("collinear input is degenerate") {
  const std::vector<PixelPoint> line = {{0, 0}, {1, 1}, {5, 5}, {2, 2}};
  try {
    DelaunayPoints(line);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateGeometry);
  }
  const std::vector<PixelPoint> two = {{0, 0}, {1, 1}};
  CHECK_THROWS_AS(DelaunayPoints(two), Error);
}

TEST_CASE("predicate tie rule agrees with the determinant oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(0, 4);
  int ties = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    PixelPoint p[4];
    for (auto& q : p) q = {coord(rng), coord(rng)};
    if (Orient2d(p[0], p[1], p[2]) <= 0) continue;
    if (p[3] == p[0] || p[3] == p[1] || p[3] == p[2]) continue;
    int rank[4] = {0, 1, 2, 3};
    std::shuffle(rank, rank + 4, rng);
    if (InCircleDet(p[0], p[1], p[2], p[3]) == 0) ++ties;
    CHECK(InCircumcircle(p[0], rank[0], p[1], rank[1], p[2], rank[2], p[3],
                         rank[3]) == OracleInside(p, rank));
  }
  CHECK(ties > 100);
}

TEST_CASE("matches brute force on small lattice sets") {
  std::mt19937_64 rng(11);
  int compared = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int side = 3 + int(rng() % 5);
    std::vector<PixelPoint> all;
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) all.push_back({x * 3, y * 3});
    }
    std::shuffle(all.begin(), all.end(), rng);
    const int n = 3 + int(rng() % 10);
    std::vector<PixelPoint> pts(all.begin(),
                                all.begin() + std::min<int>(n, all.size()));
    bool collinear = true;
    for (size_t k = 2; k < pts.size(); ++k) {
      if (Orient2d(pts[0], pts[1], pts[k]) != 0) collinear = false;
    }
    if (collinear) continue;
    CHECK(DelaunayPoints(pts) == BruteForce(pts));
    ++compared;
  }
  CHECK(compared > 300);
}

TEST_CASE("matches brute force on random 50-point sets") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::set<std::pair<int, int>> seen;
    std::vector<PixelPoint> pts;
    while (pts.size() < 50) {
      const int x = int(rng() % 12), y = int(rng() % 12);
      if (seen.insert({x, y}).second) pts.push_back({x * 20, y * 20});
    }
    CHECK(DelaunayPoints(pts) == BruteForce(pts));
  }
}

TEST_CASE("grid path matches brute force with row-major ranks") {
  std::mt19937_64 rng(3);
  const GridSpec grid(9, 221, 221);
  for (int trial = 0; trial < 60; ++trial) {
    VertexSet vs = CornersOnly(grid);
    const int extra = int(rng() % 12);
    for (int k = 0; k < extra; ++k) vs.occupied[rng() % 81] = 1;
    std::vector<int> ids;
    std::vector<PixelPoint> pts;
    for (int p = 0; p < grid.NumPoints(); ++p) {
      if (vs.occupied[p]) {
        ids.push_back(p);
        pts.push_back(grid.ToPixel(p));
      }
    }
    Triangulation expected = BruteForce(pts);
    for (auto& t : expected.triangles) {
      for (int& v : t) v = ids[v];
    }
    CHECK(Delaunay(grid, vs) == expected);
  }
}

TEST_CASE("incremental edits match a rebuild") {
  std::mt19937_64 rng(17);
  const GridSpec grid(12, 221, 221);
  std::vector<PixelPoint> pos;
  for (int p = 0; p < grid.NumPoints(); ++p) pos.push_back(grid.ToPixel(p));
  DelaunayMesh mesh(pos);
  const auto corners = grid.Corners();
  mesh.Build(corners);
  std::vector<uint8_t> present(grid.NumPoints(), 0);
  for (int c : corners) present[c] = 1;
  for (int step = 0; step < 1500; ++step) {
    const int p = int(rng() % grid.NumPoints());
    if (grid.IsCorner(p)) continue;
    if (present[p]) {
      mesh.Remove(p);
    } else {
      mesh.Insert(p);
    }
    present[p] ^= 1;
    if (step % 25 == 0) {
      VertexSet vs;
      vs.occupied = present;
      vs.color_index.assign(present.size(), 0);
      REQUIRE(mesh.Triangles() == Delaunay(grid, vs));
      REQUIRE(mesh.NumVertices() == vs.NumVertices());
    }
  }
}

TEST_CASE("planned changes describe the difference") {
  const GridSpec grid(6, 50, 50);
  std::vector<PixelPoint> pos;
  for (int p = 0; p < grid.NumPoints(); ++p) pos.push_back(grid.ToPixel(p));
  DelaunayMesh mesh(pos);
  std::vector<int> ids = {0, 5, 30, 35, 8, 14, 21, 27};
  mesh.Build(ids);
  const DelaunayMesh::Change plan = mesh.PlanRemove(14);
  std::set<Triangle> before, removed, added;
  for (const Triangle& t : mesh.Triangles().triangles) before.insert(t);
  for (int t : plan.removed) {
    if (mesh.tri(t).IsGhost()) continue;
    Triangle v = mesh.tri(t).v;
    std::sort(v.begin(), v.end());
    removed.insert(v);
  }
  for (auto v : plan.added) {
    if (v[2] == DelaunayMesh::kGhost) continue;
    std::sort(v.begin(), v.end());
    added.insert(v);
  }
  mesh.Apply(plan);
  std::set<Triangle> after;
  for (const Triangle& t : mesh.Triangles().triangles) after.insert(t);
  std::set<Triangle> expected;
  std::set_difference(before.begin(), before.end(), removed.begin(),
                      removed.end(), std::inserter(expected, expected.end()));
  expected.insert(added.begin(), added.end());
  CHECK(after == expected);
  CHECK_FALSE(mesh.Contains(14));
}

}  // TEST_SUITE

}  // namespace
}  // namespace trithumb
