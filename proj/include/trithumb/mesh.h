#ifndef TRITHUMB_MESH_H_
#define TRITHUMB_MESH_H_

// Incremental Delaunay mesh with vertex insertion and removal.
//
// The triangulation is closed into a topological sphere by ghost triangles:
// every convex hull edge is shared with a triangle whose third vertex is the
// point at infinity (kGhost). Adjacent triangles traverse their shared edge
// in opposite directions. Solid triangles have Orient2d > 0.
//
// Changes are planned first (PlanInsert / PlanRemove list the triangles that
// go away and the ones that replace them) and committed with Apply. Search
// code uses plans to score a change from the affected pixels only.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trithumb/model.h"
#include "trithumb/triangulate.h"

namespace trithumb {

class DelaunayMesh {
 public:
  static constexpr int kGhost = -1;

  struct Tri {
    std::array<int, 3> v;    // kGhost, if present, is always v[2]
    std::array<int, 3> nbr;  // nbr[i] is across the edge opposite v[i]
    uint64_t stamp = 0;      // creation serial number, unique per mesh
    bool alive = false;

    bool IsGhost() const { return v[2] == kGhost; }
  };

  struct Change {
    std::vector<int> removed;                // triangle slots
    std::vector<std::array<int, 3>> added;   // vertex triples, solid or ghost
    int inserted = -1;                       // vertex entering the mesh
    int erased = -1;                         // vertex leaving the mesh
  };

  DelaunayMesh() = default;
  // Point slots addressed by id. Ranks default to the id.
  explicit DelaunayMesh(std::vector<PixelPoint> positions,
                        std::vector<int> ranks = {});

  // Triangulates the given ids from scratch. Throws
  // Error(kDegenerateGeometry) if they are all collinear.
  void Build(std::span<const int> ids);

  // `id` must not be in the mesh and must not coincide with a vertex.
  Change PlanInsert(int id) const;
  // `id` must be a vertex and the remaining vertices must not be collinear.
  Change PlanRemove(int id) const;
  void Apply(const Change& change);

  void Insert(int id) { Apply(PlanInsert(id)); }
  void Remove(int id) { Apply(PlanRemove(id)); }

  bool Contains(int id) const { return vertex_tri_[id] >= 0; }
  int NumVertices() const { return num_vertices_; }
  PixelPoint Position(int id) const { return pos_[id]; }
  int Rank(int id) const { return rank_[id]; }
  int NumSlots() const { return int(tris_.size()); }
  const Tri& tri(int t) const { return tris_[t]; }
  uint64_t stamp_counter() const { return stamp_counter_; }

  // Solid triangles in canonical form.
  Triangulation Triangles() const;

  // Solid triangles incident to a vertex.
  std::vector<int> SolidStar(int id) const;

 private:
  bool Conflicts(const Tri& t, int id) const;
  int Locate(int id) const;
  std::vector<int> Star(int id) const;
  int NewTri(const std::array<int, 3>& v);
  void Link(int t, int edge, int other, int other_edge);

  std::vector<PixelPoint> pos_;
  std::vector<int> rank_;
  std::vector<int> vertex_tri_;  // some live triangle incident to the id
  std::vector<Tri> tris_;
  std::vector<int> free_;
  uint64_t stamp_counter_ = 0;
  int num_vertices_ = 0;
  mutable int hint_ = -1;
};

}  // namespace trithumb

#endif  // TRITHUMB_MESH_H_
