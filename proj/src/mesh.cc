#include "trithumb/mesh.h"

#include <algorithm>
#include <numeric>
#include <utility>

#include "trithumb/error.h"

namespace trithumb {
namespace {

constexpr int kGhost = DelaunayMesh::kGhost;

// Rotates a triple so that a ghost vertex, if any, sits last. Rotation keeps
// the orientation.
std::array<int, 3> GhostLast(std::array<int, 3> v) {
  if (v[0] == kGhost) return {v[1], v[2], v[0]};
  if (v[1] == kGhost) return {v[2], v[0], v[1]};
  return v;
}

bool Contains(const std::vector<int>& list, int x) {
  return std::find(list.begin(), list.end(), x) != list.end();
}

// Closed point-in-triangle test for a positively oriented triangle.
bool InClosedTriangle(PixelPoint a, PixelPoint b, PixelPoint c, PixelPoint q) {
  return Orient2d(a, b, q) >= 0 && Orient2d(b, c, q) >= 0 &&
         Orient2d(c, a, q) >= 0;
}

PixelPoint Scaled3(PixelPoint p) { return {3 * p.x, 3 * p.y}; }

}  // namespace

DelaunayMesh::DelaunayMesh(std::vector<PixelPoint> positions,
                           std::vector<int> ranks)
    : pos_(std::move(positions)), rank_(std::move(ranks)) {
  if (rank_.empty()) {
    rank_.resize(pos_.size());
    std::iota(rank_.begin(), rank_.end(), 0);
  }
  Require(rank_.size() == pos_.size(), "rank and position counts differ");
  vertex_tri_.assign(pos_.size(), -1);
}

void DelaunayMesh::Build(std::span<const int> ids) {
  tris_.clear();
  free_.clear();
  std::fill(vertex_tri_.begin(), vertex_tri_.end(), -1);
  num_vertices_ = 0;
  hint_ = -1;

  std::vector<int> order(ids.begin(), ids.end());
  for (int id : order) {
    Require(id >= 0 && id < int(pos_.size()), "vertex id out of range");
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return rank_[a] < rank_[b]; });
  {
    std::vector<std::pair<int, int>> coords;
    for (int id : order) coords.push_back({pos_[id].x, pos_[id].y});
    std::sort(coords.begin(), coords.end());
    Require(std::adjacent_find(coords.begin(), coords.end()) == coords.end(),
            "duplicate points");
  }
  if (order.size() < 3) {
    Fail(ErrorCode::kDegenerateGeometry, "fewer than three points");
  }
  size_t third = 2;
  while (third < order.size() &&
         Orient2d(pos_[order[0]], pos_[order[1]], pos_[order[third]]) == 0) {
    ++third;
  }
  if (third == order.size()) {
    Fail(ErrorCode::kDegenerateGeometry, "all points are collinear");
  }
  int a = order[0], b = order[1], c = order[third];
  if (Orient2d(pos_[a], pos_[b], pos_[c]) < 0) std::swap(b, c);
  Change seed;
  seed.added = {{a, b, c}, {b, a, kGhost}, {c, b, kGhost}, {a, c, kGhost}};
  Apply(seed);
  num_vertices_ = 3;
  for (size_t k = 2; k < order.size(); ++k) {
    if (k == third) continue;
    Insert(order[k]);
  }
}

bool DelaunayMesh::Conflicts(const Tri& t, int id) const {
  const PixelPoint p = pos_[id];
  if (!t.IsGhost()) {
    return InCircumcircle(pos_[t.v[0]], rank_[t.v[0]], pos_[t.v[1]],
                          rank_[t.v[1]], pos_[t.v[2]], rank_[t.v[2]], p,
                          rank_[id]);
  }
  const PixelPoint x = pos_[t.v[0]], y = pos_[t.v[1]];
  const int64_t side = Orient2d(x, y, p);
  if (side != 0) return side > 0;
  // Collinear with the hull edge: conflicts only strictly between its ends.
  const int64_t dx = y.x - x.x, dy = y.y - x.y;
  const int64_t along = (p.x - x.x) * dx + (p.y - x.y) * dy;
  return along > 0 && along < dx * dx + dy * dy;
}

int DelaunayMesh::Locate(int id) const {
  const PixelPoint p = pos_[id];
  int t = hint_;
  if (t < 0 || t >= int(tris_.size()) || !tris_[t].alive) {
    t = 0;
    while (!tris_[t].alive) ++t;
  }
  if (tris_[t].IsGhost()) t = tris_[t].nbr[2];
  const int max_steps = 4 * int(tris_.size()) + 16;
  for (int step = 0; step < max_steps; ++step) {
    const Tri& tri = tris_[t];
    int next = -1;
    for (int k = 0; k < 3; ++k) {
      const int e0 = tri.v[(k + 1) % 3], e1 = tri.v[(k + 2) % 3];
      if (Orient2d(pos_[e0], pos_[e1], p) < 0) {
        next = tri.nbr[k];
        break;
      }
    }
    if (next < 0) return t;
    if (tris_[next].IsGhost()) return next;
    t = next;
  }
  // The visibility walk terminates on Delaunay meshes; this is a safety net.
  for (int s = 0; s < int(tris_.size()); ++s) {
    if (tris_[s].alive && Conflicts(tris_[s], id)) return s;
  }
  Fail(ErrorCode::kContract, "point location failed");
}

DelaunayMesh::Change DelaunayMesh::PlanInsert(int id) const {
  Require(id >= 0 && id < int(pos_.size()), "vertex id out of range");
  Require(!Contains(id), "vertex already present");
  Change change;
  change.inserted = id;
  const int start = Locate(id);
  Require(Conflicts(tris_[start], id), "point coincides with a vertex");
  std::vector<int>& cavity = change.removed;
  cavity.push_back(start);
  for (size_t head = 0; head < cavity.size(); ++head) {
    for (int n : tris_[cavity[head]].nbr) {
      if (!::trithumb::Contains(cavity, n) && Conflicts(tris_[n], id)) {
        cavity.push_back(n);
      }
    }
  }
  for (int t : cavity) {
    const Tri& tri = tris_[t];
    for (int k = 0; k < 3; ++k) {
      if (::trithumb::Contains(cavity, tri.nbr[k])) continue;
      change.added.push_back(
          GhostLast({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], id}));
    }
  }
  return change;
}

std::vector<int> DelaunayMesh::Star(int id) const {
  std::vector<int> star;
  const int first = vertex_tri_[id];
  int t = first;
  do {
    star.push_back(t);
    const Tri& tri = tris_[t];
    const int k = int(std::find(tri.v.begin(), tri.v.end(), id) - tri.v.begin());
    t = tri.nbr[(k + 1) % 3];
  } while (t != first);
  return star;
}

std::vector<int> DelaunayMesh::SolidStar(int id) const {
  std::vector<int> star = Star(id);
  std::erase_if(star, [&](int t) { return tris_[t].IsGhost(); });
  return star;
}

DelaunayMesh::Change DelaunayMesh::PlanRemove(int id) const {
  Require(id >= 0 && id < int(pos_.size()) && Contains(id),
          "vertex not present");
  Change change;
  change.erased = id;
  change.removed = Star(id);

  std::vector<int> link;
  std::vector<std::pair<int, int>> boundary;  // directed edges facing id
  for (int t : change.removed) {
    const Tri& tri = tris_[t];
    const int k = int(std::find(tri.v.begin(), tri.v.end(), id) - tri.v.begin());
    const int u = tri.v[(k + 1) % 3], w = tri.v[(k + 2) % 3];
    boundary.push_back({u, w});
    for (int x : {u, w}) {
      if (x != kGhost && !::trithumb::Contains(link, x)) link.push_back(x);
    }
  }

  std::vector<PixelPoint> local_pos;
  std::vector<int> local_rank;
  for (int x : link) {
    local_pos.push_back(pos_[x]);
    local_rank.push_back(rank_[x]);
  }
  DelaunayMesh hole(std::move(local_pos), std::move(local_rank));
  std::vector<int> local_ids(link.size());
  std::iota(local_ids.begin(), local_ids.end(), 0);
  hole.Build(local_ids);

  std::vector<std::array<int, 3>> solids;
  for (const Tri& tri : hole.tris_) {
    if (!tri.alive || tri.IsGhost()) continue;
    const PixelPoint a = hole.pos_[tri.v[0]], b = hole.pos_[tri.v[1]],
                     c = hole.pos_[tri.v[2]];
    const PixelPoint centroid{a.x + b.x + c.x, a.y + b.y + c.y};
    bool inside = false;
    for (int t : change.removed) {
      const Tri& old = tris_[t];
      if (old.IsGhost()) continue;
      if (InClosedTriangle(Scaled3(pos_[old.v[0]]), Scaled3(pos_[old.v[1]]),
                           Scaled3(pos_[old.v[2]]), centroid)) {
        inside = true;
        break;
      }
    }
    if (inside) solids.push_back({link[tri.v[0]], link[tri.v[1]], link[tri.v[2]]});
  }

  change.added = solids;
  auto has_edge = [](const std::array<int, 3>& v, int u, int w) {
    for (int k = 0; k < 3; ++k) {
      if (v[k] == u && v[(k + 1) % 3] == w) return true;
    }
    return false;
  };
  for (const auto& s : solids) {
    for (int k = 0; k < 3; ++k) {
      const int u = s[k], w = s[(k + 1) % 3];
      const bool internal = std::any_of(
          solids.begin(), solids.end(),
          [&](const std::array<int, 3>& o) { return has_edge(o, w, u); });
      if (internal) continue;
      if (std::find(boundary.begin(), boundary.end(), std::pair{u, w}) !=
          boundary.end()) {
        continue;
      }
      change.added.push_back({w, u, kGhost});
    }
  }
  return change;
}

int DelaunayMesh::NewTri(const std::array<int, 3>& v) {
  int t;
  if (!free_.empty()) {
    t = free_.back();
    free_.pop_back();
  } else {
    t = int(tris_.size());
    tris_.emplace_back();
  }
  Tri& tri = tris_[t];
  tri.v = v;
  tri.nbr = {-1, -1, -1};
  tri.stamp = ++stamp_counter_;
  tri.alive = true;
  return t;
}

void DelaunayMesh::Link(int t, int edge, int other, int other_edge) {
  tris_[t].nbr[edge] = other;
  tris_[other].nbr[other_edge] = t;
}

void DelaunayMesh::Apply(const Change& change) {
  // Edges of the surviving mesh that bordered the removed region, keyed by
  // their direction as seen from inside the region.
  struct Border {
    int u, w, outer, outer_edge;
  };
  std::vector<Border> border;
  for (int r : change.removed) {
    const Tri& tri = tris_[r];
    for (int k = 0; k < 3; ++k) {
      const int n = tri.nbr[k];
      if (::trithumb::Contains(change.removed, n)) continue;
      const Tri& outer = tris_[n];
      const int j = int(std::find(outer.nbr.begin(), outer.nbr.end(), r) -
                        outer.nbr.begin());
      border.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], n, j});
    }
  }
  for (int r : change.removed) {
    tris_[r].alive = false;
    free_.push_back(r);
  }

  std::vector<int> fresh;
  fresh.reserve(change.added.size());
  for (const auto& v : change.added) fresh.push_back(NewTri(v));
  for (size_t a = 0; a < fresh.size(); ++a) {
    for (int k = 0; k < 3; ++k) {
      if (tris_[fresh[a]].nbr[k] >= 0) continue;
      const int u = tris_[fresh[a]].v[(k + 1) % 3];
      const int w = tris_[fresh[a]].v[(k + 2) % 3];
      bool linked = false;
      for (size_t b = a + 1; b < fresh.size() && !linked; ++b) {
        const Tri& other = tris_[fresh[b]];
        for (int j = 0; j < 3; ++j) {
          if (other.v[(j + 1) % 3] == w && other.v[(j + 2) % 3] == u) {
            Link(fresh[a], k, fresh[b], j);
            linked = true;
            break;
          }
        }
      }
      if (linked) continue;
      for (const Border& e : border) {
        if (e.u == u && e.w == w) {
          Link(fresh[a], k, e.outer, e.outer_edge);
          linked = true;
          break;
        }
      }
      Require(linked, "mesh change leaves an unmatched edge");
    }
  }

  for (int t : fresh) {
    for (int x : tris_[t].v) {
      if (x != kGhost) vertex_tri_[x] = t;
    }
  }
  if (change.inserted >= 0) ++num_vertices_;
  if (change.erased >= 0) {
    vertex_tri_[change.erased] = -1;
    --num_vertices_;
  }
  if (!fresh.empty()) hint_ = fresh.front();
}

Triangulation DelaunayMesh::Triangles() const {
  Triangulation out;
  for (const Tri& tri : tris_) {
    if (!tri.alive || tri.IsGhost()) continue;
    Triangle t = tri.v;
    std::sort(t.begin(), t.end());
    out.triangles.push_back(t);
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  return out;
}

}  // namespace trithumb
