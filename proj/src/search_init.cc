// Deterministic model construction: palette clustering, the pruning
// baseline and the greedy initialization of the stochastic search.

#include <algorithm>
#include <limits>
#include <numeric>

#include "search_internal.h"
#include "trithumb/bitstream.h"
#include "trithumb/error.h"
#include "trithumb/search.h"

namespace trithumb {

using search_internal::ChangeDelta;
using search_internal::MeshFor;
using search_internal::NearestEntry;
using search_internal::PixelError;
using search_internal::ShadeTriangle;
using search_internal::VertexTargets;

namespace search_internal {

DelaunayMesh MeshFor(const GridSpec& grid, const std::vector<uint8_t>& occupied) {
  std::vector<PixelPoint> positions(size_t(grid.NumPoints()));
  std::vector<int> ids;
  for (int p = 0; p < grid.NumPoints(); ++p) {
    positions[size_t(p)] = grid.ToPixel(p);
    if (occupied[size_t(p)]) ids.push_back(p);
  }
  DelaunayMesh mesh(std::move(positions));
  mesh.Build(ids);
  return mesh;
}

std::vector<YCoCgF> VertexTargets(const Raster& target, const GridSpec& grid) {
  const int rx = std::max(0, (grid.width() - 1) / (grid.g() - 1) / 2);
  const int ry = std::max(0, (grid.height() - 1) / (grid.g() - 1) / 2);
  std::vector<YCoCgF> out(size_t(grid.NumPoints()));
  for (int id = 0; id < grid.NumPoints(); ++id) {
    const PixelPoint c = grid.ToPixel(id);
    int sum[3] = {0, 0, 0}, n = 0;
    for (int y = std::max(0, c.y - ry); y <= std::min(target.height - 1, c.y + ry);
         ++y) {
      for (int x = std::max(0, c.x - rx);
           x <= std::min(target.width - 1, c.x + rx); ++x) {
        const uint8_t* px = target.At(x, y);
        for (int k = 0; k < 3; ++k) sum[k] += px[k];
        ++n;
      }
    }
    // RgbToYCoCg is linear, so the mean of the transformed colors is the
    // transform of the mean.
    const YCoCgF t = RgbToYCoCg(sum[0], sum[1], sum[2]);
    out[size_t(id)] = {t.y / n, t.co / n, t.cg / n};
  }
  return out;
}

int NearestEntry(const ColorTable& table, const YCoCgF& c) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < table.size(); ++k) {
    const double d = DistanceSquared(Dequantize(table.entries[k].color), c);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::vector<QColor> ClusterColors(const std::vector<YCoCgF>& colors, int k) {
  Require(k >= 1, "cluster count must be positive");
  struct Cluster {
    YCoCgF mean;
    double weight;
  };
  std::vector<Cluster> clusters;
  for (const YCoCgF& c : colors) clusters.push_back({c, 1.0});
  while (int(clusters.size()) > k) {
    size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < clusters.size(); ++i) {
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = DistanceSquared(clusters[i].mean, clusters[j].mean);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    Cluster& a = clusters[bi];
    const Cluster& b = clusters[bj];
    const double w = a.weight + b.weight;
    a.mean = {(a.mean.y * a.weight + b.mean.y * b.weight) / w,
              (a.mean.co * a.weight + b.mean.co * b.weight) / w,
              (a.mean.cg * a.weight + b.mean.cg * b.weight) / w};
    a.weight = w;
    clusters.erase(clusters.begin() + std::ptrdiff_t(bj));
  }
  std::vector<QColor> out;
  for (const Cluster& c : clusters) out.push_back(Quantize(c.mean));
  return out;
}

}  // namespace search_internal

namespace {

// Builds a model on `occupied` with every vertex on the palette entry
// nearest to its target color.
TriModel AssignNearest(const std::vector<YCoCgF>& targets, const GridSpec& grid,
                       const std::vector<uint8_t>& occupied,
                       const std::vector<QColor>& palette) {
  ColorTable table;
  for (const QColor& q : palette) table.entries.push_back({q, 0});
  std::vector<Vertex> vertices;
  for (int p = 0; p < grid.NumPoints(); ++p) {
    if (!occupied[size_t(p)]) continue;
    const int k = NearestEntry(table, targets[size_t(p)]);
    vertices.push_back({p, palette[size_t(k)]});
  }
  return MakeModel(grid, vertices);
}

// Greedy vertex removal with cached per-vertex costs. Removing a vertex
// only changes the stars of its neighbors, so only their costs are
// recomputed.
class Pruner {
 public:
  Pruner(const Raster& target, TriModel model)
      : target_(target),
        model_(std::move(model)),
        mesh_(MeshFor(model_.grid, model_.vertices.occupied)),
        err_(size_t(target.width) * target.height),
        cost_(size_t(model_.grid.NumPoints())),
        valid_(size_t(model_.grid.NumPoints()), 0) {
    const Raster render = Render(model_);
    for (size_t p = 0; p < err_.size(); ++p) {
      err_[p] = PixelError(&render.rgb[3 * p], &target.rgb[3 * p]);
    }
  }

  // Returns the non-corner vertex with the smallest cost, lowest id on
  // ties, or -1 if only corners are left.
  int Best() {
    int best = -1;
    int64_t best_cost = 0;
    for (int p = 0; p < model_.grid.NumPoints(); ++p) {
      if (!model_.vertices.occupied[size_t(p)] || model_.grid.IsCorner(p)) {
        continue;
      }
      if (!valid_[size_t(p)]) {
        cost_[size_t(p)] = ChangeDelta(mesh_, mesh_.PlanRemove(p), target_,
                                       err_, ColorOf());
        valid_[size_t(p)] = 1;
      }
      if (best < 0 || cost_[size_t(p)] < best_cost) {
        best = p;
        best_cost = cost_[size_t(p)];
      }
    }
    return best;
  }

  void Remove(int id) {
    const DelaunayMesh::Change change = mesh_.PlanRemove(id);
    for (const auto& v : change.added) {
      if (v[2] == DelaunayMesh::kGhost) continue;
      ShadeTriangle(mesh_, v, target_.width, target_.height, ColorOf(),
                    [&](int p, const Rgb& rgb) {
                      err_[size_t(p)] =
                          PixelError(rgb.data(), &target_.rgb[3 * size_t(p)]);
                    });
      for (int u : v) valid_[size_t(u)] = 0;
    }
    mesh_.Apply(change);
    model_.vertices.occupied[size_t(id)] = 0;
    Canonicalize(model_);
  }

  // Prunes until the encoded size fits.
  void Run(int budget, std::vector<int>* removed) {
    while (Encode(model_).size() > size_t(budget)) {
      const int id = Best();
      if (id < 0) break;
      Remove(id);
      if (removed) removed->push_back(id);
    }
    if (Encode(model_).size() > size_t(budget)) {
      // Corners only and still too large: one shared color.
      std::vector<YCoCgF> colors;
      for (int c : model_.grid.Corners()) {
        colors.push_back(Dequantize(model_.VertexColor(c)));
      }
      model_ = MinimalModel(model_.grid,
                            search_internal::ClusterColors(colors, 1)[0]);
    }
    if (Encode(model_).size() > size_t(budget)) {
      Fail(ErrorCode::kBudgetInfeasible, "budget below the smallest model");
    }
  }

  TriModel Take() { return std::move(model_); }

 private:
  struct VertexColors {
    const TriModel* model;
    QColor operator()(int id) const { return model->VertexColor(id); }
  };
  VertexColors ColorOf() const { return {&model_}; }

  const Raster& target_;
  TriModel model_;
  DelaunayMesh mesh_;
  std::vector<int32_t> err_;
  std::vector<int64_t> cost_;
  std::vector<uint8_t> valid_;
};

}  // namespace

// Palette clustered from a 16x16 grid of pixel samples.
static std::vector<QColor> SamplePalette(const Raster& target, int k) {
  std::vector<YCoCgF> sample;
  for (int j = 0; j < 16; ++j) {
    const int y = (2 * j + 1) * target.height / 32;
    for (int i = 0; i < 16; ++i) {
      const int x = (2 * i + 1) * target.width / 32;
      const uint8_t* px = target.At(x, y);
      sample.push_back(RgbToYCoCg(px[0], px[1], px[2]));
    }
  }
  return search_internal::ClusterColors(sample, k);
}

TriModel BaselineStart(const Raster& target, const SearchConfig& config) {
  CheckConfig(config, target.width, target.height);
  const GridSpec grid(config.grid, target.width, target.height);
  const std::vector<QColor> palette = SamplePalette(target, config.init_colors);
  return AssignNearest(VertexTargets(target, grid), grid,
                       std::vector<uint8_t>(size_t(grid.NumPoints()), 1),
                       palette);
}

TriModel ShrinkToBudget(const Raster& target, TriModel model, int budget,
                        std::vector<int>* removed) {
  Pruner pruner(target, std::move(model));
  pruner.Run(budget, removed);
  return pruner.Take();
}

TriModel BaselineEncode(const Raster& target, const SearchConfig& config,
                        std::vector<int>* removed) {
  return ShrinkToBudget(target, BaselineStart(target, config), config.Budget(),
                        removed);
}

TriModel InitStochastic(const Raster& target, const SearchConfig& config) {
  CheckConfig(config, target.width, target.height);
  const GridSpec grid(config.grid, target.width, target.height);
  const int n = grid.NumPoints();
  const std::vector<YCoCgF> targets = VertexTargets(target, grid);
  std::vector<QColor> own(static_cast<size_t>(n));
  for (int p = 0; p < n; ++p) own[size_t(p)] = Quantize(targets[size_t(p)]);
  auto color_of = [&](int id) { return own[size_t(id)]; };

  std::vector<uint8_t> occupied(size_t(n), 0);
  for (int c : grid.Corners()) occupied[size_t(c)] = 1;
  DelaunayMesh mesh = MeshFor(grid, occupied);
  std::vector<int32_t> err(size_t(target.width) * target.height);
  auto paint = [&](const std::array<int, 3>& v) {
    ShadeTriangle(mesh, v, target.width, target.height, color_of,
                  [&](int p, const Rgb& rgb) {
                    err[size_t(p)] =
                        PixelError(rgb.data(), &target.rgb[3 * size_t(p)]);
                  });
  };
  for (int t = 0; t < mesh.NumSlots(); ++t) {
    if (mesh.tri(t).alive && !mesh.tri(t).IsGhost()) paint(mesh.tri(t).v);
  }

  Rng rng(DeriveSeed(config.seed, 0));
  const int goal = std::min(config.init_vertices, n);
  std::vector<double> cumulative(static_cast<size_t>(n));
  std::vector<int> sample;
  std::vector<uint8_t> drawn(size_t(n), 0);
  for (int count = 4; count < goal; ++count) {
    // Candidates are drawn without replacement with probability
    // proportional to 1 + the current error at their pixel, which steers
    // the sample toward badly approximated areas.
    double total = 0;
    for (int p = 0; p < n; ++p) {
      if (!occupied[size_t(p)]) {
        const PixelPoint q = grid.ToPixel(p);
        total += 1.0 + err[size_t(q.y) * size_t(target.width) + size_t(q.x)];
      }
      cumulative[size_t(p)] = total;
    }
    const int m = std::min(config.init_candidates, n - count);
    sample.clear();
    while (int(sample.size()) < m) {
      const double u = rng.Unit() * total;
      int p = int(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                  cumulative.begin());
      p = std::min(p, n - 1);
      while (occupied[size_t(p)]) --p;  // zero-width entries precede p
      if (drawn[size_t(p)]) continue;
      drawn[size_t(p)] = 1;
      sample.push_back(p);
    }
    int best = -1;
    int64_t best_delta = 0;
    DelaunayMesh::Change best_change;
    for (int id : sample) {
      drawn[size_t(id)] = 0;
      DelaunayMesh::Change change = mesh.PlanInsert(id);
      const int64_t delta = ChangeDelta(mesh, change, target, err, color_of);
      if (best < 0 || delta < best_delta || (delta == best_delta && id < best)) {
        best = id;
        best_delta = delta;
        best_change = std::move(change);
      }
    }
    for (const auto& v : best_change.added) {
      if (v[2] != DelaunayMesh::kGhost) paint(v);
    }
    mesh.Apply(best_change);
    occupied[size_t(best)] = 1;
  }

  std::vector<YCoCgF> colors;
  for (int p = 0; p < n; ++p) {
    if (occupied[size_t(p)]) colors.push_back(targets[size_t(p)]);
  }
  return AssignNearest(targets, grid, occupied,
                       search_internal::ClusterColors(colors, config.init_colors));
}

}  // namespace trithumb
