#include "trithumb/model.h"

#include <algorithm>
#include <numeric>

#include "trithumb/error.h"

namespace trithumb {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kContract: return "contract violation";
    case ErrorCode::kDegenerateGeometry: return "degenerate geometry";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kBudgetInfeasible: return "budget infeasible";
    case ErrorCode::kUnsupportedVersion: return "unsupported version";
    case ErrorCode::kInconsistentHeader: return "inconsistent header";
    case ErrorCode::kTruncated: return "truncated stream";
    case ErrorCode::kCorrupt: return "corrupt stream";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kUsage: return "usage error";
  }
  return "unknown error";
}

GridSpec::GridSpec(int g, int width, int height)
    : g_(g), width_(width), height_(height) {
  if (width < 2 || height < 2 || width > kMaxDimension ||
      height > kMaxDimension) {
    Fail(ErrorCode::kContract, "image dimensions must be in 2..4095");
  }
  if (g < 2 || g > kMaxGrid || g > std::min(width, height)) {
    Fail(ErrorCode::kContract,
         "grid size must be in 2..min(255, width, height)");
  }
}

PixelPoint GridSpec::ToPixel(int i, int j) const {
  if (i < 0 || j < 0 || i >= g_ || j >= g_) {
    Fail(ErrorCode::kContract, "grid index out of range");
  }
  // round-half-up of i*(w-1)/(g-1) in integers
  const int den = 2 * (g_ - 1);
  return {(2 * i * (width_ - 1) + (g_ - 1)) / den,
          (2 * j * (height_ - 1) + (g_ - 1)) / den};
}

bool GridSpec::IsCorner(int index) const {
  const int i = Column(index), j = Row(index);
  return (i == 0 || i == g_ - 1) && (j == 0 || j == g_ - 1);
}

std::array<int, 4> GridSpec::Corners() const {
  return {0, g_ - 1, g_ * (g_ - 1), g_ * g_ - 1};
}

int VertexSet::NumVertices() const {
  return static_cast<int>(std::count(occupied.begin(), occupied.end(), 1));
}

std::optional<Violation> Validate(const TriModel& model) {
  const GridSpec& grid = model.grid;
  const VertexSet& vs = model.vertices;
  const int n = grid.NumPoints();
  if (int(vs.occupied.size()) != n || int(vs.color_index.size()) != n) {
    return Violation{"vertex arrays do not match grid", -1};
  }
  for (int c : grid.Corners()) {
    if (!vs.occupied[c]) return Violation{"corner unoccupied", c};
  }
  const int num_colors = model.colors.size();
  if (num_colors < 1 || num_colors > kMaxColors) {
    return Violation{"color table size out of range", -1};
  }
  for (int k = 0; k < num_colors; ++k) {
    const QColor& c = model.colors.entries[k].color;
    if (c.y >= kChannelLevels || c.co >= kChannelLevels ||
        c.cg >= kChannelLevels) {
      return Violation{"channel out of range", k};
    }
  }
  std::vector<int> histogram(num_colors, 0);
  int num_vertices = 0;
  for (int p = 0; p < n; ++p) {
    if (vs.occupied[p] > 1) return Violation{"bad occupancy flag", p};
    if (!vs.occupied[p]) {
      if (vs.color_index[p] != 0) return Violation{"stray color index", p};
      continue;
    }
    ++num_vertices;
    if (vs.color_index[p] >= num_colors) {
      return Violation{"color index out of range", p};
    }
    ++histogram[vs.color_index[p]];
  }
  int freq_sum = 0;
  for (const ColorEntry& e : model.colors.entries) freq_sum += e.freq;
  if (freq_sum != num_vertices) return Violation{"frequency mismatch", -1};
  for (int k = 0; k < num_colors; ++k) {
    if (histogram[k] != model.colors.entries[k].freq) {
      return Violation{"frequency mismatch", k};
    }
  }
  for (int k = 0; k < num_colors; ++k) {
    if (model.colors.entries[k].freq < 1) {
      return Violation{"unused color entry", k};
    }
    if (k > 0 &&
        model.colors.entries[k].freq > model.colors.entries[k - 1].freq) {
      return Violation{"color table not sorted by frequency", k};
    }
  }
  return std::nullopt;
}

void Canonicalize(TriModel& model) {
  const int n = model.grid.NumPoints();
  VertexSet& vs = model.vertices;
  const int old_size = model.colors.size();
  std::vector<int> freq(old_size, 0);
  std::vector<int> first_use(old_size, n);
  for (int p = 0; p < n; ++p) {
    if (!vs.occupied[p]) {
      vs.color_index[p] = 0;
      continue;
    }
    const int k = vs.color_index[p];
    Require(k < old_size, "color index out of range");
    if (freq[k]++ == 0) first_use[k] = p;
  }
  std::vector<int> order;
  for (int k = 0; k < old_size; ++k) {
    if (freq[k] > 0) order.push_back(k);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return first_use[a] < first_use[b];
  });
  std::vector<int> remap(old_size, 0);
  ColorTable table;
  for (int k = 0; k < int(order.size()); ++k) {
    remap[order[k]] = k;
    table.entries.push_back({model.colors.entries[order[k]].color,
                             freq[order[k]]});
  }
  for (int p = 0; p < n; ++p) {
    if (vs.occupied[p]) vs.color_index[p] = uint8_t(remap[vs.color_index[p]]);
  }
  model.colors = std::move(table);
}

TriModel MakeModel(const GridSpec& grid, const std::vector<Vertex>& vertices) {
  const int n = grid.NumPoints();
  TriModel model;
  model.grid = grid;
  model.vertices.occupied.assign(n, 0);
  model.vertices.color_index.assign(n, 0);
  std::vector<QColor> palette;
  for (const Vertex& v : vertices) {
    Require(v.index >= 0 && v.index < n, "vertex index out of range");
    Require(!model.vertices.occupied[v.index], "duplicate vertex");
    Require(v.color.y < kChannelLevels && v.color.co < kChannelLevels &&
                v.color.cg < kChannelLevels,
            "color channel out of range");
    auto it = std::find(palette.begin(), palette.end(), v.color);
    if (it == palette.end()) {
      Require(int(palette.size()) < kMaxColors, "more than 32 distinct colors");
      palette.push_back(v.color);
      it = palette.end() - 1;
    }
    model.vertices.occupied[v.index] = 1;
    model.vertices.color_index[v.index] = uint8_t(it - palette.begin());
  }
  for (int c : grid.Corners()) {
    Require(model.vertices.occupied[c], "model must contain the four corners");
  }
  for (const QColor& c : palette) model.colors.entries.push_back({c, 0});
  Canonicalize(model);
  return model;
}

TriModel MinimalModel(const GridSpec& grid, QColor color) {
  std::vector<Vertex> corners;
  for (int c : grid.Corners()) corners.push_back({c, color});
  return MakeModel(grid, corners);
}

}  // namespace trithumb
