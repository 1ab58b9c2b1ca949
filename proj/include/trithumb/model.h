#ifndef TRITHUMB_MODEL_H_
#define TRITHUMB_MODEL_H_

// Domain types for the triangulated thumbnail representation.
//
// A model is a square lattice of g x g candidate points stretched over a
// width x height pixel rectangle. A subset of lattice points is occupied;
// each occupied point carries an index into a small palette of 6-bit YCoCg
// colors. The Delaunay triangulation of the occupied points, filled with
// interpolated vertex colors, is the reconstruction.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trithumb {

constexpr int kMaxGrid = 255;
constexpr int kMaxDimension = 4095;  // 12-bit header fields
constexpr int kMaxColors = 32;       // 5-bit header field
constexpr int kChannelLevels = 64;   // 6 bits per YCoCg channel

struct PixelPoint {
  int x = 0;
  int y = 0;
  bool operator==(const PixelPoint&) const = default;
};

class GridSpec {
 public:
  GridSpec() = default;
  // Throws Error(kContract) unless 2 <= g <= min(width, height, 255) and
  // 2 <= width, height <= 4095.
  GridSpec(int g, int width, int height);

  int g() const { return g_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int NumPoints() const { return g_ * g_; }

  int Index(int i, int j) const { return j * g_ + i; }
  int Column(int index) const { return index % g_; }
  int Row(int index) const { return index / g_; }

  // Lattice point (i, j) -> (round(i*(w-1)/(g-1)), round(j*(h-1)/(g-1))).
  // Throws Error(kContract) for out-of-range indices.
  PixelPoint ToPixel(int i, int j) const;
  PixelPoint ToPixel(int index) const {
    return ToPixel(Column(index), Row(index));
  }

  bool IsCorner(int index) const;
  // Row-major order: (0,0), (g-1,0), (0,g-1), (g-1,g-1).
  std::array<int, 4> Corners() const;

  // Same lattice over a differently sized pixel rectangle.
  GridSpec Rescaled(int width, int height) const {
    return GridSpec(g_, width, height);
  }

  bool operator==(const GridSpec&) const = default;

 private:
  int g_ = 2;
  int width_ = 2;
  int height_ = 2;
};

// Free function form of GridSpec::ToPixel.
inline PixelPoint GridToPixel(const GridSpec& grid, int i, int j) {
  return grid.ToPixel(i, j);
}

// Quantized YCoCg color, each channel in 0..63.
struct QColor {
  uint8_t y = 0;
  uint8_t co = 0;
  uint8_t cg = 0;

  uint8_t operator[](int channel) const {
    return channel == 0 ? y : (channel == 1 ? co : cg);
  }
  uint8_t& operator[](int channel) {
    return channel == 0 ? y : (channel == 1 ? co : cg);
  }
  bool operator==(const QColor&) const = default;
};

struct ColorEntry {
  QColor color;
  int freq = 0;
  bool operator==(const ColorEntry&) const = default;
};

// Palette sorted by descending frequency.
struct ColorTable {
  std::vector<ColorEntry> entries;

  int size() const { return static_cast<int>(entries.size()); }
  bool operator==(const ColorTable&) const = default;
};

// Occupancy and color indices for every lattice point, row-major. Entries of
// color_index at unoccupied points are zero.
struct VertexSet {
  std::vector<uint8_t> occupied;
  std::vector<uint8_t> color_index;

  int NumVertices() const;
  bool operator==(const VertexSet&) const = default;
};

struct TriModel {
  GridSpec grid;
  VertexSet vertices;
  ColorTable colors;

  int NumVertices() const { return vertices.NumVertices(); }
  QColor VertexColor(int index) const {
    return colors.entries[vertices.color_index[index]].color;
  }
  bool operator==(const TriModel&) const = default;
};

struct Violation {
  std::string what;
  int location = -1;  // lattice index or table index, -1 if not applicable
};

// Checks every structural invariant; returns the first violation found.
std::optional<Violation> Validate(const TriModel& model);

// A lattice point with an explicit color, used to build models.
struct Vertex {
  int index = 0;
  QColor color;
};

// Builds a valid model from explicit vertex colors. The four corners must be
// present. Identical colors share one table entry; the table is sorted by
// descending frequency with ties in order of first use in row-major scan.
TriModel MakeModel(const GridSpec& grid, const std::vector<Vertex>& vertices);

// Re-derives frequencies from the vertex histogram, drops unused entries and
// re-sorts (descending frequency, ties by first row-major use). Indices are
// remapped accordingly.
void Canonicalize(TriModel& model);

// The smallest valid model: four corners sharing one color.
TriModel MinimalModel(const GridSpec& grid, QColor color);

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

  Raster() = default;
  Raster(int w, int h) : width(w), height(h), rgb(size_t(w) * h * 3, 0) {}

  uint8_t* At(int x, int y) { return &rgb[(size_t(y) * width + x) * 3]; }
  const uint8_t* At(int x, int y) const {
    return &rgb[(size_t(y) * width + x) * 3];
  }
  bool operator==(const Raster&) const = default;
};

}  // namespace trithumb

#endif  // TRITHUMB_MODEL_H_
