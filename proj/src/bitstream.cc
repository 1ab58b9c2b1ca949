#include "trithumb/bitstream.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trithumb/error.h"

namespace trithumb {

const std::array<int, 16> kSharpness = {8,   24,  48,  72,  96,  120, 144, 164,
                                        184, 200, 214, 226, 236, 244, 250, 256};

namespace {

class BitWriter {
 public:
  void Put(uint32_t value, int bits) {
    for (int k = bits - 1; k >= 0; --k) {
      if ((value >> k) & 1) bytes_[pos_ / 8] |= uint8_t(0x80 >> (pos_ % 8));
      ++pos_;
    }
  }
  std::array<uint8_t, kHeaderBytes> bytes_{};

 private:
  int pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}
  uint32_t Get(int bits) {
    uint32_t v = 0;
    for (int k = 0; k < bits; ++k, ++pos_) {
      v = (v << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1);
    }
    return v;
  }

 private:
  std::span<const uint8_t> bytes_;
  int pos_ = 0;
};

// Sums ideal code lengths instead of coding.
class CostSink {
 public:
  void Put(const FreqTable& table, int symbol) { bits += table.Bits(symbol); }
  void PutBit(BinaryModel model, bool bit) { bits += model.Bits(bit); }
  double bits = 0;
};

int CeilDiv(int a, int b) { return (a + b - 1) / b; }

// Supports of the frequency models. Entry k of the table is coded knowing
// the vertices and entries not yet accounted for.
struct FreqSupport {
  int n, m, lo, hi;
};
FreqSupport FrequencySupport(int remaining_vertices, int remaining_entries,
                             int previous_freq, bool first) {
  FreqSupport s;
  s.n = remaining_vertices;
  s.m = remaining_entries;
  s.lo = CeilDiv(remaining_vertices, remaining_entries);
  s.hi = first ? remaining_vertices
               : std::min(remaining_vertices, previous_freq);
  return s;
}

template <typename Sink>
void EmitDeltas(Sink& sink, const ColorTable& table,
                const std::array<int, 3>& sharpness) {
  std::array<int, 3> sum = {0, 0, 0};
  for (int e = 0; e < table.size(); ++e) {
    for (int ch = 0; ch < 3; ++ch) {
      const int v = table.entries[e].color[ch];
      sink.Put(DeltaModel(sharpness[ch], PredictChannel(sum[ch], e)), v);
      sum[ch] += v;
    }
  }
}

template <typename Sink>
void EmitFrequencies(Sink& sink, const ColorTable& table, int num_vertices) {
  int remaining = num_vertices;
  for (int k = 0; k + 1 < table.size(); ++k) {
    const FreqSupport s =
        FrequencySupport(remaining, table.size() - k,
                         k ? table.entries[k - 1].freq : 0, k == 0);
    sink.Put(TruncatedBinomial(s.n, s.m, s.lo, s.hi), table.entries[k].freq);
    remaining -= table.entries[k].freq;
  }
}

template <typename Sink>
void EmitOccupancy(Sink& sink, const TriModel& model) {
  const GridSpec& grid = model.grid;
  int vertices = model.NumVertices() - 4;
  int points = grid.NumPoints() - 4;
  for (int p = 0; p < grid.NumPoints(); ++p) {
    if (grid.IsCorner(p)) continue;
    const bool bit = model.vertices.occupied[p] != 0;
    sink.PutBit(OccupancyModel(vertices, points), bit);
    --points;
    vertices -= bit;
  }
}

// Remaining counts and spatial history of colors during the index scan.
class IndexContext {
 public:
  IndexContext(const GridSpec& grid, const ColorTable& table)
      : grid_(grid),
        remaining_(table.size()),
        rows_(table.size()),
        columns_(table.size(), std::vector<std::vector<int>>(grid.g())) {
    for (int c = 0; c < table.size(); ++c) {
      remaining_[c] = table.entries[c].freq;
      total_ += remaining_[c];
    }
  }

  int remaining(int c) const { return remaining_[c]; }
  int total() const { return total_; }

  // Colors that can still occur, most likely first.
  void Candidates(int index, bool spatial, std::vector<int>& out) {
    const int i = grid_.Column(index), j = grid_.Row(index);
    seen_.clear();
    out.clear();
    for (int c = 0; c < int(remaining_.size()); ++c) {
      if (remaining_[c] == 0) continue;
      if (spatial && !rows_[c].empty()) {
        seen_.push_back({Distance(c, i, j), c});
      } else {
        out.push_back(c);
      }
    }
    auto by_count = [&](int a, int b) {
      if (remaining_[a] != remaining_[b]) return remaining_[a] > remaining_[b];
      return a < b;
    };
    std::sort(out.begin(), out.end(), by_count);
    std::sort(seen_.begin(), seen_.end(),
              [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
                if (a.first != b.first) return a.first < b.first;
                return by_count(a.second, b.second);
              });
    out.insert(out.begin(), seen_.size(), 0);
    for (size_t k = 0; k < seen_.size(); ++k) out[k] = seen_[k].second;
  }

  void Commit(int index, int c) {
    const int i = grid_.Column(index), j = grid_.Row(index);
    if (rows_[c].empty() || rows_[c].back() != j) rows_[c].push_back(j);
    columns_[c][j].push_back(i);
    --remaining_[c];
    --total_;
  }

 private:
  // Manhattan distance in lattice steps to the nearest earlier vertex of
  // color c. Earlier vertices lie in rows <= j.
  int Distance(int c, int i, int j) const {
    int best = std::numeric_limits<int>::max();
    const std::vector<int>& rows = rows_[c];
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      const int dy = j - *it;
      if (dy >= best) break;
      const std::vector<int>& cols = columns_[c][*it];
      const auto pos = std::lower_bound(cols.begin(), cols.end(), i);
      int dx = std::numeric_limits<int>::max();
      if (pos != cols.end()) dx = *pos - i;
      if (pos != cols.begin()) dx = std::min(dx, i - *(pos - 1));
      best = std::min(best, dy + dx);
    }
    return best;
  }

  const GridSpec& grid_;
  std::vector<int> remaining_;
  int total_ = 0;
  std::vector<std::vector<int>> rows_;                  // rows used, ascending
  std::vector<std::vector<std::vector<int>>> columns_;  // per color and row
  std::vector<std::pair<int, int>> seen_;
};

template <typename Sink>
void EmitIndices(Sink& sink, const TriModel& model, bool spatial) {
  IndexContext ctx(model.grid, model.colors);
  std::vector<int> candidates;
  for (int p = 0; p < model.grid.NumPoints(); ++p) {
    if (!model.vertices.occupied[p]) continue;
    const int color = model.vertices.color_index[p];
    ctx.Candidates(p, spatial, candidates);
    int denom = ctx.total();
    for (size_t k = 0; k + 1 < candidates.size(); ++k) {
      const int c = candidates[k];
      const bool hit = c == color;
      sink.PutBit(BinaryModel::FromWeights(uint64_t(denom - ctx.remaining(c)),
                                           uint64_t(ctx.remaining(c))),
                  hit);
      if (hit) break;
      denom -= ctx.remaining(c);
    }
    ctx.Commit(p, color);
  }
}

// Encoder's choice of delta sharpness: cheapest in 16.16 fixed point, ties
// to the smallest parameter.
std::array<int, 3> ChooseSharpness(const ColorTable& table) {
  std::array<int, 3> best = {0, 0, 0};
  for (int ch = 0; ch < 3; ++ch) {
    int64_t best_cost = std::numeric_limits<int64_t>::max();
    for (int param = 0; param < 16; ++param) {
      int64_t cost = 0;
      int sum = 0;
      for (int e = 0; e < table.size(); ++e) {
        const FreqTable& t = DeltaModel(param, PredictChannel(sum, e));
        const int v = table.entries[e].color[ch];
        cost += FixedBits(t.freq(v), t.precision());
        sum += v;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best[ch] = param;
      }
    }
  }
  return best;
}

}  // namespace

int PredictChannel(int sum, int count) {
  if (count == 0) return kMidGray;
  return (2 * sum + count) / (2 * count);
}

const FreqTable& DeltaModel(int param, int prediction) {
  static const std::vector<FreqTable> tables = [] {
    std::vector<FreqTable> out;
    for (int p = 0; p < 16; ++p) {
      std::array<uint64_t, kChannelLevels> by_distance;
      by_distance[0] = uint64_t(1) << 40;
      for (int d = 1; d < kChannelLevels; ++d) {
        by_distance[d] = by_distance[d - 1] * uint64_t(kSharpness[p]) / 256;
      }
      for (int pred = 0; pred < kChannelLevels; ++pred) {
        std::array<uint64_t, kChannelLevels> w;
        for (int v = 0; v < kChannelLevels; ++v) {
          w[v] = std::max<uint64_t>(by_distance[std::abs(v - pred)], 1);
        }
        out.push_back(FreqTable::FromWeights(0, w));
      }
    }
    return out;
  }();
  Require(param >= 0 && param < 16 && prediction >= 0 &&
              prediction < kChannelLevels,
          "delta model parameter out of range");
  return tables[param * kChannelLevels + prediction];
}

std::array<uint8_t, kHeaderBytes> PackHeader(const Header& h) {
  Require(h.version >= 0 && h.version < 16 && h.g >= 0 && h.g < 256 &&
              h.width >= 0 && h.width < 4096 && h.height >= 0 &&
              h.height < 4096 && h.num_colors >= 1 && h.num_colors <= 32 &&
              h.num_vertices >= 0 && h.num_vertices < 65536,
          "header field out of range");
  BitWriter w;
  w.Put(uint32_t(h.version), 4);
  w.Put(uint32_t(h.g), 8);
  w.Put(uint32_t(h.width), 12);
  w.Put(uint32_t(h.height), 12);
  w.Put(uint32_t(h.num_colors - 1), 5);
  w.Put(uint32_t(h.num_vertices), 16);
  for (int s : h.sharpness) {
    Require(s >= 0 && s < 16, "header field out of range");
    w.Put(uint32_t(s), 4);
  }
  return w.bytes_;
}

Header UnpackHeader(std::span<const uint8_t> bytes) {
  if (bytes.size() < size_t(kHeaderBytes)) {
    Fail(ErrorCode::kTruncated, "header truncated");
  }
  BitReader r(bytes);
  Header h;
  h.version = int(r.Get(4));
  if (h.version != kFormatVersion) {
    Fail(ErrorCode::kUnsupportedVersion,
         "unsupported version " + std::to_string(h.version));
  }
  h.g = int(r.Get(8));
  h.width = int(r.Get(12));
  h.height = int(r.Get(12));
  h.num_colors = int(r.Get(5)) + 1;
  h.num_vertices = int(r.Get(16));
  for (int& s : h.sharpness) s = int(r.Get(4));
  if (r.Get(3) != 0) Fail(ErrorCode::kCorrupt, "nonzero header padding");
  if (h.width < 2 || h.height < 2 || h.g < 2 ||
      h.g > std::min(h.width, h.height)) {
    Fail(ErrorCode::kInconsistentHeader, "bad grid or image size");
  }
  if (h.num_vertices < 4 || h.num_vertices > h.g * h.g) {
    Fail(ErrorCode::kInconsistentHeader, "vertex count out of range");
  }
  if (h.num_colors > h.num_vertices) {
    Fail(ErrorCode::kInconsistentHeader, "more colors than vertices");
  }
  return h;
}

std::vector<uint8_t> Encode(const TriModel& model) {
  if (auto violation = Validate(model)) {
    Fail(ErrorCode::kContract, "invalid model: " + violation->what);
  }
  Header h;
  h.g = model.grid.g();
  h.width = model.grid.width();
  h.height = model.grid.height();
  h.num_colors = model.colors.size();
  h.num_vertices = model.NumVertices();
  h.sharpness = ChooseSharpness(model.colors);

  RansEncoder enc;
  EmitDeltas(enc, model.colors, h.sharpness);
  EmitFrequencies(enc, model.colors, h.num_vertices);
  EmitOccupancy(enc, model);
  EmitIndices(enc, model, /*spatial=*/true);

  const auto header = PackHeader(h);
  std::vector<uint8_t> out(header.begin(), header.end());
  const std::vector<uint8_t> payload = enc.Finish();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

TriModel Decode(std::span<const uint8_t> bytes) {
  const Header h = UnpackHeader(bytes);
  RansDecoder dec(bytes.subspan(kHeaderBytes));

  TriModel model;
  model.grid = GridSpec(h.g, h.width, h.height);
  const int n = model.grid.NumPoints();

  std::array<int, 3> sum = {0, 0, 0};
  model.colors.entries.resize(size_t(h.num_colors));
  for (int e = 0; e < h.num_colors; ++e) {
    for (int ch = 0; ch < 3; ++ch) {
      const int v = dec.Get(DeltaModel(h.sharpness[ch], PredictChannel(sum[ch], e)));
      model.colors.entries[e].color[ch] = uint8_t(v);
      sum[ch] += v;
    }
  }

  int remaining = h.num_vertices;
  for (int k = 0; k + 1 < h.num_colors; ++k) {
    const FreqSupport s =
        FrequencySupport(remaining, h.num_colors - k,
                         k ? model.colors.entries[k - 1].freq : 0, k == 0);
    if (s.lo > s.hi || s.lo < 1) {
      Fail(ErrorCode::kCorrupt, "color frequencies do not add up");
    }
    const int f = dec.Get(TruncatedBinomial(s.n, s.m, s.lo, s.hi));
    model.colors.entries[k].freq = f;
    remaining -= f;
  }
  if (remaining < 1 ||
      (h.num_colors > 1 && remaining > model.colors.entries[h.num_colors - 2].freq)) {
    Fail(ErrorCode::kCorrupt, "color frequencies do not add up");
  }
  model.colors.entries.back().freq = remaining;

  model.vertices.occupied.assign(size_t(n), 0);
  model.vertices.color_index.assign(size_t(n), 0);
  for (int c : model.grid.Corners()) model.vertices.occupied[c] = 1;
  int vertices = h.num_vertices - 4;
  int points = n - 4;
  for (int p = 0; p < n; ++p) {
    if (model.grid.IsCorner(p)) continue;
    const bool bit = dec.GetBit(OccupancyModel(vertices, points));
    model.vertices.occupied[p] = bit;
    --points;
    vertices -= bit;
  }

  IndexContext ctx(model.grid, model.colors);
  std::vector<int> candidates;
  for (int p = 0; p < n; ++p) {
    if (!model.vertices.occupied[p]) continue;
    ctx.Candidates(p, /*spatial=*/true, candidates);
    if (candidates.empty()) Fail(ErrorCode::kCorrupt, "color counts exhausted");
    int denom = ctx.total();
    int color = candidates.back();
    for (size_t k = 0; k + 1 < candidates.size(); ++k) {
      const int c = candidates[k];
      if (dec.GetBit(BinaryModel::FromWeights(uint64_t(denom - ctx.remaining(c)),
                                              uint64_t(ctx.remaining(c))))) {
        color = c;
        break;
      }
      denom -= ctx.remaining(c);
    }
    model.vertices.color_index[p] = uint8_t(color);
    ctx.Commit(p, color);
  }
  dec.Finish();

  if (auto violation = Validate(model)) {
    Fail(ErrorCode::kCorrupt, "decoded model is invalid: " + violation->what);
  }
  return model;
}

SectionCosts MeasureSections(const TriModel& model) {
  if (auto violation = Validate(model)) {
    Fail(ErrorCode::kContract, "invalid model: " + violation->what);
  }
  SectionCosts out;
  CostSink deltas;
  EmitDeltas(deltas, model.colors, ChooseSharpness(model.colors));
  out.deltas = deltas.bits;

  CostSink freqs;
  EmitFrequencies(freqs, model.colors, model.NumVertices());
  out.frequencies = freqs.bits;
  int remaining = model.NumVertices();
  for (int k = 0; k + 1 < model.colors.size(); ++k) {
    const FreqSupport s =
        FrequencySupport(remaining, model.colors.size() - k,
                         k ? model.colors.entries[k - 1].freq : 0, k == 0);
    out.frequencies_uniform += std::log2(double(s.hi - s.lo + 1));
    remaining -= model.colors.entries[k].freq;
  }

  CostSink occupancy;
  EmitOccupancy(occupancy, model);
  out.occupancy = occupancy.bits;
  const int points = model.grid.NumPoints() - 4;
  out.occupancy_raw = points;
  if (points > 0) {
    const BinaryModel fixed =
        OccupancyModel(model.NumVertices() - 4, points);
    for (int p = 0; p < model.grid.NumPoints(); ++p) {
      if (model.grid.IsCorner(p)) continue;
      out.occupancy_fixed += fixed.Bits(model.vertices.occupied[p] != 0);
    }
  }

  CostSink spatial, plain;
  EmitIndices(spatial, model, true);
  EmitIndices(plain, model, false);
  out.indices = spatial.bits;
  out.indices_frequency_only = plain.bits;
  return out;
}

}  // namespace trithumb
