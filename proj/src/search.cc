#include "trithumb/search.h"

#include <algorithm>
#include <cmath>

#include "search_internal.h"
#include "trithumb/bitstream.h"
#include "trithumb/error.h"
#include "trithumb/metrics.h"

namespace trithumb {

using search_internal::MeshFor;
using search_internal::NearestEntry;
using search_internal::PixelError;
using search_internal::ShadeTriangle;
using search_internal::VertexTargets;

OperatorProbs OperatorSubset(std::string_view letters) {
  OperatorProbs probs{};
  if (letters == "none") return probs;
  if (letters == "all") return kDefaultOperatorProbs;
  for (char c : letters) {
    if (c < 'a' || c >= 'a' + kNumOperators) {
      Fail(ErrorCode::kUsage, std::string("unknown operator '") + c + "'");
    }
    probs[size_t(c - 'a')] = kDefaultOperatorProbs[size_t(c - 'a')];
  }
  return probs;
}

std::string OperatorLetters(const OperatorProbs& probs) {
  std::string s;
  for (int k = 0; k < kNumOperators; ++k) {
    if (probs[size_t(k)] > 0) s += char('a' + k);
  }
  return s.empty() ? "none" : s;
}

int BudgetForGrid(int g) {
  const double x = g <= 52 ? 100.0 + (g - 15) * (100.0 / 37.0)
                           : 200.0 + (g - 52) * (200.0 / 44.0);
  return std::max(16, int(std::lround(x)));
}

void CheckConfig(const SearchConfig& config, int width, int height) {
  Require(config.grid >= 2 && config.grid <= std::min({width, height, kMaxGrid}),
          "grid does not fit the image");
  Require(config.init_vertices >= 4, "at least the four corners are needed");
  Require(config.init_colors >= 1 && config.init_colors <= kMaxColors,
          "initial color count out of range");
  Require(config.init_candidates >= 1, "candidate sample must be non-empty");
  Require(config.max_iterations >= 0 && config.patience >= 0,
          "iteration limits must be non-negative");
  for (double p : config.op_probs) {
    Require(p >= 0 && p <= 1, "operator probability out of range");
  }
  const GridSpec grid(config.grid, width, height);
  if (Encode(MinimalModel(grid, QColor{})).size() > size_t(config.Budget())) {
    Fail(ErrorCode::kBudgetInfeasible, "budget below the smallest model");
  }
}

double Distortion(const Raster& render, const Raster& target, Metric metric) {
  return metric == Metric::kMse ? Mse(render, target)
                                : 1.0 - Ssim(render, target);
}

double Objective(double distortion, size_t bytes, int budget, double lambda) {
  const double over = bytes > size_t(budget) ? double(bytes - size_t(budget)) : 0;
  return distortion + lambda * over;
}

SearchState::SearchState(const Raster& target, TriModel model, Metric metric,
                         int budget, double lambda)
    : target_(&target),
      targets_(VertexTargets(target, model.grid)),
      metric_(metric),
      budget_(budget),
      model_(std::move(model)),
      mesh_(MeshFor(model_.grid, model_.vertices.occupied)),
      render_(Render(model_)),
      err_(size_t(target.width) * target.height) {
  if (render_.width != target.width || render_.height != target.height) {
    Fail(ErrorCode::kDimensionMismatch, "model and target differ in size");
  }
  for (size_t p = 0; p < err_.size(); ++p) {
    err_[p] = PixelError(&render_.rgb[3 * p], &target.rgb[3 * p]);
    sse_ += err_[p];
  }
  bytes_ = Encode(model_).size();
  distortion_ = metric_ == Metric::kMse
                    ? double(sse_) / double(target.rgb.size())
                    : Distortion(render_, target, metric_);
  lambda_ = lambda >= 0 ? lambda
                        : kLambdaPerByte * (distortion_ > 0 ? distortion_ : 1.0);
  objective_ = Objective(distortion_, bytes_, budget_, lambda_);
}

TriModel SearchState::Mutate(Rng& rng, const OperatorProbs& probs) const {
  TriModel c = model_;
  if (std::all_of(probs.begin(), probs.end(), [](double p) { return p <= 0; })) {
    return c;
  }
  std::array<bool, kNumOperators> include{};
  do {
    for (int k = 0; k < kNumOperators; ++k) {
      include[size_t(k)] = rng.Chance(probs[size_t(k)]);
    }
  } while (std::none_of(include.begin(), include.end(), [](bool b) { return b; }));

  const GridSpec& grid = c.grid;
  const int n = grid.NumPoints(), g = grid.g();
  auto& occ = c.vertices.occupied;
  auto& idx = c.vertices.color_index;
  auto& entries = c.colors.entries;
  auto pick = [&](bool want_occupied, bool allow_corner) {
    std::vector<int> ids;
    for (int p = 0; p < n; ++p) {
      if (bool(occ[size_t(p)]) == want_occupied &&
          (allow_corner || !grid.IsCorner(p))) {
        ids.push_back(p);
      }
    }
    return ids.empty() ? -1 : ids[size_t(rng.Below(int(ids.size())))];
  };
  auto nearest = [&](int p) {
    return uint8_t(NearestEntry(c.colors, targets_[size_t(p)]));
  };

  if (include[kDisplaceVertex]) {
    const int v = pick(true, false);
    if (v >= 0) {
      const int i = grid.Column(v), j = grid.Row(v);
      std::vector<int> moves;
      const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
      for (int d = 0; d < 4; ++d) {
        const int ni = i + di[d], nj = j + dj[d];
        if (ni < 0 || nj < 0 || ni >= g || nj >= g) continue;
        if (!occ[size_t(grid.Index(ni, nj))]) moves.push_back(grid.Index(ni, nj));
      }
      if (!moves.empty()) {
        const int to = moves[size_t(rng.Below(int(moves.size())))];
        occ[size_t(to)] = 1;
        idx[size_t(to)] = idx[size_t(v)];
        occ[size_t(v)] = 0;
        idx[size_t(v)] = 0;
      }
    }
  }
  if (include[kAddVertex]) {
    const int u = pick(false, false);
    if (u >= 0) {
      occ[size_t(u)] = 1;
      idx[size_t(u)] = nearest(u);
    }
  }
  if (include[kRemoveVertex]) {
    const int v = pick(true, false);
    if (v >= 0) {
      occ[size_t(v)] = 0;
      idx[size_t(v)] = 0;
    }
  }
  if (include[kRecolorVertex]) {
    const int v = pick(true, true);
    idx[size_t(v)] = uint8_t(rng.Below(c.colors.size()));
  }
  if (include[kAddColor] && c.colors.size() < kMaxColors) {
    // Split the entry whose vertices have the most spread in target color
    // along its widest channel.
    const int m = c.colors.size();
    std::vector<std::array<double, 3>> sum(static_cast<size_t>(m)),
        sq(static_cast<size_t>(m));
    std::vector<int> count(size_t(m), 0);
    for (int p = 0; p < n; ++p) {
      if (!occ[size_t(p)]) continue;
      const YCoCgF& t = targets_[size_t(p)];
      const double ch[3] = {t.y, t.co, t.cg};
      const size_t k = idx[size_t(p)];
      ++count[k];
      for (int q = 0; q < 3; ++q) {
        sum[k][size_t(q)] += ch[q];
        sq[k][size_t(q)] += ch[q] * ch[q];
      }
    }
    int split = -1, channel = 0;
    double best = -1;
    for (int k = 0; k < m; ++k) {
      if (count[size_t(k)] == 0) continue;
      double total = 0, widest = -1;
      int wc = 0;
      for (int q = 0; q < 3; ++q) {
        const double mean = sum[size_t(k)][size_t(q)] / count[size_t(k)];
        const double var = sq[size_t(k)][size_t(q)] / count[size_t(k)] - mean * mean;
        total += var;
        if (var > widest) {
          widest = var;
          wc = q;
        }
      }
      if (total > best) {
        best = total;
        split = k;
        channel = wc;
      }
    }
    if (split >= 0) {
      QColor lo = entries[size_t(split)].color, hi = lo;
      lo[channel] = uint8_t(std::max(0, lo[channel] - 1));
      hi[channel] = uint8_t(std::min(kChannelLevels - 1, hi[channel] + 1));
      entries[size_t(split)].color = lo;
      entries.push_back({hi, 0});
      // Only the split entry's vertices choose between the two halves;
      // other assignments may have been tuned by earlier mutations.
      const QColor halves[2] = {lo, hi};
      const uint8_t slots[2] = {uint8_t(split), uint8_t(m)};
      for (int p = 0; p < n; ++p) {
        if (!occ[size_t(p)] || idx[size_t(p)] != split) continue;
        const double d0 = DistanceSquared(Dequantize(halves[0]), targets_[size_t(p)]);
        const double d1 = DistanceSquared(Dequantize(halves[1]), targets_[size_t(p)]);
        idx[size_t(p)] = slots[d1 < d0 ? 1 : 0];
      }
    }
  }
  if (include[kRemoveColor] && c.colors.size() > 1) {
    const int e = rng.Below(c.colors.size());
    std::vector<int> orphans;
    for (int p = 0; p < n; ++p) {
      if (!occ[size_t(p)]) continue;
      if (idx[size_t(p)] == e) {
        orphans.push_back(p);
      } else if (idx[size_t(p)] > e) {
        --idx[size_t(p)];
      }
    }
    entries.erase(entries.begin() + e);
    for (int p : orphans) idx[size_t(p)] = nearest(p);
  }
  if (include[kPerturbColor]) {
    QColor& col = entries[size_t(rng.Below(c.colors.size()))].color;
    const int channel = rng.Below(3);
    col[channel] = uint8_t(std::clamp(col[channel] + rng.Sign(), 0,
                                      kChannelLevels - 1));
  }
  Canonicalize(c);
  return c;
}

SearchState::Patch SearchState::Repaint(const TriModel& candidate,
                                        DelaunayMesh& mesh) const {
  const int n = model_.grid.NumPoints();
  const auto& before = model_.vertices.occupied;
  const auto& after = candidate.vertices.occupied;
  const uint64_t start = mesh.stamp_counter();
  for (int p = 0; p < n; ++p) {
    if (before[size_t(p)] && !after[size_t(p)]) mesh.Remove(p);
  }
  for (int p = 0; p < n; ++p) {
    if (!before[size_t(p)] && after[size_t(p)]) mesh.Insert(p);
  }
  std::vector<uint8_t> dirty(size_t(mesh.NumSlots()), 0);
  for (int t = 0; t < mesh.NumSlots(); ++t) {
    const DelaunayMesh::Tri& tri = mesh.tri(t);
    if (tri.alive && !tri.IsGhost() && tri.stamp > start) dirty[size_t(t)] = 1;
  }
  for (int p = 0; p < n; ++p) {
    if (before[size_t(p)] && after[size_t(p)] &&
        !(model_.VertexColor(p) == candidate.VertexColor(p))) {
      for (int t : mesh.SolidStar(p)) dirty[size_t(t)] = 1;
    }
  }
  Patch patch;
  const Raster& target = *target_;
  auto color_of = [&](int id) { return candidate.VertexColor(id); };
  for (int t = 0; t < mesh.NumSlots(); ++t) {
    if (!dirty[size_t(t)]) continue;
    ShadeTriangle(mesh, mesh.tri(t).v, target.width, target.height, color_of,
                  [&](int p, const Rgb& rgb) {
                    const int32_t e =
                        PixelError(rgb.data(), &target.rgb[3 * size_t(p)]);
                    patch.pixels.push_back(p);
                    patch.rgb.insert(patch.rgb.end(), rgb.begin(), rgb.end());
                    patch.err.push_back(e);
                    patch.sse_delta += e - err_[size_t(p)];
                  });
  }
  return patch;
}

SearchState::Score SearchState::ScorePatch(const TriModel& candidate,
                                           const Patch& patch) const {
  Score s;
  s.bytes = Encode(candidate).size();
  if (metric_ == Metric::kMse) {
    s.distortion = double(sse_ + patch.sse_delta) / double(target_->rgb.size());
  } else {
    Raster r = render_;
    for (size_t k = 0; k < patch.pixels.size(); ++k) {
      std::copy_n(&patch.rgb[3 * k], 3, &r.rgb[3 * size_t(patch.pixels[k])]);
    }
    s.distortion = Distortion(r, *target_, metric_);
  }
  s.objective = Objective(s.distortion, s.bytes, budget_, lambda_);
  return s;
}

SearchState::Score SearchState::Evaluate(const TriModel& candidate) const {
  DelaunayMesh mesh = mesh_;
  return ScorePatch(candidate, Repaint(candidate, mesh));
}

bool SearchState::TryAccept(const TriModel& candidate) {
  DelaunayMesh mesh = mesh_;
  const Patch patch = Repaint(candidate, mesh);
  const Score s = ScorePatch(candidate, patch);
  if (!(s.objective < objective_)) return false;
  for (size_t k = 0; k < patch.pixels.size(); ++k) {
    const size_t p = size_t(patch.pixels[k]);
    std::copy_n(&patch.rgb[3 * k], 3, &render_.rgb[3 * p]);
    err_[p] = patch.err[k];
  }
  sse_ += patch.sse_delta;
  mesh_ = std::move(mesh);
  model_ = candidate;
  bytes_ = s.bytes;
  distortion_ = s.distortion;
  objective_ = s.objective;
  return true;
}

SearchResult StochasticEncode(const Raster& target, const SearchConfig& config) {
  CheckConfig(config, target.width, target.height);
  SearchResult result;
  // The greedy init ignores size; starting the climb inside the budget keeps
  // it from trading away palette entries for their index bits.
  SearchState state(
      target,
      ShrinkToBudget(target, InitStochastic(target, config), config.Budget()),
      config.metric, config.Budget(), config.lambda);
  SearchStats& stats = result.stats;
  stats.lambda = state.lambda();
  stats.initial_objective = state.objective();
  Rng rng(DeriveSeed(config.seed, 1));
  const bool any_op = std::any_of(config.op_probs.begin(), config.op_probs.end(),
                                  [](double p) { return p > 0; });
  int since_accept = 0;
  while (any_op && stats.iterations < config.max_iterations &&
         since_accept < config.patience) {
    ++stats.iterations;
    if (state.TryAccept(state.Mutate(rng, config.op_probs))) {
      ++stats.accepted;
      stats.accepted_objectives.push_back(state.objective());
      since_accept = 0;
    } else {
      ++since_accept;
    }
  }
  stats.final_objective = state.objective();
  result.model = ShrinkToBudget(target, state.model(), config.Budget());
  return result;
}

SearchResult Search(const Raster& target, const SearchConfig& config,
                    Algorithm algorithm) {
  CheckConfig(config, target.width, target.height);
  if (algorithm == Algorithm::kStochastic) {
    return StochasticEncode(target, config);
  }
  SearchResult result;
  result.model = BaselineEncode(target, config);
  return result;
}

}  // namespace trithumb
