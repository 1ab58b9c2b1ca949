#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "trithumb/bitstream.h"
#include "trithumb/color.h"
#include "trithumb/error.h"
#include "trithumb/image_io.h"
#include "trithumb/metrics.h"
#include "trithumb/raster.h"
#include "trithumb/search.h"

namespace trithumb {
namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kContract;
}

// Smooth gradients plus a few hard edges, so every operator has work.
Raster Synthetic(int w, int h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double cx = w * (0.3 + 0.4 * double(rng() % 100) / 100);
  const double cy = h * (0.3 + 0.4 * double(rng() % 100) / 100);
  Raster r(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      uint8_t* p = r.At(x, y);
      const bool disc = std::hypot(x - cx, y - cy) < w / 4.0;
      p[0] = uint8_t(disc ? 230 : 255 * x / w);
      p[1] = uint8_t(disc ? 40 : 255 * y / h);
      p[2] = uint8_t(x + 2 * y < w ? 200 : 60);
    }
  }
  return r;
}

TriModel RandomModel(std::mt19937_64& rng, const GridSpec& grid,
                     const std::vector<QColor>& palette, int one_in) {
  std::vector<Vertex> vertices;
  for (int p = 0; p < grid.NumPoints(); ++p) {
    if (grid.IsCorner(p) || int(rng() % uint64_t(one_in)) == 0) {
      vertices.push_back({p, palette[rng() % palette.size()]});
    }
  }
  return MakeModel(grid, vertices);
}

std::vector<QColor> SortedColors(const TriModel& m) {
  std::vector<QColor> out;
  for (const ColorEntry& e : m.colors.entries) out.push_back(e.color);
  std::sort(out.begin(), out.end(), [](QColor a, QColor b) {
    return std::tie(a.y, a.co, a.cg) < std::tie(b.y, b.co, b.cg);
  });
  return out;
}

bool CornersPresent(const TriModel& m) {
  for (int c : m.grid.Corners()) {
    if (!m.vertices.occupied[size_t(c)]) return false;
  }
  return true;
}

SearchConfig SmallConfig() {
  SearchConfig cfg;
  cfg.grid = 12;
  cfg.budget_bytes = 60;
  cfg.init_vertices = 50;
  cfg.max_iterations = 1500;
  cfg.patience = 500;
  return cfg;
}

TEST_SUITE("search") {

TEST_CASE("objective examples") {
  CHECK(Objective(12.5, 150, 200, 3.0) == 12.5);
  CHECK(Objective(12.5, 200, 200, 3.0) == 12.5);
  CHECK(Objective(12.5, 210, 200, 3.0) == 12.5 + 30.0);
  for (double lambda : {1e-6, 0.5, 100.0}) {
    CHECK(Objective(7.0, 210, 200, lambda) < Objective(7.0, 220, 200, lambda));
  }
}

TEST_CASE("budget follows the grid") {
  CHECK(BudgetForGrid(15) == 100);
  CHECK(BudgetForGrid(52) == 200);
  CHECK(BudgetForGrid(96) == 400);
  for (int g = 3; g < 255; ++g) CHECK(BudgetForGrid(g) <= BudgetForGrid(g + 1));
}

TEST_CASE("with lambda zero candidates rank by distortion alone") {
  const Raster target = Synthetic(48, 40, 1);
  const GridSpec grid(9, 48, 40);
  std::mt19937_64 rng(77);
  const std::vector<QColor> palette = {{5, 30, 33}, {40, 20, 50}, {60, 35, 31},
                                       {20, 44, 12}, {33, 33, 33}};
  const SearchState state(target, RandomModel(rng, grid, palette, 3),
                          Metric::kMse, 20, 0.0);
  for (int k = 0; k < 20; ++k) {
    const TriModel a = RandomModel(rng, grid, palette, 2);
    const TriModel b = RandomModel(rng, grid, palette, 4);
    const double da = Mse(Render(a), target), db = Mse(Render(b), target);
    const SearchState::Score sa = state.Evaluate(a), sb = state.Evaluate(b);
    CHECK(sa.objective == doctest::Approx(da).epsilon(1e-12));
    CHECK(sb.objective == doctest::Approx(db).epsilon(1e-12));
    CHECK((sa.objective < sb.objective) == (da < db));
  }
}

TEST_CASE("baseline removes the brute-force argmin at every step") {
  const Raster target = Synthetic(40, 40, 2);
  SearchConfig cfg;
  cfg.grid = 10;
  cfg.budget_bytes = 24;
  std::vector<int> removed;
  const TriModel result = BaselineEncode(target, cfg, &removed);
  REQUIRE(removed.size() > 50);
  CHECK(Encode(result).size() <= 24);

  const TriModel start = BaselineStart(target, cfg);
  std::vector<Vertex> current;
  for (int p = 0; p < start.grid.NumPoints(); ++p) {
    current.push_back({p, start.VertexColor(p)});
  }
  for (int id : removed) {
    int best = -1;
    int64_t best_sse = 0;
    for (size_t k = 0; k < current.size(); ++k) {
      if (start.grid.IsCorner(current[k].index)) continue;
      std::vector<Vertex> trial = current;
      trial.erase(trial.begin() + std::ptrdiff_t(k));
      const int64_t sse = SquaredError(Render(MakeModel(start.grid, trial)), target);
      if (best < 0 || sse < best_sse) {  // ascending ids: ties keep the lowest
        best = current[k].index;
        best_sse = sse;
      }
    }
    REQUIRE(id == best);
    current.erase(std::find_if(current.begin(), current.end(),
                               [&](const Vertex& v) { return v.index == id; }));
  }
}

TEST_CASE("baseline on a constant image renders it exactly") {
  const QColor q{37, 30, 35};
  const Rgb rgb = QColorToRgb(q);
  Raster target(60, 50);
  for (int p = 0; p < 60 * 50; ++p) {
    std::copy(rgb.begin(), rgb.end(), target.rgb.begin() + 3 * p);
  }
  SearchConfig cfg;
  cfg.grid = 20;
  cfg.budget_bytes = 40;
  const TriModel m = BaselineEncode(target, cfg);
  CHECK(Render(m) == target);
  CHECK(m.colors.size() == 1);
  CHECK(Encode(m).size() <= 40);
}

TEST_CASE("baseline puts small triangles where the image is busy") {
  const Raster target =
      ReadImage(std::string(TRITHUMB_TEST_DATA) + "/corpus/astronaut.png");
  SearchConfig cfg;
  const TriModel m = BaselineEncode(target, cfg);
  CHECK(Encode(m).size() <= 200);

  const int w = target.width, h = target.height;
  const std::vector<double> luma = Luma(target);
  std::vector<std::pair<double, int>> gradient;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const double gx = luma[size_t(y * w + x + 1)] - luma[size_t(y * w + x - 1)];
      const double gy = luma[size_t((y + 1) * w + x)] - luma[size_t((y - 1) * w + x)];
      gradient.push_back({std::hypot(gx, gy), y * w + x});
    }
  }
  std::sort(gradient.begin(), gradient.end());

  std::vector<double> area(size_t(w) * h, 0);
  for (const Triangle& t : Delaunay(m.grid, m.vertices).triangles) {
    PixelPoint a = m.grid.ToPixel(t[0]), b = m.grid.ToPixel(t[1]),
               c = m.grid.ToPixel(t[2]);
    if (Orient2d(a, b, c) < 0) std::swap(b, c);
    const double size = double(Orient2d(a, b, c)) / 2;
    RasterizeTriangle(a, b, c, w, h, [&](int x, int y, int64_t, int64_t,
                                         int64_t) { area[size_t(y * w + x)] = size; });
  }
  const size_t decile = gradient.size() / 10;
  double low = 0, high = 0;
  for (size_t k = 0; k < decile; ++k) {
    low += area[size_t(gradient[k].second)];
    high += area[size_t(gradient[gradient.size() - 1 - k].second)];
  }
  CHECK(high < low);
}

TEST_CASE("mutations repeat for a fixed seed") {
  const Raster target = Synthetic(64, 64, 3);
  SearchConfig cfg = SmallConfig();
  const SearchState state(target, InitStochastic(target, cfg), Metric::kMse,
                          cfg.Budget(), 1.0);
  Rng r1(42), r2(42);
  for (int k = 0; k < 10000; ++k) {
    const TriModel a = state.Mutate(r1, kDefaultOperatorProbs);
    const TriModel b = state.Mutate(r2, kDefaultOperatorProbs);
    REQUIRE(a == b);
  }
}

TEST_CASE("color perturbation changes one channel of one entry by one") {
  const Raster target = Synthetic(50, 50, 4);
  const GridSpec grid(8, 50, 50);
  const std::vector<QColor> palette = {{10, 20, 30}, {20, 40, 25}, {30, 15, 45},
                                       {40, 30, 20}, {50, 45, 35}};
  std::mt19937_64 gen(5);
  const SearchState state(target, RandomModel(gen, grid, palette, 2),
                          Metric::kMse, 100, 1.0);
  const std::vector<QColor> before = SortedColors(state.model());
  REQUIRE(before.size() == palette.size());
  Rng rng(8);
  for (int k = 0; k < 500; ++k) {
    const TriModel m = state.Mutate(rng, OperatorSubset("g"));
    CHECK(m.vertices.occupied == state.model().vertices.occupied);
    const std::vector<QColor> after = SortedColors(m);
    REQUIRE(after.size() == before.size());
    int changed = 0;
    for (size_t e = 0; e < before.size(); ++e) {
      for (int c = 0; c < 3; ++c) {
        const int d = int(after[e][c]) - int(before[e][c]);
        if (d != 0) {
          CHECK(std::abs(d) == 1);
          ++changed;
        }
      }
    }
    CHECK(changed == 1);
    for (int p = 0; p < grid.NumPoints(); ++p) {
      if (!m.vertices.occupied[size_t(p)]) continue;
      const QColor a = m.VertexColor(p), b = state.model().VertexColor(p);
      CHECK(std::abs(a.y - b.y) + std::abs(a.co - b.co) + std::abs(a.cg - b.cg) <= 1);
    }
  }
}

TEST_CASE("vertex removal leaves a corners-only model alone") {
  const Raster target = Synthetic(40, 40, 5);
  const GridSpec grid(10, 40, 40);
  const TriModel corners = MinimalModel(grid, {30, 31, 32});
  const SearchState state(target, corners, Metric::kMse, 100, 1.0);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    CHECK(state.Mutate(rng, OperatorSubset("c")) == corners);
  }
}

TEST_CASE("incremental scores match full renders") {
  for (Metric metric : {Metric::kMse, Metric::kSsim}) {
    const Raster target = Synthetic(70, 60, 6);
    SearchConfig cfg = SmallConfig();
    SearchState state(target, InitStochastic(target, cfg), metric, 60, 0.05);
    Rng rng(9);
    for (int k = 0; k < 800; ++k) {
      const TriModel cand = state.Mutate(rng, kDefaultOperatorProbs);
      const Raster full = Render(cand);
      const SearchState::Score s = state.Evaluate(cand);
      REQUIRE(s.bytes == Encode(cand).size());
      REQUIRE(s.distortion == doctest::Approx(Distortion(full, target, metric))
                                  .epsilon(1e-12));
      if (state.TryAccept(cand)) {
        REQUIRE(state.render() == full);
        REQUIRE(state.sse() == SquaredError(full, target));
      }
    }
  }
}

TEST_CASE("initial vertices gather on a disc boundary") {
  const int w = 96, h = 96;
  const double cx = 47.5, cy = 47.5, radius = 25;
  Raster target(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const uint8_t v = std::hypot(x - cx, y - cy) < radius ? 20 : 235;
      uint8_t* p = target.At(x, y);
      p[0] = p[1] = p[2] = v;
    }
  }
  SearchConfig cfg;
  cfg.grid = 20;
  cfg.init_vertices = 60;
  const TriModel m = InitStochastic(target, cfg);
  const double cell = double(w - 1) / (cfg.grid - 1);
  int near = 0, total = 0;
  for (int p = 0; p < m.grid.NumPoints(); ++p) {
    if (!m.vertices.occupied[size_t(p)] || m.grid.IsCorner(p)) continue;
    const PixelPoint q = m.grid.ToPixel(p);
    ++total;
    if (std::abs(std::hypot(q.x - cx, q.y - cy) - radius) <= 2 * cell) ++near;
  }
  CHECK(total == 56);
  CHECK(near >= 0.6 * total);
}

TEST_CASE("two-color target clusters to two exact colors") {
  // With 51 pixels and g = 11 the averaging boxes tile the image exactly,
  // and the color edge falls between two boxes.
  const Rgb left = {200, 30, 40}, right = {20, 90, 210};
  Raster target(51, 51);
  for (int y = 0; y < 51; ++y) {
    for (int x = 0; x < 51; ++x) {
      const Rgb& c = x < 28 ? left : right;
      std::copy(c.begin(), c.end(), target.At(x, y));
    }
  }
  SearchConfig cfg;
  cfg.grid = 11;
  cfg.init_vertices = 40;
  const TriModel m = InitStochastic(target, cfg);
  CHECK(m.colors.size() == 2);
  const QColor ql = Quantize(RgbToYCoCg(left[0], left[1], left[2]));
  const QColor qr = Quantize(RgbToYCoCg(right[0], right[1], right[2]));
  for (int p = 0; p < m.grid.NumPoints(); ++p) {
    if (!m.vertices.occupied[size_t(p)]) continue;
    CHECK(m.VertexColor(p) == (m.grid.ToPixel(p).x < 28 ? ql : qr));
  }
}

TEST_CASE("four initial vertices means corners only") {
  const Raster target = Synthetic(40, 40, 7);
  SearchConfig cfg = SmallConfig();
  cfg.init_vertices = 4;
  const TriModel m = InitStochastic(target, cfg);
  CHECK(m.NumVertices() == 4);
  CHECK(CornersPresent(m));
}

TEST_CASE("stochastic search honors the budget and repeats exactly") {
  const Raster target = Synthetic(80, 64, 8);
  for (int budget : {30, 60, 120}) {
    SearchConfig cfg = SmallConfig();
    cfg.budget_bytes = budget;
    const SearchResult a = StochasticEncode(target, cfg);
    const SearchResult b = StochasticEncode(target, cfg);
    CHECK(Encode(a.model).size() <= size_t(budget));
    CHECK(a.model == b.model);
    CHECK(Encode(a.model) == Encode(b.model));
    CHECK(CornersPresent(a.model));
    CHECK(!Validate(a.model));
    const std::vector<double>& j = a.stats.accepted_objectives;
    CHECK(int(j.size()) == a.stats.accepted);
    for (size_t k = 1; k < j.size(); ++k) CHECK(j[k] < j[k - 1]);
    if (!j.empty()) CHECK(j.front() < a.stats.initial_objective);
  }
}

TEST_CASE("different seeds explore differently") {
  const Raster target = Synthetic(80, 64, 9);
  SearchConfig cfg = SmallConfig();
  const TriModel a = StochasticEncode(target, cfg).model;
  cfg.seed = 2;
  const TriModel b = StochasticEncode(target, cfg).model;
  CHECK(!(a == b));
}

TEST_CASE("every intermediate model keeps its corners") {
  const Raster target = Synthetic(60, 60, 10);
  SearchConfig cfg = SmallConfig();
  SearchState state(target, InitStochastic(target, cfg), Metric::kMse, 60, 0.1);
  Rng rng(3);
  for (int k = 0; k < 2000; ++k) {
    const TriModel cand = state.Mutate(rng, kDefaultOperatorProbs);
    REQUIRE(CornersPresent(cand));
    REQUIRE(!Validate(cand));
    state.TryAccept(cand);
  }
}

TEST_CASE("configuration errors") {
  const Raster target = Synthetic(30, 30, 11);
  SearchConfig cfg;
  cfg.grid = 31;
  CHECK(CodeOf([&] { CheckConfig(cfg, 30, 30); }) == ErrorCode::kContract);
  cfg.grid = 10;
  cfg.budget_bytes = 5;
  CHECK(CodeOf([&] { Search(target, cfg, Algorithm::kBaseline); }) ==
        ErrorCode::kBudgetInfeasible);
  CHECK(CodeOf([&] { Search(target, cfg, Algorithm::kStochastic); }) ==
        ErrorCode::kBudgetInfeasible);
  CHECK(CodeOf([] { OperatorSubset("abz"); }) == ErrorCode::kUsage);
  CHECK(OperatorLetters(OperatorSubset("gca")) == "acg");
  CHECK(OperatorLetters(OperatorSubset("none")) == "none");
  CHECK(OperatorSubset("all") == kDefaultOperatorProbs);
}

}  // TEST_SUITE

}  // namespace
}  // namespace trithumb
