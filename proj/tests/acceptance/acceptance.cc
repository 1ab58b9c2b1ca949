// End-to-end checks of the codec, one line per criterion:
//
//   criterion <n> <PASS|FAIL>  <name>: <measurements>
//
// Usage: acceptance_tests [--only N[,N...]] [--iterations N] [--threads N]
// The exit status is 0 only if every selected criterion passes.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/delaunay_oracle.h"
#include "trithumb/bench.h"
#include "trithumb/bitstream.h"
#include "trithumb/entropy.h"
#include "trithumb/error.h"
#include "trithumb/image_io.h"
#include "trithumb/mesh.h"
#include "trithumb/metrics.h"
#include "trithumb/raster.h"
#include "trithumb/search.h"
#include "trithumb/triangulate.h"

namespace trithumb {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* fmt, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

struct Settings {
  int iterations = 20000;
  int threads = 1;
  std::string data = TRITHUMB_TEST_DATA;
};

const std::vector<BenchImage>& Corpus(const Settings& s) {
  static const std::vector<BenchImage> images =
      LoadCorpus(s.data + "/corpus", 221, 221);
  return images;
}

std::vector<BenchRecord> Sweep(const Settings& s, std::vector<int> grids,
                               std::vector<std::string> ops) {
  BenchOptions options;
  options.base.search.max_iterations = s.iterations;
  options.grids = std::move(grids);
  options.seeds = {1};
  options.op_sets = std::move(ops);
  options.threads = s.threads;
  return RunBench(Corpus(s), options);
}

TriModel RandomModel(std::mt19937_64& rng, int g, double max_density) {
  const GridSpec grid(g, 221, 221);
  const int palette_size = 1 + int(rng() % 32);
  std::vector<QColor> palette;
  for (int k = 0; k < palette_size; ++k) {
    palette.push_back(
        {uint8_t(rng() % 64), uint8_t(rng() % 64), uint8_t(rng() % 64)});
  }
  std::geometric_distribution<int> pick(0.3);
  const double density = max_density * double(rng() % 1000 + 1) / 1000;
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<Vertex> vertices;
  for (int p = 0; p < grid.NumPoints(); ++p) {
    if (grid.IsCorner(p) || unit(rng) < density) {
      vertices.push_back({p, palette[size_t(pick(rng)) % palette.size()]});
    }
  }
  return MakeModel(grid, vertices);
}

Outcome RoundTrip() {
  std::mt19937_64 rng(2024);
  const int grids[] = {2, 3, 15, 52, 96};
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const TriModel m = RandomModel(rng, grids[trial % 5], 1.0);
    try {
      if (!(Decode(Encode(m)) == m)) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  // g = 2 holds exactly the four corners; enumerate every assignment of
  // colors drawn from a six-color set to them.
  const QColor colors[6] = {{0, 0, 0},    {63, 63, 63}, {0, 63, 0},
                            {63, 0, 63},  {31, 32, 33}, {1, 62, 17}};
  const GridSpec g2(2, 221, 221);
  int exhaustive = 0;
  for (int code = 0; code < 6 * 6 * 6 * 6; ++code) {
    std::vector<Vertex> vs;
    for (int p = 0, c = code; p < 4; ++p, c /= 6) vs.push_back({p, colors[c % 6]});
    const TriModel m = MakeModel(g2, vs);
    if (!(Decode(Encode(m)) == m)) ++failures;
    ++exhaustive;
  }
  return {failures == 0, "1000 random models over g in {2,3,15,52,96}, " +
                             std::to_string(exhaustive) +
                             " exhaustive g=2 models, " +
                             std::to_string(failures) + " mismatches"};
}

Outcome TriangulationCoverage() {
  std::mt19937_64 rng(7);
  const int grids[] = {15, 30, 52, 96};
  int mismatches = 0, bad_pixels = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const TriModel m = RandomModel(rng, grids[trial % 4], 0.4);
    const GridSpec& grid = m.grid;

    // Encoder side: incremental mesh, points inserted in random order with
    // some detours through removals.
    std::vector<PixelPoint> pos;
    for (int p = 0; p < grid.NumPoints(); ++p) pos.push_back(grid.ToPixel(p));
    DelaunayMesh mesh(pos);
    const auto corners = grid.Corners();
    mesh.Build(corners);
    std::vector<int> order;
    for (int p = 0; p < grid.NumPoints(); ++p) {
      if (m.vertices.occupied[size_t(p)] && !grid.IsCorner(p)) order.push_back(p);
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (int p : order) {
      mesh.Insert(p);
      if (rng() % 4 == 0) {
        const int q = order[rng() % order.size()];
        if (mesh.Contains(q)) {
          mesh.Remove(q);
          mesh.Insert(q);
        }
      }
    }
    // Decoder side: batch triangulation of the decoded model.
    const TriModel decoded = Decode(Encode(m));
    const Triangulation tri = Delaunay(decoded.grid, decoded.vertices);
    if (!(mesh.Triangles() == tri)) ++mismatches;

    std::vector<int> count(size_t(grid.width()) * grid.height(), 0);
    for (const Triangle& t : tri.triangles) {
      PixelPoint a = grid.ToPixel(t[0]), b = grid.ToPixel(t[1]),
                 c = grid.ToPixel(t[2]);
      if (Orient2d(a, b, c) < 0) std::swap(b, c);
      RasterizeTriangle(a, b, c, grid.width(), grid.height(),
                        [&](int x, int y, int64_t, int64_t, int64_t) {
                          ++count[size_t(y) * grid.width() + x];
                        });
    }
    for (int c : count) bad_pixels += c != 1;
  }
  return {mismatches == 0 && bad_pixels == 0,
          "200 vertex sets at 221x221, " + std::to_string(mismatches) +
              " triangulation mismatches, " + std::to_string(bad_pixels) +
              " pixels not covered exactly once"};
}

Outcome DelaunayOracle() {
  std::mt19937_64 rng(11);
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    // Small lattices over assorted rectangles give many cocircular
    // quadruples, so the tie rule is exercised.
    const int g = 3 + int(rng() % 10);
    const int w = g + int(rng() % 60), h = g + int(rng() % 60);
    const GridSpec grid(g, w, h);
    VertexSet vs;
    vs.occupied.assign(size_t(grid.NumPoints()), 0);
    vs.color_index.assign(size_t(grid.NumPoints()), 0);
    for (int c : grid.Corners()) vs.occupied[size_t(c)] = 1;
    const int extra = int(rng() % 9);
    for (int k = 0; k < extra; ++k) vs.occupied[rng() % size_t(grid.NumPoints())] = 1;
    std::vector<int> ids;
    std::vector<PixelPoint> pts;
    for (int p = 0; p < grid.NumPoints(); ++p) {
      if (vs.occupied[size_t(p)]) {
        ids.push_back(p);
        pts.push_back(grid.ToPixel(p));
      }
    }
    Triangulation expected = oracle::BruteForce(pts);
    for (auto& t : expected.triangles) {
      for (int& v : t) v = ids[size_t(v)];
    }
    if (!(Delaunay(grid, vs) == expected)) ++mismatches;
  }
  return {mismatches == 0, "300 sets of at most 12 vertices, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome EntropyEfficiency(const Settings& s) {
  Outcome out;
  std::ostringstream detail;
  const std::vector<std::vector<uint64_t>> sources = {
      {90, 5, 5}, {70, 20, 10}, {99, 1}};
  for (const auto& w : sources) {
    const FreqTable table = FreqTable::FromWeights(0, w);
    std::mt19937_64 rng(42);
    std::discrete_distribution<int> dist(w.begin(), w.end());
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double entropy = 0;
    for (uint64_t x : w) entropy -= double(x) / total * std::log2(double(x) / total);
    RansEncoder enc;
    double info = 0;  // self-information of the drawn sequence, bits
    for (int k = 0; k < 100000; ++k) {
      const int sym = dist(rng);
      info -= std::log2(double(w[size_t(sym)]) / total);
      enc.Put(table, sym);
    }
    const double size = double(enc.Finish().size());
    const double gap = size / (info / 8) - 1;
    out.pass &= std::abs(gap) <= 0.01;
    detail << Fmt("H=%.3f bits: ", entropy) << size << " bytes vs "
           << Fmt("%.1f", info / 8) << Fmt(" (%+.3f%%); ", 100 * gap);
  }

  std::mt19937_64 rng(5);
  int sparse = 0, raw_wins = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int grids[] = {15, 30, 52, 70, 96};
    const TriModel m = RandomModel(rng, grids[trial % 5], 0.3);
    if (m.NumVertices() > 0.3 * m.grid.NumPoints()) continue;
    ++sparse;
    const SectionCosts c = MeasureSections(m);
    raw_wins += !(c.occupancy < c.occupancy_raw);
  }
  out.pass &= raw_wins == 0;
  detail << "adaptive occupancy beats raw on " << sparse - raw_wins << "/"
         << sparse << " sparse models; ";

  // Modeling choices on encoded corpus images. Each saving is relative to
  // the payload coded with the simpler alternative in place.
  SectionCosts sum;
  double payload = 0;
  for (const BenchImage& image : Corpus(s)) {
    const TriModel m = BaselineEncode(image.image, SearchConfig{});
    const SectionCosts c = MeasureSections(m);
    sum.frequencies += c.frequencies;
    sum.frequencies_uniform += c.frequencies_uniform;
    sum.occupancy += c.occupancy;
    sum.occupancy_raw += c.occupancy_raw;
    sum.indices += c.indices;
    sum.indices_frequency_only += c.indices_frequency_only;
    payload += c.deltas + c.frequencies + c.occupancy + c.indices;
  }
  const auto saving = [&](double ours, double simple) {
    return (simple - ours) / (payload - ours + simple);
  };
  const double binomial = saving(sum.frequencies, sum.frequencies_uniform);
  const double adaptive = saving(sum.occupancy, sum.occupancy_raw);
  const double spatial = saving(sum.indices, sum.indices_frequency_only);
  out.pass &= binomial > 0 && adaptive > 0 && spatial > 0;
  detail << Fmt("corpus savings: binomial frequencies %.2f%%", 100 * binomial)
         << Fmt(", adaptive occupancy over raw bits %.2f%%", 100 * adaptive)
         << Fmt(", spatial index order %.2f%%", 100 * spatial);
  out.detail = detail.str();
  return out;
}

Outcome SizeCalibration(const Settings& s,
                        std::map<int, double>* mean_bytes_out) {
  const std::vector<int> grids = {15, 30, 52, 70, 96};
  const std::vector<BenchRecord> records = Sweep(s, grids, {"all"});
  std::map<int, double> mean;
  std::map<int, int> n;
  for (const BenchRecord& r : records) {
    mean[r.grid] += double(r.bytes);
    ++n[r.grid];
  }
  Outcome out;
  std::ostringstream detail;
  detail << Corpus(s).size() << " images, mean bytes:";
  double previous = 0;
  for (int g : grids) {
    mean[g] /= n[g];
    detail << " g=" << g << Fmt(" %.1f", mean[g]);
    out.pass &= mean[g] > previous;
    previous = mean[g];
  }
  out.pass &= Corpus(s).size() >= 8;
  out.pass &= mean[15] >= 70 && mean[15] <= 160;
  out.pass &= mean[96] >= 280 && mean[96] <= 500;
  if (mean_bytes_out) *mean_bytes_out = mean;
  out.detail = detail.str();
  return out;
}

struct AblationResult {
  Outcome ordering;
  Outcome quality;
};

AblationResult Ablation(const Settings& s) {
  const std::vector<std::string> sets = {"none", "abc", "abcdg", "all"};
  const std::vector<BenchRecord> records = Sweep(s, {52}, sets);
  std::map<std::string, double> mean;
  for (const BenchRecord& r : records) mean[r.ops] += r.psnr;
  const double n = double(Corpus(s).size());
  AblationResult result;
  std::ostringstream detail;
  detail << Corpus(s).size() << " images at 200 bytes, " << s.iterations
         << " iterations, mean PSNR:";
  for (const std::string& set : sets) {
    mean[set] /= n;
    detail << ' ' << set << Fmt(" %.2f", mean[set]);
  }
  result.ordering.pass = Corpus(s).size() >= 8 && mean["none"] <= mean["abc"] &&
                         mean["abc"] <= mean["abcdg"] &&
                         mean["abcdg"] <= mean["all"] &&
                         mean["all"] >= mean["none"] + 0.5;
  detail << Fmt(", all minus init-only %+.2f dB", mean["all"] - mean["none"]);
  result.ordering.detail = detail.str();

  std::ostringstream q;
  double lo_p = 1e9, hi_p = 0, lo_s = 1e9, hi_s = -1;
  int outside = 0;
  for (const BenchRecord& r : records) {
    if (r.ops != "all") continue;
    lo_p = std::min(lo_p, r.psnr);
    hi_p = std::max(hi_p, r.psnr);
    lo_s = std::min(lo_s, r.ssim);
    hi_s = std::max(hi_s, r.ssim);
    const bool ok = r.psnr >= 15 && r.psnr <= 32 && r.ssim >= 0.3 && r.ssim <= 0.8;
    if (!ok) {
      ++outside;
      q << r.image << Fmt(" (%.2f dB", r.psnr) << Fmt(", SSIM %.3f) ", r.ssim);
    }
  }
  result.quality.pass = outside == 0;
  result.quality.detail = Fmt("PSNR %.2f", lo_p) + Fmt("..%.2f dB", hi_p) +
                          Fmt(", SSIM %.3f", lo_s) + Fmt("..%.3f", hi_s) +
                          (outside ? ", outside the range: " + q.str() : "");
  return result;
}

Outcome MetricValidation(const Settings& s) {
  Outcome out;
  std::mt19937_64 rng(1);
  Raster x(64, 48);
  for (uint8_t& v : x.rgb) v = uint8_t(rng());
  const double self = Ssim(x, x);
  out.pass &= std::abs(self - 1) <= 1e-9;

  std::ifstream in(s.data + "/ssim/golden.json");
  const nlohmann::json golden = nlohmann::json::parse(in);
  double worst = 0;
  for (const auto& entry : golden) {
    const Raster a = ReadImage(s.data + "/" + entry["a"].get<std::string>());
    const Raster b = ReadImage(s.data + "/" + entry["b"].get<std::string>());
    worst = std::max(worst, std::abs(Ssim(a, b) - entry["ssim"].get<double>()));
  }
  out.pass &= golden.size() == 10 && worst <= 1e-4;

  Raster a(32, 32), b(32, 32);
  std::fill(a.rgb.begin(), a.rgb.end(), 120);
  std::fill(b.rgb.begin(), b.rgb.end(), 136);
  const double psnr = Psnr(a, b);
  out.pass &= std::abs(psnr - 24.05) <= 0.01;
  out.detail = Fmt("SSIM(x,x)-1 = %.1e", self - 1) + ", " +
               std::to_string(golden.size()) +
               Fmt(" reference pairs, worst SSIM error %.2e", worst) +
               Fmt(", uniform offset 16 gives %.4f dB", psnr);
  return out;
}

Outcome Reproducibility(const Settings& s) {
  Outcome out;
  const Raster& image = Corpus(s).front().image;
  SearchConfig cfg;
  cfg.max_iterations = std::min(s.iterations, 3000);
  const std::vector<uint8_t> first = Encode(StochasticEncode(image, cfg).model);
  const std::vector<uint8_t> second = Encode(StochasticEncode(image, cfg).model);
  out.pass &= first == second;

  std::vector<BenchImage> small(Corpus(s).begin(), Corpus(s).begin() + 4);
  BenchOptions options;
  options.base.search.max_iterations = 500;
  options.grids = {15, 52};
  options.seeds = {1, 2};
  options.op_sets = {"abc", "all"};
  std::string csv[2];
  const int threads[2] = {1, 4};
  for (int k = 0; k < 2; ++k) {
    options.threads = threads[k];
    std::ostringstream o;
    WriteCsv(o, RunBench(small, options), false);
    csv[k] = o.str();
  }
  out.pass &= csv[0] == csv[1];
  const long rows = std::count(csv[0].begin(), csv[0].end(), '\n') - 1;
  out.detail = std::string(".tri ") + (first == second ? "identical" : "DIFFERENT") +
               " across two runs (" + std::to_string(first.size()) +
               " bytes); bench CSV with " + std::to_string(rows) + " rows " +
               (csv[0] == csv[1] ? "identical" : "DIFFERENT") +
               " with 1 and 4 threads";
  return out;
}

Outcome DecodeFuzz() {
  std::mt19937_64 rng(99);
  std::vector<std::vector<uint8_t>> seeds;
  const int grids[] = {2, 3, 8, 15, 30, 52, 70, 96};
  for (int k = 0; k < 40; ++k) {
    seeds.push_back(Encode(RandomModel(rng, grids[k % 8], 0.5)));
  }
  int structured = 0, decoded = 0, escaped = 0, invalid = 0;
  double slowest = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    std::vector<uint8_t> bytes;
    switch (trial % 4) {
      case 0:  // random bytes behind a plausible version nibble
        bytes.resize(rng() % 96);
        for (uint8_t& b : bytes) b = uint8_t(rng());
        if (!bytes.empty() && rng() % 2) bytes[0] = uint8_t((bytes[0] & 0x0F) | 0x10);
        break;
      case 1:  // bit flips
        bytes = seeds[rng() % seeds.size()];
        for (int f = 1 + int(rng() % 4); f > 0; --f) {
          bytes[rng() % bytes.size()] ^= uint8_t(1 << (rng() % 8));
        }
        break;
      case 2:  // truncation or extension
        bytes = seeds[rng() % seeds.size()];
        if (rng() % 2) {
          bytes.resize(rng() % (bytes.size() + 1));
        } else {
          for (int e = 1 + int(rng() % 8); e > 0; --e) bytes.push_back(uint8_t(rng()));
        }
        break;
      default:  // overwritten runs, header included
        bytes = seeds[rng() % seeds.size()];
        for (size_t at = rng() % bytes.size(), len = 1 + rng() % 6;
             len > 0 && at < bytes.size(); --len, ++at) {
          bytes[at] = uint8_t(rng());
        }
        break;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const TriModel m = Decode(bytes);
      ++decoded;
      invalid += Validate(m).has_value();
    } catch (const Error& e) {
      structured += e.code() != ErrorCode::kContract;
      escaped += e.code() == ErrorCode::kContract;
    } catch (...) {
      ++escaped;
    }
    slowest = std::max(slowest, std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start)
                                    .count());
  }
  return {escaped == 0 && invalid == 0 && slowest < 1.0,
          "100000 inputs: " + std::to_string(structured) + " format errors, " +
              std::to_string(decoded) + " decoded to valid models, " +
              std::to_string(escaped + invalid) + " other outcomes" +
              Fmt(", slowest case %.1f ms", 1000 * slowest)};
}

}  // namespace
}  // namespace trithumb

int main(int argc, char** argv) {
  using namespace trithumb;
  CLI::App app{"Acceptance checks"};
  Settings settings;
  settings.threads = DefaultThreads();
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--iterations", settings.iterations, "search iterations");
  app.add_option("--threads", settings.threads, "bench worker threads");
  CLI11_PARSE(app, argc, argv);

  auto selected = [&](int n) {
    return only.empty() || std::find(only.begin(), only.end(), n) != only.end();
  };
  bool all_pass = true;
  auto report = [&](int n, const char* name, const Outcome& o) {
    all_pass &= o.pass;
    std::printf("criterion %d %s  %s: %s\n", n, o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str());
    std::fflush(stdout);
  };
  auto run = [&](int n, const char* name, const std::function<Outcome()>& f) {
    if (!selected(n)) return;
    try {
      report(n, name, f());
    } catch (const std::exception& e) {
      report(n, name, {false, std::string("exception: ") + e.what()});
    }
  };

  run(1, "codec round trip", RoundTrip);
  run(2, "triangulation determinism and coverage", TriangulationCoverage);
  run(3, "Delaunay correctness", DelaunayOracle);
  run(4, "entropy efficiency", [&] { return EntropyEfficiency(settings); });
  run(5, "size calibration", [&] { return SizeCalibration(settings, nullptr); });
  if (selected(6) || selected(7)) {
    try {
      const AblationResult r = Ablation(settings);
      if (selected(6)) report(6, "ablation ordering", r.ordering);
      if (selected(7)) report(7, "quality plausibility", r.quality);
    } catch (const std::exception& e) {
      const Outcome failed{false, std::string("exception: ") + e.what()};
      if (selected(6)) report(6, "ablation ordering", failed);
      if (selected(7)) report(7, "quality plausibility", failed);
    }
  }
  run(8, "metric validation", [&] { return MetricValidation(settings); });
  run(9, "reproducibility", [&] { return Reproducibility(settings); });
  run(10, "decode robustness", DecodeFuzz);
  return all_pass ? 0 : 1;
}
