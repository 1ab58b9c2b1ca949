#include "trithumb/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "trithumb/bitstream.h"
#include "trithumb/error.h"
#include "trithumb/image_io.h"
#include "trithumb/metrics.h"
#include "trithumb/raster.h"

namespace trithumb {
namespace {

namespace fs = std::filesystem;

std::string Lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

const char* AlgorithmName(Algorithm a) {
  return a == Algorithm::kBaseline ? "baseline" : "stochastic";
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

struct Task {
  size_t image;
  int grid;
  uint64_t seed;
  std::string ops;
};

BenchRecord RunTask(const BenchImage& image, const Task& task,
                    const BenchOptions& options) {
  EncoderConfig cfg = options.base;
  cfg.search.grid = task.grid;
  cfg.search.seed = task.seed;
  cfg.search.op_probs = OperatorSubset(task.ops);

  const auto start = std::chrono::steady_clock::now();
  const SearchResult result = Search(image.image, cfg.search, cfg.algorithm);
  const std::vector<uint8_t> bytes = Encode(result.model);
  const auto stop = std::chrono::steady_clock::now();

  const QualityReport q = Measure(image.image, Render(result.model), bytes.size());
  BenchRecord r;
  r.image = image.id;
  r.algorithm = AlgorithmName(cfg.algorithm);
  r.grid = task.grid;
  r.budget = cfg.search.Budget();
  r.seed = task.seed;
  r.ops = task.ops;
  r.bytes = bytes.size();
  r.psnr = q.psnr;
  r.ssim = q.ssim;
  r.seconds = std::chrono::duration<double>(stop - start).count();
  return r;
}

}  // namespace

std::vector<BenchImage> LoadCorpus(const std::string& dir, int width,
                                   int height) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) Fail(ErrorCode::kIo, "not a directory: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string ext = Lower(entry.path().extension().string());
    if (entry.is_regular_file() && (ext == ".png" || ext == ".ppm")) {
      paths.push_back(entry.path());
    }
  }
  if (ec) Fail(ErrorCode::kIo, "cannot list " + dir + ": " + ec.message());
  if (paths.empty()) Fail(ErrorCode::kUsage, "no .png or .ppm images in " + dir);
  std::sort(paths.begin(), paths.end());

  std::vector<BenchImage> images;
  for (const fs::path& p : paths) {
    images.push_back({p.stem().string(),
                      FitToSize(ReadImage(p.string()), width, height)});
  }
  return images;
}

int DefaultThreads() {
  if (const char* env = std::getenv("TRITHUMB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BenchRecord> RunBench(const std::vector<BenchImage>& images,
                                  const BenchOptions& options) {
  if (images.empty()) Fail(ErrorCode::kUsage, "empty corpus");
  std::vector<Task> tasks;
  for (size_t i = 0; i < images.size(); ++i) {
    for (int grid : options.grids) {
      for (uint64_t seed : options.seeds) {
        for (const std::string& ops : options.op_sets) {
          OperatorSubset(ops);  // reject bad letters before any work starts
          tasks.push_back({i, grid, seed, ops});
        }
      }
    }
  }

  std::vector<BenchRecord> records(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      try {
        records[t] = RunTask(images[tasks[t].image], tasks[t], options);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int threads =
      std::clamp(options.threads, 1, std::max(1, int(tasks.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

void WriteCsv(std::ostream& out, const std::vector<BenchRecord>& records,
              bool timing) {
  out << "image,algorithm,grid,budget,seed,ops,bytes,psnr,ssim,seconds\n";
  for (const BenchRecord& r : records) {
    out << r.image << ',' << r.algorithm << ',' << r.grid << ',' << r.budget
        << ',' << r.seed << ',' << r.ops << ',' << r.bytes << ','
        << Fixed(r.psnr, 4) << ',' << Fixed(r.ssim, 6) << ','
        << (timing ? Fixed(r.seconds, 3) : "") << '\n';
  }
}

std::vector<ExternalRecord> ReadExternalCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kUsage, "external CSV is empty");
  const std::vector<std::string> header = SplitCsvLine(line);
  auto column = [&](const char* name, bool required) {
    for (size_t k = 0; k < header.size(); ++k) {
      if (Lower(header[k]) == name) return int(k);
    }
    if (required) {
      Fail(ErrorCode::kUsage, std::string("external CSV lacks column ") + name);
    }
    return -1;
  };
  const int codec = column("codec", true);
  const int bytes = column("bytes", true);
  const int psnr = column("psnr", true);
  const int ssim = column("ssim", true);
  const int setting = column("setting", false);

  std::vector<ExternalRecord> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() < header.size()) {
      Fail(ErrorCode::kUsage,
           "external CSV line " + std::to_string(number) + ": too few fields");
    }
    ExternalRecord r;
    r.codec = f[size_t(codec)];
    if (setting >= 0) r.setting = f[size_t(setting)];
    try {
      r.bytes = std::stod(f[size_t(bytes)]);
      r.psnr = std::stod(f[size_t(psnr)]);
      r.ssim = std::stod(f[size_t(ssim)]);
    } catch (const std::exception&) {
      Fail(ErrorCode::kUsage,
           "external CSV line " + std::to_string(number) + ": bad number");
    }
    out.push_back(r);
  }
  return out;
}

namespace {

// Groups in order of first appearance.
template <typename Rec, typename KeyFn>
std::vector<BenchSummary> Group(const std::vector<Rec>& records, KeyFn key) {
  std::vector<BenchSummary> rows;
  std::map<std::pair<std::string, std::string>, size_t> index;
  for (const Rec& r : records) {
    const auto k = key(r);
    auto [it, fresh] = index.emplace(k, rows.size());
    if (fresh) rows.push_back({k.first, k.second});
    BenchSummary& s = rows[it->second];
    ++s.count;
    s.bytes += double(r.bytes);
    s.psnr += r.psnr;
    s.ssim += r.ssim;
  }
  for (BenchSummary& s : rows) {
    s.bytes /= s.count;
    s.psnr /= s.count;
    s.ssim /= s.count;
  }
  return rows;
}

}  // namespace

std::vector<BenchSummary> Summarize(const std::vector<BenchRecord>& records) {
  return Group(records, [](const BenchRecord& r) {
    const std::string label =
        r.algorithm == "baseline" ? r.algorithm : "ops=" + r.ops;
    return std::make_pair(label, "g=" + std::to_string(r.grid) +
                                     " budget=" + std::to_string(r.budget));
  });
}

std::vector<BenchSummary> Summarize(const std::vector<ExternalRecord>& records) {
  return Group(records, [](const ExternalRecord& r) {
    return std::make_pair(r.codec, r.setting);
  });
}

void WriteSummary(std::ostream& out, const std::vector<BenchSummary>& rows) {
  for (const BenchSummary& s : rows) {
    out << s.label << ' ' << s.setting << "  n=" << s.count
        << "  bytes=" << Fixed(s.bytes, 1) << "  psnr=" << Fixed(s.psnr, 3)
        << "  ssim=" << Fixed(s.ssim, 4) << '\n';
  }
}

void WriteGnuplot(std::ostream& out, const std::vector<BenchSummary>& rows) {
  std::vector<std::string> labels;
  for (const BenchSummary& s : rows) {
    if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) {
      labels.push_back(s.label);
    }
  }
  bool first = true;
  for (const std::string& label : labels) {
    if (!first) out << "\n\n";
    first = false;
    out << "# " << label << "\n# bytes psnr ssim\n";
    std::vector<const BenchSummary*> curve;
    for (const BenchSummary& s : rows) {
      if (s.label == label) curve.push_back(&s);
    }
    std::stable_sort(curve.begin(), curve.end(),
                     [](auto* a, auto* b) { return a->bytes < b->bytes; });
    for (const BenchSummary* s : curve) {
      out << Fixed(s->bytes, 2) << ' ' << Fixed(s->psnr, 4) << ' '
          << Fixed(s->ssim, 6) << '\n';
    }
  }
}

}  // namespace trithumb
