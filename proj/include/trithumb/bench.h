#ifndef TRITHUMB_BENCH_H_
#define TRITHUMB_BENCH_H_

// Corpus benchmark: encode every image under every (grid, seed, operator
// set) and collect quality against size.
//
// CSV columns, always in this order and always with the header row:
//
//   image,algorithm,grid,budget,seed,ops,bytes,psnr,ssim,seconds
//
// `seconds` is wall time of the encode and is left empty unless timing was
// requested, so that two runs produce identical files.

#include <iosfwd>
#include <string>
#include <vector>

#include "trithumb/config.h"
#include "trithumb/model.h"

namespace trithumb {

struct BenchImage {
  std::string id;
  Raster image;
};

struct BenchRecord {
  std::string image;
  std::string algorithm;
  int grid = 0;
  int budget = 0;
  uint64_t seed = 0;
  std::string ops;
  size_t bytes = 0;
  double psnr = 0;
  double ssim = 0;
  double seconds = 0;
};

struct BenchOptions {
  EncoderConfig base;  // grid, seed and ops are overridden per task
  std::vector<int> grids;
  std::vector<uint64_t> seeds;
  std::vector<std::string> op_sets;  // letters, "none" or "all"
  int threads = 1;
  bool timing = false;
};

// Every .png and .ppm file in `dir`, sorted by name and fitted to the
// working size. Throws Error(kIo) for a missing directory and Error(kUsage)
// if no images are found.
std::vector<BenchImage> LoadCorpus(const std::string& dir, int width,
                                   int height);

// Default worker count: TRITHUMB_THREADS if set and positive, otherwise the
// hardware concurrency.
int DefaultThreads();

// Records are ordered image-major, then grid, seed and operator set, no
// matter how tasks were scheduled. Each task encodes with its own seed, so
// the output does not depend on the thread count.
std::vector<BenchRecord> RunBench(const std::vector<BenchImage>& images,
                                  const BenchOptions& options);

void WriteCsv(std::ostream& out, const std::vector<BenchRecord>& records,
              bool timing);

// Measurements from another codec. Required columns: codec, bytes, psnr,
// ssim. An optional `setting` column (a quality level, say) splits a codec
// into several points. Other columns are ignored.
struct ExternalRecord {
  std::string codec;
  std::string setting;
  double bytes = 0;
  double psnr = 0;
  double ssim = 0;
};
std::vector<ExternalRecord> ReadExternalCsv(const std::string& text);

// Mean over the images for one configuration, or over one external
// codec/setting.
struct BenchSummary {
  std::string label;  // operator set, algorithm or external codec
  std::string setting;  // grid and budget, or the external setting
  int count = 0;
  double bytes = 0;
  double psnr = 0;
  double ssim = 0;
};
std::vector<BenchSummary> Summarize(const std::vector<BenchRecord>& records);
std::vector<BenchSummary> Summarize(const std::vector<ExternalRecord>& records);

void WriteSummary(std::ostream& out, const std::vector<BenchSummary>& rows);

// One gnuplot data block per label ("bytes psnr ssim"), blocks separated
// by two blank lines so `index` selects a curve.
void WriteGnuplot(std::ostream& out, const std::vector<BenchSummary>& rows);

}  // namespace trithumb

#endif  // TRITHUMB_BENCH_H_
