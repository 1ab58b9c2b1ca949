#include "trithumb/cli.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "trithumb/bench.h"
#include "trithumb/bitstream.h"
#include "trithumb/config.h"
#include "trithumb/image_io.h"
#include "trithumb/metrics.h"
#include "trithumb/raster.h"
#include "trithumb/search.h"

namespace trithumb {

int ExitStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kInconsistentHeader:
    case ErrorCode::kTruncated:
    case ErrorCode::kCorrupt:
    case ErrorCode::kDegenerateGeometry:
      return kExitFormat;
    case ErrorCode::kBudgetInfeasible:
      return kExitInfeasible;
    case ErrorCode::kContract:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kUsage:
      return kExitUsage;
  }
  return kExitUsage;
}

namespace {

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string ReadText(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void WriteText(const std::string& path, const std::string& text) {
  WriteFileBytes(path, std::vector<uint8_t>(text.begin(), text.end()));
}

// Encoder settings shared by encode, bench and config. Flags override the
// config file, which overrides the defaults.
struct EncoderFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void Register(CLI::App* app, bool per_task_flags) {
    app->add_option("--config", config_path, "key = value settings file");
    auto flag = [&](const char* name, const char* key, const char* help) {
      app->add_option_function<std::string>(
          name, [this, key](const std::string& v) { overrides.emplace_back(key, v); },
          help);
    };
    if (per_task_flags) {
      flag("--grid", "grid", "grid size g (2..255)");
      flag("--seed", "seed", "random seed");
      flag("--ops", "ops", "enabled mutation operators, e.g. abcdefg or none");
    }
    flag("--budget", "budget", "byte budget, or auto");
    flag("--algorithm", "algorithm", "baseline or stochastic");
    flag("--metric", "metric", "mse or ssim");
    flag("--iters", "iterations", "maximum search iterations");
    flag("--patience", "patience", "stop after this many rejections in a row");
    flag("--lambda", "lambda", "size penalty per byte over budget, or auto");
    flag("--init-vertices", "init_vertices", "vertices placed before the search");
    flag("--init-colors", "init_colors", "colors before the search");
    flag("--width", "width", "working width inputs are fitted to");
    flag("--height", "height", "working height inputs are fitted to");
  }

  EncoderConfig Resolve() const {
    EncoderConfig cfg;
    if (!config_path.empty()) ApplyConfig(ReadText(config_path), cfg);
    for (const auto& [key, value] : overrides) SetConfigValue(key, value, cfg);
    return cfg;
  }
};

int CmdEncode(const std::string& input, const std::string& output,
              const std::string& preview, const EncoderFlags& flags,
              std::ostream& err) {
  const EncoderConfig cfg = flags.Resolve();
  const Raster target = FitToSize(ReadImage(input), cfg.width, cfg.height);
  const SearchResult result = Search(target, cfg.search, cfg.algorithm);
  const std::vector<uint8_t> bytes = Encode(result.model);
  WriteFileBytes(output, bytes);
  const Raster render = Render(result.model);
  if (!preview.empty()) WriteImage(preview, render);

  const QualityReport q = Measure(target, render, bytes.size());
  err << "bytes " << bytes.size() << "  psnr " << Format("%.2f", q.psnr)
      << " dB  ssim " << Format("%.4f", q.ssim) << "  vertices "
      << result.model.NumVertices() << "  colors "
      << result.model.colors.size() << "  iterations "
      << result.stats.iterations << "  accepted " << result.stats.accepted
      << '\n';
  return kExitOk;
}

TriModel ReadTri(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  return Decode(bytes);
}

int CmdDecode(const std::string& input, const std::string& output, int scale) {
  if (scale < 1) Fail(ErrorCode::kUsage, "--scale must be at least 1");
  WriteImage(output, RenderScaled(ReadTri(input), scale));
  return kExitOk;
}

int CmdRender(const std::string& input, const std::string& output, int scale,
              bool wireframe) {
  if (scale < 1) Fail(ErrorCode::kUsage, "--scale must be at least 1");
  TriModel model = ReadTri(input);
  Raster image = RenderScaled(model, scale);
  model.grid = model.grid.Rescaled(image.width, image.height);
  if (wireframe) DrawWireframe(model, image, Rgb{255, 255, 255});
  WriteImage(output, image);
  return kExitOk;
}

int CmdReport(const std::string& input, const std::string& reference,
              std::ostream& out) {
  const std::vector<uint8_t> bytes = ReadFileBytes(input);
  const TriModel model = Decode(bytes);
  const Header h = UnpackHeader(bytes);
  out << "file        " << input << '\n'
      << "bytes       " << bytes.size() << '\n'
      << "size        " << h.width << 'x' << h.height << '\n'
      << "grid        " << h.g << '\n'
      << "vertices    " << h.num_vertices << '\n'
      << "colors      " << h.num_colors << '\n'
      << "sharpness   " << h.sharpness[0] << ' ' << h.sharpness[1] << ' '
      << h.sharpness[2] << '\n';
  const SectionCosts c = MeasureSections(model);
  out << "bits        header " << kHeaderBytes * 8 << "  colors "
      << Format("%.1f", c.deltas) << "  frequencies "
      << Format("%.1f", c.frequencies) << "  occupancy "
      << Format("%.1f", c.occupancy) << "  indices "
      << Format("%.1f", c.indices) << '\n';
  if (!reference.empty()) {
    const Raster ref = FitToSize(ReadImage(reference), h.width, h.height);
    const QualityReport q = Measure(ref, Render(model), bytes.size());
    out << "psnr        " << Format("%.3f", q.psnr) << " dB\n"
        << "ssim        " << Format("%.5f", q.ssim) << '\n'
        << "mse         " << Format("%.3f", q.mse) << '\n';
  }
  return kExitOk;
}

struct BenchFlags {
  std::string corpus;
  std::vector<int> grids = {52};
  std::vector<uint64_t> seeds = {1};
  std::vector<std::string> ops = {"all"};
  std::string csv_path;
  std::string summary_path;
  std::string gnuplot_path;
  std::string external_csv;
  int threads = 0;
  bool timing = false;
};

int CmdBench(const BenchFlags& b, const EncoderFlags& flags, std::ostream& out,
             std::ostream& err) {
  BenchOptions options;
  options.base = flags.Resolve();
  options.grids = b.grids;
  options.seeds = b.seeds;
  options.op_sets = b.ops;
  options.threads = b.threads > 0 ? b.threads : DefaultThreads();
  options.timing = b.timing;

  std::vector<ExternalRecord> external;
  if (!b.external_csv.empty()) external = ReadExternalCsv(ReadText(b.external_csv));

  const std::vector<BenchImage> images =
      LoadCorpus(b.corpus, options.base.width, options.base.height);
  const std::vector<BenchRecord> records = RunBench(images, options);

  std::ostringstream csv;
  WriteCsv(csv, records, b.timing);
  if (b.csv_path.empty()) {
    out << csv.str();
  } else {
    WriteText(b.csv_path, csv.str());
  }

  std::vector<BenchSummary> rows = Summarize(records);
  const std::vector<BenchSummary> ext = Summarize(external);
  rows.insert(rows.end(), ext.begin(), ext.end());
  std::ostringstream summary;
  WriteSummary(summary, rows);
  if (b.summary_path.empty()) {
    (b.csv_path.empty() ? err : out) << summary.str();
  } else {
    WriteText(b.summary_path, summary.str());
  }
  if (!b.gnuplot_path.empty()) {
    std::ostringstream plot;
    WriteGnuplot(plot, rows);
    WriteText(b.gnuplot_path, plot.str());
  }
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Triangle-mesh thumbnail codec"};
  app.require_subcommand(1);

  std::string input, output, preview, reference;
  int scale = 1;
  bool wireframe = false;

  EncoderFlags encode_flags;
  CLI::App* encode = app.add_subcommand("encode", "image to .tri");
  encode->add_option("input", input, "PNG or PPM image")->required();
  encode->add_option("output", output, ".tri file to write")->required();
  encode->add_option("--preview", preview, "also write the reconstruction");
  encode_flags.Register(encode, true);

  CLI::App* decode = app.add_subcommand("decode", ".tri to image");
  decode->add_option("input", input, ".tri file")->required();
  decode->add_option("output", output, "PNG or PPM (by extension)")->required();
  decode->add_option("--scale", scale, "integer upscaling factor");

  CLI::App* render = app.add_subcommand("render", ".tri to image with overlays");
  render->add_option("input", input, ".tri file")->required();
  render->add_option("output", output, "PNG or PPM (by extension)")->required();
  render->add_option("--scale", scale, "integer upscaling factor");
  render->add_flag("--wireframe", wireframe, "draw triangle edges");

  CLI::App* report = app.add_subcommand("report", "describe a .tri file");
  report->add_option("input", input, ".tri file")->required();
  report->add_option("--reference", reference, "original image for PSNR/SSIM");

  BenchFlags bench_flags;
  EncoderFlags bench_encoder;
  CLI::App* bench = app.add_subcommand("bench", "encode a corpus, write CSV");
  bench->add_option("corpus", bench_flags.corpus, "directory of images")
      ->required();
  bench->add_option("--grids", bench_flags.grids, "grid sizes")->delimiter(',');
  bench->add_option("--seeds", bench_flags.seeds, "seeds")->delimiter(',');
  bench->add_option("--ops", bench_flags.ops, "operator sets, e.g. none,abc,all")
      ->delimiter(',');
  bench->add_option("--csv", bench_flags.csv_path, "CSV output (default stdout)");
  bench->add_option("--summary", bench_flags.summary_path, "summary output");
  bench->add_option("--gnuplot", bench_flags.gnuplot_path, "gnuplot data output");
  bench->add_option("--external-csv", bench_flags.external_csv,
                    "other codecs' measurements (codec,bytes,psnr,ssim)");
  bench->add_option("--threads", bench_flags.threads,
                    "worker threads (default TRITHUMB_THREADS or all cores)");
  bench->add_flag("--timing", bench_flags.timing, "record encode wall time");
  bench_encoder.Register(bench, false);

  EncoderFlags config_flags;
  CLI::App* config = app.add_subcommand("config", "print effective settings");
  config_flags.Register(config, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*encode) return CmdEncode(input, output, preview, encode_flags, err);
    if (*decode) return CmdDecode(input, output, scale);
    if (*render) return CmdRender(input, output, scale, wireframe);
    if (*report) return CmdReport(input, reference, out);
    if (*bench) return CmdBench(bench_flags, bench_encoder, out, err);
    if (*config) {
      out << FormatConfig(config_flags.Resolve());
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << '\n';
    return ExitStatusFor(e.code());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace trithumb
