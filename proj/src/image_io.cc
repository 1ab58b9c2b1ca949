#include "trithumb/image_io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "trithumb/error.h"
#include "trithumb/raster.h"

namespace trithumb {
namespace {

struct ReadCursor {
  const std::vector<uint8_t>* bytes;
  size_t pos;
};

void PngError(png_structp png, png_const_charp msg) {
  // libpng requires this not to return; unwinding through its C frames is
  // avoided by longjmp back into DecodePng / EncodePng.
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  *text = msg;
  png_longjmp(png, 1);
}

void PngWarning(png_structp, png_const_charp) {}

void ReadCallback(png_structp png, png_bytep out, png_size_t n) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + n > cur->bytes->size()) png_error(png, "truncated PNG");
  std::memcpy(out, cur->bytes->data() + cur->pos, n);
  cur->pos += n;
}

void WriteCallback(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorCode::kIo, "cannot read " + path);
  return bytes;
}

void WriteFileBytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
}

Raster DecodePng(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    Fail(ErrorCode::kIo, "not a PNG file");
  }
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error,
                                           PngError, PngWarning);
  if (!png) Fail(ErrorCode::kIo, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{&bytes, 0};
  Raster out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    Fail(ErrorCode::kIo, "PNG decode failed: " + error);
  }
  png_set_read_fn(png, &cursor, ReadCallback);
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  if (w == 0 || h == 0 || w > 1 << 15 || h > 1 << 15) {
    png_error(png, "unsupported image size");
  }
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_read_update_info(png, info);
  out = Raster(int(w), int(h));
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = out.At(0, int(y));
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::vector<uint8_t> EncodePng(const Raster& image) {
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error,
                                            PngError, PngWarning);
  if (!png) Fail(ErrorCode::kIo, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  std::vector<uint8_t> out;
  std::vector<png_bytep> rows(size_t(image.height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    Fail(ErrorCode::kIo, "PNG encode failed: " + error);
  }
  png_set_write_fn(png, &out, WriteCallback, nullptr);
  png_set_IHDR(png, info, png_uint_32(image.width), png_uint_32(image.height),
               8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  for (int y = 0; y < image.height; ++y) {
    rows[size_t(y)] = const_cast<png_bytep>(image.At(0, y));
  }
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Raster ReadImage(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    return DecodePpm(std::string(bytes.begin(), bytes.end()));
  }
  return DecodePng(bytes);
}

void WriteImage(const std::string& path, const Raster& image) {
  if (EndsWith(path, ".ppm")) {
    const std::string ppm = EncodePpm(image);
    WriteFileBytes(path, std::vector<uint8_t>(ppm.begin(), ppm.end()));
  } else {
    WriteFileBytes(path, EncodePng(image));
  }
}

Raster FitToSize(const Raster& image, int width, int height) {
  Require(width > 0 && height > 0 && image.width > 0 && image.height > 0,
          "empty image");
  if (image.width == width && image.height == height) return image;
  // Largest centered crop with the target aspect ratio.
  double cw = image.width, ch = image.height;
  if (cw * height > ch * width) {
    cw = ch * width / height;
  } else {
    ch = cw * height / width;
  }
  const double x0 = (image.width - cw) / 2, y0 = (image.height - ch) / 2;
  const double sx = cw / width, sy = ch / height;
  Raster out(width, height);
  // Each output pixel averages the source area it covers, with fractional
  // coverage at the edges. When enlarging this degenerates to nearest
  // neighbor, which is fine for the intended use.
  for (int y = 0; y < height; ++y) {
    const double ya = y0 + y * sy, yb = ya + sy;
    for (int x = 0; x < width; ++x) {
      const double xa = x0 + x * sx, xb = xa + sx;
      double acc[3] = {0, 0, 0}, area = 0;
      for (int v = int(std::floor(ya)); v < int(std::ceil(yb)); ++v) {
        const double wy = std::min<double>(v + 1, yb) - std::max<double>(v, ya);
        if (wy <= 0) continue;
        const int vv = std::clamp(v, 0, image.height - 1);
        for (int u = int(std::floor(xa)); u < int(std::ceil(xb)); ++u) {
          const double wx =
              std::min<double>(u + 1, xb) - std::max<double>(u, xa);
          if (wx <= 0) continue;
          const uint8_t* p = image.At(std::clamp(u, 0, image.width - 1), vv);
          for (int c = 0; c < 3; ++c) acc[c] += wx * wy * p[c];
          area += wx * wy;
        }
      }
      uint8_t* q = out.At(x, y);
      for (int c = 0; c < 3; ++c) {
        q[c] = uint8_t(std::clamp(std::lround(acc[c] / area), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace trithumb
