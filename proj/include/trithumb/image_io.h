#ifndef TRITHUMB_IMAGE_IO_H_
#define TRITHUMB_IMAGE_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "trithumb/model.h"

namespace trithumb {

// Whole-file helpers. Throw Error(kIo).
std::vector<uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, const std::vector<uint8_t>& bytes);

// PNG (any bit depth or color type, alpha dropped, gray expanded) or binary
// PPM, chosen by the file's signature. Throws Error(kIo).
Raster ReadImage(const std::string& path);
// PNG unless the path ends in ".ppm". Throws Error(kIo).
void WriteImage(const std::string& path, const Raster& image);

std::vector<uint8_t> EncodePng(const Raster& image);
Raster DecodePng(const std::vector<uint8_t>& bytes);

// Center-crops to the target aspect ratio and resamples with an area filter.
Raster FitToSize(const Raster& image, int width, int height);

}  // namespace trithumb

#endif  // TRITHUMB_IMAGE_IO_H_
