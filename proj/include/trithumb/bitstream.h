#ifndef TRITHUMB_BITSTREAM_H_
#define TRITHUMB_BITSTREAM_H_

// The .tri file format. See FORMAT.md for the byte-level description.
//
//   header (69 bits, zero-padded to 9 bytes, most significant bit first)
//     version 4 | g 8 | width 12 | height 12 | colors-1 5 | vertices 16 |
//     delta sharpness for Y, Co, Cg, 4 bits each
//   rANS payload, in decode order
//     color table deltas, frequencies, occupancy, color indices

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trithumb/entropy.h"
#include "trithumb/model.h"

namespace trithumb {

constexpr int kFormatVersion = 1;
constexpr int kHeaderBytes = 9;
constexpr int kMidGray = 32;  // first prediction for every channel

struct Header {
  int version = kFormatVersion;
  int g = 0;
  int width = 0;
  int height = 0;
  int num_colors = 0;
  int num_vertices = 0;
  std::array<int, 3> sharpness = {0, 0, 0};
  bool operator==(const Header&) const = default;
};

std::array<uint8_t, kHeaderBytes> PackHeader(const Header& header);
// Throws Error(kTruncated), Error(kUnsupportedVersion),
// Error(kInconsistentHeader) or Error(kCorrupt) for nonzero padding.
Header UnpackHeader(std::span<const uint8_t> bytes);

// Throws Error(kContract) for invalid models.
std::vector<uint8_t> Encode(const TriModel& model);
// Throws Error with a format error code for malformed input; never reads
// outside `bytes`.
TriModel Decode(std::span<const uint8_t> bytes);

inline size_t EncodedSize(const TriModel& model) { return Encode(model).size(); }

// Prediction for the next value of a channel: the mean of the previous
// values rounded half up, or kMidGray for the first entry.
int PredictChannel(int sum, int count);

// Static delta model: value v in 0..63 gets weight floor(2^40 * t^|v - pred|)
// with t = kSharpness[param] / 256, computed by repeated integer
// multiplication.
extern const std::array<int, 16> kSharpness;
const FreqTable& DeltaModel(int param, int prediction);

// Ideal code lengths in bits for parts of the payload under the format's
// models and under simpler alternatives. Used to compare modeling choices.
struct SectionCosts {
  double deltas = 0;
  double frequencies = 0;          // truncated binomial
  double frequencies_uniform = 0;  // uniform over the same supports
  double occupancy = 0;            // adaptive remaining-count model
  double occupancy_fixed = 0;      // one global probability V_t / N_g
  double occupancy_raw = 0;        // one bit per non-corner point
  double indices = 0;              // spatial candidate order
  double indices_frequency_only = 0;
};
SectionCosts MeasureSections(const TriModel& model);

}  // namespace trithumb

#endif  // TRITHUMB_BITSTREAM_H_
