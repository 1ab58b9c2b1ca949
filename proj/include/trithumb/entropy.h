#ifndef TRITHUMB_ENTROPY_H_
#define TRITHUMB_ENTROPY_H_

// rANS entropy coder and the probability models used by the .tri format.
//
// The coder follows the byte-oriented rANS layout: 32-bit state, lower bound
// 2^23, renormalization one byte at a time. rANS is last-in-first-out, so the
// encoder buffers (start, frequency) pairs in decode order and runs them
// backwards on Finish. Adaptive models are therefore computed in the forward
// direction by the caller, exactly as the decoder will see them.

#include <cstdint>
#include <span>
#include <vector>

namespace trithumb {

constexpr int kProbBits = 12;        // default model precision
constexpr int kWideProbBits = 20;    // for alphabets too large for 12 bits
constexpr uint32_t kRansLow = 1u << 23;

// Quantized distribution over the contiguous symbols first()..last().
// Frequencies sum to exactly 2^precision(); zero-weight symbols get
// frequency 0 and cannot be coded.
class FreqTable {
 public:
  FreqTable() = default;

  // Quantizes integer weights: each positive weight gets
  // max(1, floor(w * 2^bits / sum)) and the rounding surplus goes to the
  // first largest entry. If the minimums push the total past 2^bits, each
  // positive weight instead gets 1 + floor(w * (2^bits - admissible) / sum).
  // Precision is 12 bits unless more than 2048 symbols have positive weight,
  // then 20. Requires a positive weight.
  static FreqTable FromWeights(int first, std::span<const uint64_t> weights);

  int first() const { return first_; }
  int last() const { return first_ + int(freq_.size()) - 1; }
  int size() const { return int(freq_.size()); }
  int precision() const { return bits_; }
  uint32_t total() const { return 1u << bits_; }

  // Zero for symbols outside the table.
  uint32_t freq(int symbol) const;
  uint32_t start(int symbol) const { return cum_[symbol - first_]; }
  // Symbol whose interval contains `slot` < total().
  int Lookup(uint32_t slot) const;
  // Code length in bits; requires freq(symbol) > 0.
  double Bits(int symbol) const;

 private:
  int first_ = 0;
  int bits_ = kProbBits;
  std::vector<uint32_t> freq_;
  std::vector<uint32_t> cum_;
};

// Two-symbol model at 12-bit precision. The true symbol occupies the top
// f_true slots. f_true = 0 or 4096 is deterministic and costs nothing.
struct BinaryModel {
  uint32_t f_true = 0;

  // Same quantization rule as FreqTable::FromWeights.
  static BinaryModel FromWeights(uint64_t w_false, uint64_t w_true);
  double Bits(bool bit) const;
};

// P(occupied) = remaining_vertices / remaining_points.
BinaryModel OccupancyModel(int remaining_vertices, int remaining_points);

// Binomial(n, 1/m) restricted to [lo, hi] ∩ [0, n] and renormalized. Masses
// are evaluated in 40-bit fixed point by walking the term ratio outward from
// the mode, so the table is identical on every platform. Throws
// Error(kContract) if the support is empty or m < 1.
FreqTable TruncatedBinomial(int n, int m, int lo, int hi);

class RansEncoder {
 public:
  void Put(uint32_t start, uint32_t freq, int bits);
  void Put(const FreqTable& table, int symbol);
  void PutBit(BinaryModel model, bool bit);

  // Encodes everything buffered so far. The stream begins with the 4-byte
  // little-endian final state; an empty message is exactly those 4 bytes.
  std::vector<uint8_t> Finish() const;

  size_t num_symbols() const { return symbols_.size(); }

 private:
  struct Entry {
    uint32_t start;
    uint32_t freq;
    uint32_t bits;
  };
  std::vector<Entry> symbols_;
};

class RansDecoder {
 public:
  // Throws Error(kTruncated) if fewer than 4 bytes are available and
  // Error(kCorrupt) if the initial state is out of range.
  explicit RansDecoder(std::span<const uint8_t> bytes);

  int Get(const FreqTable& table);
  bool GetBit(BinaryModel model);

  // Throws Error(kCorrupt) unless the state returned to its initial value
  // and every byte was consumed.
  void Finish() const;

 private:
  void Decode(uint32_t start, uint32_t freq, int bits);
  void Renormalize();

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
  uint32_t state_ = 0;
};

// log2(x) in 16.16 fixed point, x >= 1, integer arithmetic only.
int64_t FixedLog2(uint64_t x);

// Code length of a symbol with the given frequency, 16.16 fixed point.
inline int64_t FixedBits(uint32_t freq, int bits) {
  return (int64_t(bits) << 16) - FixedLog2(freq);
}

}  // namespace trithumb

#endif  // TRITHUMB_ENTROPY_H_
