#include "trithumb/entropy.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "trithumb/error.h"

namespace trithumb {
namespace {

// Floors each positive weight to its share of 2^bits (minimum 1) and puts the
// remainder on the largest entry. If the minimums overshoot, every admissible
// entry starts at 1 and the rest of the range is shared out instead.
void Quantize(std::span<const uint64_t> weights, int bits,
              std::vector<uint32_t>& out) {
  const uint64_t total = uint64_t(1) << bits;
  unsigned __int128 sum = 0;
  uint64_t admissible = 0;
  for (uint64_t w : weights) {
    sum += w;
    admissible += w > 0;
  }
  Require(sum > 0, "distribution has no admissible symbol");
  Require(admissible <= total, "alphabet too large for the model precision");
  auto fill = [&](uint64_t base, uint64_t range) {
    out.assign(weights.size(), 0);
    uint64_t assigned = 0;
    for (size_t k = 0; k < weights.size(); ++k) {
      if (weights[k] == 0) continue;
      const uint64_t q = uint64_t((unsigned __int128)weights[k] * range / sum);
      out[k] = uint32_t(base ? base + q : std::max<uint64_t>(q, 1));
      assigned += out[k];
    }
    return assigned;
  };
  uint64_t assigned = fill(0, total);
  if (assigned > total) assigned = fill(1, total - admissible);
  const auto big = std::max_element(out.begin(), out.end());
  *big += uint32_t(total - assigned);
}

}  // namespace

FreqTable FreqTable::FromWeights(int first, std::span<const uint64_t> weights) {
  FreqTable t;
  t.first_ = first;
  const auto admissible =
      std::count_if(weights.begin(), weights.end(), [](uint64_t w) { return w > 0; });
  t.bits_ = admissible > (1 << (kProbBits - 1)) ? kWideProbBits : kProbBits;
  Quantize(weights, t.bits_, t.freq_);
  t.cum_.resize(t.freq_.size());
  uint32_t acc = 0;
  for (size_t k = 0; k < t.freq_.size(); ++k) {
    t.cum_[k] = acc;
    acc += t.freq_[k];
  }
  return t;
}

uint32_t FreqTable::freq(int symbol) const {
  if (symbol < first_ || symbol > last()) return 0;
  return freq_[symbol - first_];
}

int FreqTable::Lookup(uint32_t slot) const {
  // Last start <= slot; zero-frequency entries share their successor's start
  // and are skipped by taking the last match.
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), slot);
  return first_ + int(it - cum_.begin()) - 1;
}

double FreqTable::Bits(int symbol) const {
  const uint32_t f = freq(symbol);
  Require(f > 0, "symbol not admissible");
  return bits_ - std::log2(double(f));
}

BinaryModel BinaryModel::FromWeights(uint64_t w_false, uint64_t w_true) {
  // Two-entry case of Quantize, without the allocation. The floors never
  // overshoot the total here, so only a surplus needs settling.
  const unsigned __int128 sum = (unsigned __int128)w_false + w_true;
  Require(sum > 0, "distribution has no admissible symbol");
  constexpr uint64_t total = uint64_t(1) << kProbBits;
  auto share = [&](uint64_t w) -> uint64_t {
    if (w == 0) return 0;
    return std::max<uint64_t>(uint64_t((unsigned __int128)w * total / sum), 1);
  };
  const uint64_t q0 = share(w_false);
  uint64_t q1 = share(w_true);
  if (q1 > q0) q1 += total - q0 - q1;
  return {uint32_t(q1)};
}

double BinaryModel::Bits(bool bit) const {
  const uint32_t f = bit ? f_true : (1u << kProbBits) - f_true;
  Require(f > 0, "symbol not admissible");
  return kProbBits - std::log2(double(f));
}

BinaryModel OccupancyModel(int remaining_vertices, int remaining_points) {
  Require(remaining_points >= 1 && remaining_vertices >= 0 &&
              remaining_vertices <= remaining_points,
          "occupancy counts out of range");
  return BinaryModel::FromWeights(
      uint64_t(remaining_points - remaining_vertices),
      uint64_t(remaining_vertices));
}

FreqTable TruncatedBinomial(int n, int m, int lo, int hi) {
  Require(n >= 0 && m >= 1, "binomial parameters out of range");
  lo = std::max(lo, 0);
  hi = std::min(hi, n);
  Require(lo <= hi, "binomial support is empty");
  std::vector<uint64_t> w(size_t(hi - lo + 1), 0);
  if (m == 1) {
    // All mass at n.
    Require(hi == n, "binomial support excludes the only outcome");
    w.back() = 1;
    return FreqTable::FromWeights(lo, w);
  }
  using u128 = unsigned __int128;
  const int mode = std::clamp((n + 1) / m, lo, hi);
  const uint64_t q = uint64_t(m - 1);
  w[mode - lo] = uint64_t(1) << 40;
  // w(k+1) / w(k) = (n - k) / ((k + 1)(m - 1))
  for (int k = mode; k < hi; ++k) {
    w[k + 1 - lo] = uint64_t(u128(w[k - lo]) * uint64_t(n - k) /
                             (u128(k + 1) * q));
  }
  for (int k = mode; k > lo; --k) {
    w[k - 1 - lo] = uint64_t(u128(w[k - lo]) * uint64_t(k) * q /
                             u128(uint64_t(n - k + 1)));
  }
  // Zero weights are still in the support.
  for (uint64_t& x : w) x = std::max<uint64_t>(x, 1);
  return FreqTable::FromWeights(lo, w);
}

void RansEncoder::Put(uint32_t start, uint32_t freq, int bits) {
  Require(freq > 0, "symbol not admissible");
  symbols_.push_back({start, freq, uint32_t(bits)});
}

void RansEncoder::Put(const FreqTable& table, int symbol) {
  Put(table.freq(symbol) ? table.start(symbol) : 0, table.freq(symbol),
      table.precision());
}

void RansEncoder::PutBit(BinaryModel model, bool bit) {
  const uint32_t f0 = (1u << kProbBits) - model.f_true;
  if (bit) {
    Put(f0, model.f_true, kProbBits);
  } else {
    Put(0, f0, kProbBits);
  }
}

std::vector<uint8_t> RansEncoder::Finish() const {
  std::vector<uint8_t> reversed;
  uint32_t x = kRansLow;
  for (auto it = symbols_.rbegin(); it != symbols_.rend(); ++it) {
    const uint32_t x_max = ((kRansLow >> it->bits) << 8) * it->freq;
    while (x >= x_max) {
      reversed.push_back(uint8_t(x & 0xff));
      x >>= 8;
    }
    x = ((x / it->freq) << it->bits) + (x % it->freq) + it->start;
  }
  std::vector<uint8_t> out;
  out.reserve(reversed.size() + 4);
  for (int k = 0; k < 4; ++k) out.push_back(uint8_t(x >> (8 * k)));
  out.insert(out.end(), reversed.rbegin(), reversed.rend());
  return out;
}

RansDecoder::RansDecoder(std::span<const uint8_t> bytes) : bytes_(bytes) {
  if (bytes.size() < 4) Fail(ErrorCode::kTruncated, "missing coder state");
  state_ = uint32_t(bytes[0]) | uint32_t(bytes[1]) << 8 |
           uint32_t(bytes[2]) << 16 | uint32_t(bytes[3]) << 24;
  pos_ = 4;
  if (state_ < kRansLow || state_ >= (kRansLow << 8)) {
    Fail(ErrorCode::kCorrupt, "coder state out of range");
  }
}

void RansDecoder::Renormalize() {
  while (state_ < kRansLow) {
    if (pos_ >= bytes_.size()) Fail(ErrorCode::kTruncated, "payload truncated");
    state_ = (state_ << 8) | bytes_[pos_++];
  }
}

void RansDecoder::Decode(uint32_t start, uint32_t freq, int bits) {
  const uint32_t mask = (1u << bits) - 1;
  state_ = freq * (state_ >> bits) + (state_ & mask) - start;
  Renormalize();
}

int RansDecoder::Get(const FreqTable& table) {
  const uint32_t slot = state_ & (table.total() - 1);
  const int symbol = table.Lookup(slot);
  Decode(table.start(symbol), table.freq(symbol), table.precision());
  return symbol;
}

bool RansDecoder::GetBit(BinaryModel model) {
  const uint32_t f0 = (1u << kProbBits) - model.f_true;
  const uint32_t slot = state_ & ((1u << kProbBits) - 1);
  const bool bit = slot >= f0;
  if (bit) {
    Decode(f0, model.f_true, kProbBits);
  } else {
    Decode(0, f0, kProbBits);
  }
  return bit;
}

void RansDecoder::Finish() const {
  if (state_ != kRansLow || pos_ != bytes_.size()) {
    Fail(ErrorCode::kCorrupt, "payload does not end cleanly");
  }
}

int64_t FixedLog2(uint64_t x) {
  Require(x >= 1, "log of zero");
  const int ip = std::bit_width(x) - 1;
  // Mantissa in [2^32, 2^33).
  uint64_t m = ip >= 32 ? x >> (ip - 32) : x << (32 - ip);
  int64_t frac = 0;
  for (int i = 0; i < 16; ++i) {
    m = uint64_t((unsigned __int128)m * m >> 32);
    frac <<= 1;
    if (m >= (uint64_t(1) << 33)) {
      m >>= 1;
      frac |= 1;
    }
  }
  return (int64_t(ip) << 16) | frac;
}

}  // namespace trithumb
