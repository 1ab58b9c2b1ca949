#ifndef TRITHUMB_CONFIG_H_
#define TRITHUMB_CONFIG_H_

// Flat key = value configuration files for the encoder.
//
//   # comment
//   grid = 52
//   budget = 200        # or "auto"
//   ops = abcdefg       # or individual p_a ... p_g
//
// Keys: algorithm, budget, grid, width, height, init_vertices, init_colors,
// init_candidates, ops, p_a ... p_g, iterations, patience, seed, lambda
// ("auto" or a number), metric (mse or ssim).

#include <string>

#include "trithumb/search.h"

namespace trithumb {

struct EncoderConfig {
  SearchConfig search;
  Algorithm algorithm = Algorithm::kStochastic;
  int width = 221;  // working size inputs are fitted to
  int height = 221;
};

// Applies every assignment in `text` on top of `config`. Throws
// Error(kUsage) naming the line for unknown keys or bad values.
void ApplyConfig(const std::string& text, EncoderConfig& config);

// Sets one key; same errors as ApplyConfig.
void SetConfigValue(const std::string& key, const std::string& value,
                    EncoderConfig& config);

// Every key with its current value, one per line, readable by ApplyConfig.
std::string FormatConfig(const EncoderConfig& config);

}  // namespace trithumb

#endif  // TRITHUMB_CONFIG_H_
