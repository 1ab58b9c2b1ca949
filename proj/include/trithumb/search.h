#ifndef TRITHUMB_SEARCH_H_
#define TRITHUMB_SEARCH_H_

// Model search: a greedy pruning baseline and a stochastic hill climber.
//
// Both minimize J = D + lambda * max(0, bytes - budget), where D is the mean
// squared RGB error (or 1 - SSIM) of the rendering and bytes is the exact
// encoded size. A final pruning pass guarantees bytes <= budget.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "trithumb/color.h"
#include "trithumb/mesh.h"
#include "trithumb/model.h"
#include "trithumb/rng.h"

namespace trithumb {

enum class Metric { kMse, kSsim };

// Mutation actions, in the order they are applied within one mutation.
enum Operator {
  kDisplaceVertex,  // a
  kAddVertex,       // b
  kRemoveVertex,    // c
  kRecolorVertex,   // d
  kAddColor,        // e
  kRemoveColor,     // f
  kPerturbColor,    // g
};
constexpr int kNumOperators = 7;
using OperatorProbs = std::array<double, kNumOperators>;
constexpr OperatorProbs kDefaultOperatorProbs = {0.4, 0.2, 0.2, 0.2,
                                                 0.05, 0.05, 0.2};

// Default probabilities for the operators named by letters a..g, zero for
// the rest. "" or "none" disables all, "all" enables all. Throws Error(kUsage).
OperatorProbs OperatorSubset(std::string_view letters);
// Letters of the operators with nonzero probability, or "none".
std::string OperatorLetters(const OperatorProbs& probs);

// Byte budget used when none is configured: 100 bytes at g = 15, 200 at
// g = 52 and 400 at g = 96, linear in between and beyond.
int BudgetForGrid(int g);

// Relative weight of one byte of overshoot: 10^(0.25/10) - 1, so that one
// byte costs as much as 0.25 dB of PSNR at the initial distortion.
constexpr double kLambdaPerByte = 0.0592537251772889;

struct SearchConfig {
  int budget_bytes = 0;  // 0 selects BudgetForGrid(grid)
  int grid = 52;
  int init_vertices = 300;
  int init_colors = 8;
  int init_candidates = 64;  // sampled lattice points per greedy step
  OperatorProbs op_probs = kDefaultOperatorProbs;
  int max_iterations = 20000;
  int patience = 2000;  // iterations without an accepted mutation
  uint64_t seed = 1;
  double lambda = -1;  // negative: kLambdaPerByte * initial distortion
  Metric metric = Metric::kMse;

  int Budget() const {
    return budget_bytes > 0 ? budget_bytes : BudgetForGrid(grid);
  }
};

// Throws Error(kContract) for out-of-range settings or a grid that does not
// fit the target, and Error(kBudgetInfeasible) if even the smallest model
// exceeds the budget.
void CheckConfig(const SearchConfig& config, int width, int height);

double Distortion(const Raster& render, const Raster& target, Metric metric);
double Objective(double distortion, size_t bytes, int budget, double lambda);

struct SearchStats {
  int iterations = 0;
  int accepted = 0;
  double lambda = 0;
  double initial_objective = 0;
  double final_objective = 0;  // before the final pruning pass
  std::vector<double> accepted_objectives;
};

struct SearchResult {
  TriModel model;
  SearchStats stats;
};

// Every lattice point occupied, palette clustered from a 16 x 16 pixel
// sample, each vertex on its nearest palette entry.
TriModel BaselineStart(const Raster& target, const SearchConfig& config);

// Removes the vertex whose removal adds the least squared error until the
// model fits the budget. Corners stay. Deterministic. `removed`, if given,
// receives the removal order.
TriModel BaselineEncode(const Raster& target, const SearchConfig& config,
                        std::vector<int>* removed = nullptr);

// Greedy forward selection of init_vertices points from the corners, each
// step taking the best of init_candidates sampled points, then the vertex
// colors merged down to init_colors palette entries.
TriModel InitStochastic(const Raster& target, const SearchConfig& config);

// Prunes `model` as BaselineEncode does until it fits `budget` bytes.
TriModel ShrinkToBudget(const Raster& target, TriModel model, int budget,
                        std::vector<int>* removed = nullptr);

// Hill climbing state. The rendering, per-pixel error and encoded size are
// kept consistent with the model; candidates are scored by re-rendering
// only the triangles they change.
class SearchState {
 public:
  SearchState(const Raster& target, TriModel model, Metric metric,
              int budget, double lambda);

  // Draws a candidate. Each operator is included at most once with its
  // probability; draws repeat until at least one is included. Operators
  // with nothing to act on leave the model unchanged.
  TriModel Mutate(Rng& rng, const OperatorProbs& probs) const;

  struct Score {
    double distortion = 0;
    size_t bytes = 0;
    double objective = 0;
  };
  Score Evaluate(const TriModel& candidate) const;
  // Adopts the candidate if its objective is strictly lower.
  bool TryAccept(const TriModel& candidate);

  const TriModel& model() const { return model_; }
  const Raster& render() const { return render_; }
  int64_t sse() const { return sse_; }
  size_t bytes() const { return bytes_; }
  double distortion() const { return distortion_; }
  double objective() const { return objective_; }
  double lambda() const { return lambda_; }

 private:
  struct Patch {
    std::vector<int> pixels;
    std::vector<uint8_t> rgb;
    std::vector<int32_t> err;
    int64_t sse_delta = 0;
  };
  Patch Repaint(const TriModel& candidate, DelaunayMesh& mesh) const;
  Score ScorePatch(const TriModel& candidate, const Patch& patch) const;

  const Raster* target_;
  std::vector<YCoCgF> targets_;  // per lattice point
  Metric metric_;
  int budget_;
  double lambda_;
  TriModel model_;
  DelaunayMesh mesh_;
  Raster render_;
  std::vector<int32_t> err_;
  int64_t sse_ = 0;
  size_t bytes_ = 0;
  double distortion_ = 0;
  double objective_ = 0;
};

// Init, hill climbing, then pruning to the budget.
SearchResult StochasticEncode(const Raster& target, const SearchConfig& config);

enum class Algorithm { kBaseline, kStochastic };
// Dispatches to BaselineEncode or StochasticEncode after CheckConfig.
SearchResult Search(const Raster& target, const SearchConfig& config,
                    Algorithm algorithm);

}  // namespace trithumb

#endif  // TRITHUMB_SEARCH_H_
