#include "trithumb/config.h"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "trithumb/error.h"

namespace trithumb {
namespace {

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    Fail(ErrorCode::kUsage, "bad value for " + key + ": '" + value + "'");
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

void SetConfigValue(const std::string& key, const std::string& value,
                    EncoderConfig& config) {
  SearchConfig& s = config.search;
  if (key == "algorithm") {
    if (value == "baseline") {
      config.algorithm = Algorithm::kBaseline;
    } else if (value == "stochastic") {
      config.algorithm = Algorithm::kStochastic;
    } else {
      Fail(ErrorCode::kUsage, "algorithm must be baseline or stochastic");
    }
  } else if (key == "budget") {
    s.budget_bytes = value == "auto" ? 0 : ParseNumber<int>(key, value);
  } else if (key == "grid") {
    s.grid = ParseNumber<int>(key, value);
  } else if (key == "width") {
    config.width = ParseNumber<int>(key, value);
  } else if (key == "height") {
    config.height = ParseNumber<int>(key, value);
  } else if (key == "init_vertices") {
    s.init_vertices = ParseNumber<int>(key, value);
  } else if (key == "init_colors") {
    s.init_colors = ParseNumber<int>(key, value);
  } else if (key == "init_candidates") {
    s.init_candidates = ParseNumber<int>(key, value);
  } else if (key == "ops") {
    s.op_probs = OperatorSubset(value);
  } else if (key.size() == 3 && key.rfind("p_", 0) == 0 && key[2] >= 'a' &&
             key[2] < 'a' + kNumOperators) {
    s.op_probs[size_t(key[2] - 'a')] = ParseNumber<double>(key, value);
  } else if (key == "iterations") {
    s.max_iterations = ParseNumber<int>(key, value);
  } else if (key == "patience") {
    s.patience = ParseNumber<int>(key, value);
  } else if (key == "seed") {
    s.seed = ParseNumber<uint64_t>(key, value);
  } else if (key == "lambda") {
    s.lambda = value == "auto" ? -1 : ParseNumber<double>(key, value);
  } else if (key == "metric") {
    if (value == "mse") {
      s.metric = Metric::kMse;
    } else if (value == "ssim") {
      s.metric = Metric::kSsim;
    } else {
      Fail(ErrorCode::kUsage, "metric must be mse or ssim");
    }
  } else {
    Fail(ErrorCode::kUsage, "unknown config key '" + key + "'");
  }
}

void ApplyConfig(const std::string& text, EncoderConfig& config) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorCode::kUsage,
           "config line " + std::to_string(number) + ": expected key = value");
    }
    try {
      SetConfigValue(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), config);
    } catch (const Error& e) {
      Fail(ErrorCode::kUsage,
           "config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::string FormatConfig(const EncoderConfig& config) {
  const SearchConfig& s = config.search;
  std::ostringstream out;
  out << "algorithm = "
      << (config.algorithm == Algorithm::kBaseline ? "baseline" : "stochastic")
      << "\n";
  out << "width = " << config.width << "\n";
  out << "height = " << config.height << "\n";
  out << "grid = " << s.grid << "\n";
  out << "budget = "
      << (s.budget_bytes > 0 ? std::to_string(s.budget_bytes) : "auto")
      << "  # auto: " << BudgetForGrid(s.grid) << " bytes at this grid\n";
  out << "init_vertices = " << s.init_vertices << "\n";
  out << "init_colors = " << s.init_colors << "\n";
  out << "init_candidates = " << s.init_candidates << "\n";
  for (int k = 0; k < kNumOperators; ++k) {
    out << "p_" << char('a' + k) << " = " << FormatDouble(s.op_probs[size_t(k)])
        << "\n";
  }
  out << "iterations = " << s.max_iterations << "\n";
  out << "patience = " << s.patience << "\n";
  out << "seed = " << s.seed << "\n";
  out << "lambda = " << (s.lambda < 0 ? "auto" : FormatDouble(s.lambda)) << "\n";
  out << "metric = " << (s.metric == Metric::kMse ? "mse" : "ssim") << "\n";
  return out.str();
}

}  // namespace trithumb
