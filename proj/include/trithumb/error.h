#ifndef TRITHUMB_ERROR_H_
#define TRITHUMB_ERROR_H_

#include <stdexcept>
#include <string>

namespace trithumb {

enum class ErrorCode {
  kContract,            // precondition violated by the caller
  kDegenerateGeometry,  // all points collinear
  kDimensionMismatch,
  kBudgetInfeasible,
  kUnsupportedVersion,
  kInconsistentHeader,
  kTruncated,
  kCorrupt,
  kIo,
  kUsage,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool cond, const char* what) {
  if (!cond) Fail(ErrorCode::kContract, what);
}

}  // namespace trithumb

#endif  // TRITHUMB_ERROR_H_
