#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kc {

enum class ErrorCode {
  NonHermitianInput,
  NonUnitaryInput,
  ConvergenceFailure,
  ShapeMismatch,
  NonSquareInput,
  NonFiniteInput,
  NonUnitVector,
  DimensionMismatch,
  IllConditioned,
  EmptyInput,
  IndexOutOfRange,
  OutOfRange,
  TooFewLevels,
  DegenerateSpectrum,
  NonUnitaryBasis,
  ParityWithDisorder,
  DegenerateRange,
  InsufficientDimension,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the sweep harness in particular) can count and classify failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kc
