#include "krylovchaos/errors.hpp"

namespace kc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::NonUnitaryInput: return "NonUnitaryInput";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonSquareInput: return "NonSquareInput";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonUnitVector: return "NonUnitVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooFewLevels: return "TooFewLevels";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NonUnitaryBasis: return "NonUnitaryBasis";
    case ErrorCode::ParityWithDisorder: return "ParityWithDisorder";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::InsufficientDimension: return "InsufficientDimension";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace kc
