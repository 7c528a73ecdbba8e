#include "rollinf/errors.hpp"

namespace rollinf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::DegenerateData: return "degenerate data";
    case ErrorKind::RankDeficiency: return "rank deficiency";
    case ErrorKind::Capacity: return "capacity error";
    case ErrorKind::Integrator: return "integrator error";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::GradientUnavailable: return "gradient unavailable";
    case ErrorKind::NoCertificate: return "no certificate";
    case ErrorKind::Extrapolation: return "extrapolation";
    case ErrorKind::TrainingFailed: return "training failed";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

FormatError::FormatError(const std::string& message, std::size_t byte_offset)
    : Error(ErrorKind::Format,
            message + " (at byte offset " + std::to_string(byte_offset) + ")"),
      offset_(byte_offset) {}

DivergenceError::DivergenceError(const std::string& message, std::size_t step)
    : Error(ErrorKind::Divergence,
            message + " (at step " + std::to_string(step) + ")"),
      step_(step) {}

RankDeficiencyError::RankDeficiencyError(const std::string& message,
                                         std::size_t achievable_rank)
    : Error(ErrorKind::RankDeficiency,
            message + " (achievable rank " + std::to_string(achievable_rank) +
                ")"),
      rank_(achievable_rank) {}

void throw_argument(const std::string& message) {
  throw Error(ErrorKind::Argument, message);
}

}  // namespace rollinf
