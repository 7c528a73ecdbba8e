#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rollinf {

enum class ErrorKind {
  Argument,
  Format,
  Data,
  DegenerateData,
  RankDeficiency,
  Capacity,
  Integrator,
  Divergence,
  GradientUnavailable,
  NoCertificate,
  Extrapolation,
  TrainingFailed,
};

const char* to_string(ErrorKind kind);

// Base of every error raised by the library. The kind drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t byte_offset);
  std::size_t byte_offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& message, std::size_t achievable_rank);
  std::size_t achievable_rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

[[noreturn]] void throw_argument(const std::string& message);

}  // namespace rollinf
