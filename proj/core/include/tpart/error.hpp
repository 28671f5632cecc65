#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpart {

enum class ErrorCode {
  kParse,
  kMissingTable,
  kInvalidCase,
  kUnbalanced,
  kDisconnected,
  kSingular,
  kNotConverged,
  kInvalidArgument,
  kUndefinedCongestion,
  kEigenSolver,
  kClustering,
  kInfeasible,
  kSolver,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library.  The code is
/// stable and is what the CLI prints in its machine-readable error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& message, double residual, int iterations)
      : Error(ErrorCode::kNotConverged, message), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace tpart
