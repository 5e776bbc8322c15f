#pragma once

#include <stdexcept>
#include <string>

namespace brwre {

/// Process exit codes used by the command line tool.
enum class ExitCode : int {
  Ok = 0,
  Config = 2,
  UnderResolved = 3,
  Resource = 4,
  Io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Invalid model, grid, budget or option.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, ExitCode::Config) {}
};

/// Non-finite log-Laplace transform or similar numeric breakdown.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what, ExitCode::Config) {}
};

/// theta*kappa'(theta) - kappa(theta) has no root on the admissible range.
class NoInteriorMinimizer : public NumericError {
 public:
  explicit NoInteriorMinimizer(const std::string& what) : NumericError(what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(what, ExitCode::Resource) {}
};

/// Too few usable cells to produce an estimate at all.
class UnderResolvedError : public Error {
 public:
  explicit UnderResolvedError(const std::string& what) : Error(what, ExitCode::UnderResolved) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what, ExitCode::Io) {}
};

}  // namespace brwre
