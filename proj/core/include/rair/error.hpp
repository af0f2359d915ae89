#pragma once

#include <stdexcept>
#include <string>

namespace rair {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration values (maps to CLI exit code 1).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Exhaustive oracle asked to enumerate more placements than it allows (CLI exit code 3).
class OracleRefusal : public Error {
 public:
  OracleRefusal(const std::string& what, unsigned long long refused_count)
      : Error(what), refused_count_(refused_count) {}
  unsigned long long refused_count() const noexcept { return refused_count_; }

 private:
  unsigned long long refused_count_;
};

}  // namespace rair
