#pragma once

#include <stdexcept>
#include <string>

namespace tnav {

// Error categories map onto CLI exit codes and the machine-parseable
// `error: <category>: <detail>` line printed on stderr.
//   ConfigError / UsageError -> exit 2 (bad input or config)
//   RuntimeFailure           -> exit 3 (plan or episode failure)
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& detail)
      : std::runtime_error(detail), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& detail) : Error("config", detail) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& detail) : Error("usage", detail) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& detail) : Error("io", detail) {}
};

class RuntimeFailure : public Error {
 public:
  RuntimeFailure(std::string category, const std::string& detail)
      : Error(std::move(category), detail) {}
};

// Precondition violations inside the library (programming errors, not
// recoverable input problems).
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& detail)
      : Error("invariant", detail) {}
};

#define TNAV_REQUIRE(cond, msg)                  \
  do {                                           \
    if (!(cond)) throw ::tnav::InvariantError(msg); \
  } while (0)

}  // namespace tnav
