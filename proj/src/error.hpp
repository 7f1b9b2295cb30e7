#pragma once

#include <stdexcept>
#include <string>

namespace gradphon {

// Numeric values mirror gp_status in the public C header.
enum class ErrorKind {
  Usage = 1,
  Config = 2,
  Data = 3,
  Parse = 4,
  Format = 5,
  Numeric = 6,
  Dimension = 7,
  Index = 8,
  Vocabulary = 9,
  UnknownMorpheme = 10,
  Training = 11,
  Split = 12,
  Compatibility = 13,
  Io = 14,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gradphon
