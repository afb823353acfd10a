#pragma once

#include <stdexcept>
#include <string>

namespace avloc {

/// Caller violated a precondition (bad argument, mismatched shapes, invalid config).
/// Maps to exit code 1 in the CLI.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file or byte stream is malformed. Maps to exit code 2 in the CLI.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
  FormatError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset),
        has_offset_(true) {}

  bool has_byte_offset() const { return has_offset_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_ = 0;
  bool has_offset_ = false;
};

}  // namespace avloc
