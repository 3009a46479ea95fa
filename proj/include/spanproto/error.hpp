#pragma once

#include <stdexcept>
#include <string>

namespace spanproto {

// Malformed input file content (bad JSON, wrong field types).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally well-formed data that violates a domain invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inconsistent or unsatisfiable configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// I/O failure, carries the path in the message.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spanproto
