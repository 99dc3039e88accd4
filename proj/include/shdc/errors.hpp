#pragma once

#include <stdexcept>

namespace shdc {

// Raised when a hypervector that must carry exactly one 1-bit per segment
// does not (zero or multiple 1-bits in some segment).
struct malformed_atomic_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised for malformed or inconsistent on-disk inputs (recordings, item
// memories, associative memories, reports).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace shdc
