#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace distcolor {

using VertexId = std::uint32_t;
using RankId = std::uint32_t;

// Colors are positive integers; 0 means "uncolored".
using Color = std::uint32_t;
inline constexpr Color kUncolored = 0;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files (Matrix Market, edge lists, partition files).
struct ParseError : Error {
  using Error::Error;
};

// Violated preconditions and invariant checks.
struct ValidationError : Error {
  using Error::Error;
};

// A protocol run exceeded its round cap without converging.
struct ConvergenceError : Error {
  using Error::Error;
};

}  // namespace distcolor
