#pragma once

// Whole-program driver shared by the command-line tool, tests and benchmarks.

#include <cstdint>
#include <string>
#include <vector>

#include "spinevm/eval.hpp"
#include "spinevm/term.hpp"

namespace spinevm {

struct RunOptions {
  EvalOptions eval;
  bool deep = false;
  /// Sample high-water gauges at each context allocation.
  bool sampling = true;
  /// Record the live context count at each context allocation.
  bool trace = false;
  std::size_t stack_bytes = std::size_t{1} << 30;
};

struct RunResult {
  TermPtr result;
  Stats stats;          // as of the end of evaluation, before teardown
  Stats after_destroy;  // after the result spine was destroyed
  Shape wound_shape;    // immediately after winding
  std::uint64_t steps = 0;
  double seconds = 0;   // evaluation only
  std::vector<std::uint32_t> trace;
};

/// High-water marks of a live-count trace over its first half, its second
/// half, and the whole run.
struct HalfMarks {
  std::uint64_t first = 0;
  std::uint64_t second = 0;
  std::uint64_t full = 0;
};
HalfMarks half_marks(const std::vector<std::uint32_t>& trace);

/// Winds `t` into a fresh heap, evaluates it, recovers the result and
/// destroys the spine. Exceptions from evaluation propagate after teardown.
RunResult run_program(const Term& t, const RunOptions& opts = {});

std::string read_file(const std::string& path);

}  // namespace spinevm
