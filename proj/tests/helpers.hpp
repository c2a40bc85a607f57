#pragma once

#include <string>

#include "spinevm/fold.hpp"
#include "spinevm/run.hpp"
#include "spinevm/term.hpp"
#include "spinevm/wind.hpp"

namespace testing {

inline std::string roundtrip(const std::string& src) { return spinevm::print(*spinevm::parse(src)); }

// Evaluates a program and prints the result.
inline std::string eval_str(const std::string& src, bool check = true) {
  spinevm::RunOptions o;
  o.eval.check_every_step = check;
  o.eval.max_steps = 1'000'000;
  o.stack_bytes = std::size_t{64} << 20;
  return spinevm::print(*spinevm::run_program(*spinevm::parse(src), o).result);
}

inline bool same(const std::string& a, const std::string& b) {
  return spinevm::alpha_eq(*spinevm::parse(a), *spinevm::parse(b));
}

}  // namespace testing
