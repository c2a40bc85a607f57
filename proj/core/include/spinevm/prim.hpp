#pragma once

// Primitive operations: arity-k functions over the first k pending
// applications of a spine.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>

#include "spinevm/term.hpp"

namespace spinevm {

class PrimArgs;
struct Spine;
class Heap;
class Evaluator;

/// Outcome of a primitive: either stuck (the spine is left untouched and is
/// treated as done) or a closed term that becomes the new bottom.
using PrimResult = std::variant<std::monostate, TermPtr>;

struct PrimDef {
  PrimTag tag;
  TermPtr annot;  // the primitive's type
  std::function<PrimResult(PrimArgs&)> delta;
};

class PrimTypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrimFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Restricted view of a primitive's arguments. Arguments can be evaluated by
/// need and inspected; nothing else about the enclosing spine is reachable.
class PrimArgs {
 public:
  PrimArgs(Evaluator& ev, Spine& s, unsigned count) : ev_(ev), spine_(s), count_(count) {}

  unsigned size() const { return count_; }

  /// Evaluates argument `i` (0 = innermost) by need and returns its integer
  /// value, or nullopt when evaluation is stuck on a variable. Throws
  /// PrimTypeError if the argument is a value of another shape.
  std::optional<std::int64_t> force_int(unsigned i);

 private:
  Evaluator& ev_;
  Spine& spine_;
  unsigned count_;
};

std::span<const PrimDef> builtin_table();
const PrimDef* find_prim(std::string_view name);

/// Church booleans returned by comparisons: \t:*. \f:*. t and \t:*. \f:*. f
TermPtr church_true();
TermPtr church_false();

/// Applies the primitive at the head of `s` to its first k pending
/// applications. Returns false if the primitive was stuck.
bool delta(Evaluator& ev, const PrimDef& p, Spine& s);

}  // namespace spinevm
