#pragma once

// Syntax tree -> spine transformation, deep copy, and stack appending.

#include <stdexcept>

#include "spinevm/spine.hpp"
#include "spinevm/term.hpp"

namespace spinevm {

class UnboundIndex : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Winds `t` into `s`, whose head must be unset. Applications push pending
/// sub-spines, lambdas pair with the innermost pending application (or stay
/// open), letrecs bind a rhs that ends at their own binder, and leaves set the
/// head, resolving indices by walking up the context from `s.start`.
Spine& wind(Heap& heap, Spine& s, const Term& t);

/// Winds a term into a fresh spine ending at `end`.
SpinePtr wind_new(Heap& heap, const Term& t, EndRef end = EndRef::global());

/// Deep copy with fresh binders. References to binders inside `s` are
/// renumbered; references past `s.end` are kept and their counts incremented.
SpinePtr copy_spine(Heap& heap, const Spine& s);

/// Splices `u` onto the bottom of `s`: drops the head of `s`, links u's
/// context in front of s's, pairs u's open binders (outermost first) with s's
/// innermost pending applications, and puts u's pending applications in
/// front. `u.end` must be reachable from `s.start`.
void splice(Heap& heap, Spine& s, SpinePtr u);

/// `splice(s, copy_spine(u))`.
void append_stack(Heap& heap, Spine& s, const Spine& u);

/// Reference route for append_stack: drop the head, then wind the recovered
/// syntax tree of `u` (re-indexed against `s`) into `s`.
void append_stack_by_rewind(Heap& heap, Spine& s, const Spine& u);

}  // namespace spinevm
