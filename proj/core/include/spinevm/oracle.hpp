#pragma once

// Reference semantics for testing. A substitution-based normalizer over the
// syntax tree that shares nothing with the spine machinery, a random
// generator of closed terms, and direct answers for the benchmark programs.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "spinevm/term.hpp"

namespace spinevm::oracle {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised where the evaluator would raise a type or destructor error.
class Stuck : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Head of a weak head-normal form: number of leading open binders, a label
/// for the head value, and the number of arguments it is applied to.
struct HeadShape {
  std::size_t open = 0;
  std::string head;
  std::size_t pending = 0;

  friend bool operator==(const HeadShape&, const HeadShape&) = default;
};

std::string head_label_var();
std::string head_label_dtor();
std::string head_label(const CtorTag& tag);
std::string head_label(const PrimTag& tag);

/// Leftmost-outermost reduction of the head (also under the leading
/// lambdas), then of every argument the head is applied to. Primitives fire
/// when their first k arguments reduce to integer literals.
TermPtr normalize_whnf(const Term& t, std::uint64_t budget, HeadShape* shape = nullptr);

/// Full normal form: every redex, including inside annotations and payloads.
TermPtr normalize_strong(const Term& t, std::uint64_t budget);

/// alpha_eq of the two full normal forms.
bool strong_equal(const Term& a, const Term& b, std::uint64_t budget);

/// Deterministic closed term drawn from a small type discipline (Int, *,
/// functions, boxes), using every term variant. Letrecs are not recursive,
/// so every sample terminates.
TermPtr gen_term(std::uint64_t seed, unsigned max_depth);

/// Number of solutions of the n-queens problem by backtracking.
std::uint64_t queens_count(unsigned n);

/// Takeuchi function by direct recursion; counts calls if `calls` is set.
std::int64_t tak_direct(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t* calls = nullptr);

}  // namespace spinevm::oracle
