#pragma once

// By-need evaluation over spines: one bottom-evaluation step, the need fold
// that drives steps and reclaims unreferenced binders, and typeof.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "spinevm/spine.hpp"

namespace spinevm {

class NonTermination : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DtorNonCtor : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnificationRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(Violation v) : std::runtime_error(v.message()), violation_(std::move(v)) {}
  const Violation& violation() const { return violation_; }

 private:
  Violation violation_;
};

struct EvalOptions {
  std::uint64_t max_steps = 1'000'000'000;
  std::size_t max_depth = 200'000;
  /// Validate properties 1-7 and reference counts of the whole tree after
  /// every step.
  bool check_every_step = false;
};

enum class StepResult { Progressed, Done };

class Evaluator {
 public:
  explicit Evaluator(Heap& heap, EvalOptions opts = {}) : heap_(heap), opts_(opts) {}

  /// Evaluates `root` by need. With check_every_step, `root` is the tree that
  /// gets validated.
  void evaluate(Spine& root);

  /// `evaluate`, then recursively under constructor payloads.
  void evaluate_deep(Spine& root);

  /// Applies one row of the bottom-evaluation table to `s`.
  StepResult step(Spine& s);

  /// Steps `s` until done, then folds over it: unreferenced binders are
  /// destroyed and unlinked, surviving annotations and pending applications
  /// are evaluated by need.
  void need(Spine& s);

  /// Type of `s` as a fresh spine: the head's type dressed with a copy of
  /// the context, applied to the pending arguments and evaluated by need.
  SpinePtr type_of(const Spine& s);

  std::uint64_t steps() const { return steps_; }
  Heap& heap() { return heap_; }
  const EvalOptions& options() const { return opts_; }

 private:
  friend class NeedFold;

  Heap& heap_;
  EvalOptions opts_;
  Spine* root_ = nullptr;
  std::uint64_t steps_ = 0;
  std::size_t depth_ = 0;

  StepResult deref(Spine& s, BinderId x);
  StepResult deref_type(Spine& s, BinderId x);
  StepResult destruct(Spine& s, BinderId x);
  StepResult prim(Spine& s);

  void run_steps(Spine& s);
  void after_step();

  void sweep(Spine& s);
  bool collectible(BinderId c) const;
  /// Destroys binder `c` of `s` and unlinks it; `prev` is its predecessor in
  /// the segment, or global if `c` is `s.start`.
  void collect(Spine& s, BinderId prev, BinderId c);
};

/// Runs `f` on a thread with a stack of `bytes`, rethrowing its exception.
void run_with_stack(std::size_t bytes, const std::function<void()>& f);

}  // namespace spinevm
