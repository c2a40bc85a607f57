#pragma once

// Stack ("spine") representation of terms.
//
// A spine owns a segment of binders, linked from `start` through `next` up to
// (not including) `end`. The binder chain continues past `end` into the
// enclosing spine's segment; variables may point anywhere along that chain.
// Pending applications are stored innermost last.

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spinevm/term.hpp"

namespace spinevm {

struct PrimDef;
class Heap;

struct BinderId {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

  static constexpr BinderId global() { return BinderId{}; }
  constexpr bool is_global() const { return value == std::numeric_limits<std::uint32_t>::max(); }

  friend constexpr bool operator==(BinderId, BinderId) = default;
};

/// End reference of a spine: the first binder NOT owned by it, or Global.
using EndRef = BinderId;

struct Spine;

struct SpineDeleter {
  Heap* heap = nullptr;
  void operator()(Spine* s) const;
};
using SpinePtr = std::unique_ptr<Spine, SpineDeleter>;

namespace head {
struct Unset {};
struct Var {
  BinderId target;
};
struct VarT {
  BinderId target;
};
struct Ctor {
  CtorTag tag;
  SpinePtr payload;  // may be null
};
struct Dtor {
  BinderId target;
};
struct Prim {
  const PrimDef* def;
  SpinePtr annot;
};
}  // namespace head

using HeadValue = std::variant<head::Unset, head::Var, head::VarT, head::Ctor, head::Dtor, head::Prim>;

/// Binder referenced by a Var, VarT or Dtor head, if any.
std::optional<BinderId> head_target(const HeadValue& h);
/// Sub-spine carried by a Ctor or Prim head, if any.
Spine* head_payload(const HeadValue& h);

struct Spine {
  HeadValue head;
  BinderId start;  // first owned binder, or == end when the context is empty
  EndRef end;
  std::vector<SpinePtr> pending;  // back() is the innermost application
};

struct Binder {
  std::string name;
  SpinePtr annot;
  SpinePtr rhs;  // null for open binders
  BinderId next;
  std::uint32_t refcount = 0;
  bool guard = false;  // being dereferenced
  bool live = false;

  bool is_open() const { return !rhs; }
};

struct Stats {
  std::uint64_t contexts_allocated = 0;
  std::uint64_t spines_allocated = 0;
  std::uint64_t hw_contexts = 0;
  std::uint64_t hw_spines = 0;
  std::uint64_t live_contexts = 0;
  std::uint64_t live_spines = 0;

  /// `contexts_alloc=N spines_alloc=N hw_contexts=N hw_spines=N live_contexts=N live_spines=N`
  std::string line() const;
};

class InternalRefcount : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Owns every binder and counts every spine. Not thread-safe; one heap per
/// evaluation thread.
class Heap {
 public:
  Heap() = default;
  Heap(const Heap&) = delete;
  Heap& operator=(const Heap&) = delete;

  SpinePtr new_spine(EndRef end);
  BinderId new_binder(std::string name, BinderId next);
  /// Releases the slot of a binder whose annotation and rhs are already gone.
  void free_binder(BinderId b);

  Binder& binder(BinderId b) { return slots_[b.value]; }
  const Binder& binder(BinderId b) const { return slots_[b.value]; }
  bool is_live(BinderId b) const { return !b.is_global() && b.value < slots_.size() && slots_[b.value].live; }
  std::size_t capacity() const { return slots_.size(); }

  std::uint32_t incref(BinderId b);
  std::uint32_t decref(BinderId b);

  const Stats& stats() const { return stats_; }
  void reset_high_water();

  /// When enabled (default), high-water gauges are sampled at every context
  /// allocation and the observer, if any, is called.
  void set_sampling(bool on) { sampling_ = on; }
  bool sampling() const { return sampling_; }
  void set_observer(std::function<void(const Stats&)> f) { observer_ = std::move(f); }

 private:
  friend struct SpineDeleter;
  std::deque<Binder> slots_;  // stable addresses
  std::vector<std::uint32_t> free_;
  Stats stats_;
  bool sampling_ = true;
  std::function<void(const Stats&)> observer_;
};

/// Records bytes per context and per spine for footprint estimates.
struct RecordSizes {
  std::uint64_t context_bytes = 48;
  std::uint64_t spine_bytes = 56;
};

std::uint64_t footprint_bytes(std::uint64_t contexts, std::uint64_t spines, RecordSizes sizes = {});

// ---------------------------------------------------------------------------
// Structural checks

struct Violation {
  int property;  // 1..7; 0 for structural corruption
  std::string locus;
  std::string detail;

  std::string message() const;
};

/// Checks the seven structural properties on `s` and every sub-spine.
std::optional<Violation> check_invariants(const Heap& heap, const Spine& s);

struct RefcountMismatch {
  BinderId binder;
  std::uint32_t recorded;
  std::uint32_t counted;
};

/// Compares each binder's reference count (for binders owned within `s`)
/// with an exhaustive count of Var/VarT/Dtor heads in `s`.
std::optional<RefcountMismatch> check_refcounts(const Heap& heap, const Spine& s);

struct Shape {
  std::size_t spines = 0;
  std::size_t contexts = 0;
  friend bool operator==(const Shape&, const Shape&) = default;
};

Shape count_shape(const Heap& heap, const Spine& s);

/// Visits each direct sub-spine of `s`: head payload, binder annotations and
/// bound right-hand sides of the owned segment, and pending applications.
template <typename F>
void for_each_child(Heap& heap, Spine& s, F&& f);
template <typename F>
void for_each_child(const Heap& heap, const Spine& s, F&& f);

/// Owned binders of `s`, start to end.
std::vector<BinderId> segment(const Heap& heap, const Spine& s);

/// Rewrites every end reference equal to `from` to `to`, in the children of
/// `s` and recursively in children whose end was rewritten.
void retarget_ends(Heap& heap, Spine& s, BinderId from, BinderId to);

// ---------------------------------------------------------------------------

template <typename F>
void for_each_child(Heap& heap, Spine& s, F&& f) {
  if (Spine* p = head_payload(s.head)) f(*p);
  for (BinderId c = s.start; c != s.end;) {
    Binder& b = heap.binder(c);
    BinderId nx = b.next;
    if (b.annot) f(*b.annot);
    if (b.rhs) f(*b.rhs);
    c = nx;
  }
  for (auto& app : s.pending) {
    if (app) f(*app);
  }
}

template <typename F>
void for_each_child(const Heap& heap, const Spine& s, F&& f) {
  if (const Spine* p = head_payload(s.head)) f(*p);
  for (BinderId c = s.start; c != s.end;) {
    const Binder& b = heap.binder(c);
    if (b.annot) f(static_cast<const Spine&>(*b.annot));
    if (b.rhs) f(static_cast<const Spine&>(*b.rhs));
    c = b.next;
  }
  for (const auto& app : s.pending) {
    if (app) f(static_cast<const Spine&>(*app));
  }
}

}  // namespace spinevm
