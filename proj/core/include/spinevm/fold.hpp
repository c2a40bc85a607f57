#pragma once

// Generic start-to-end traversal of a spine, and the two folds that do not
// evaluate: recovery of the syntax tree and reclamation.

#include <concepts>
#include <optional>
#include <stdexcept>
#include <type_traits>

#include "spinevm/spine.hpp"
#include "spinevm/term.hpp"

namespace spinevm {

class DanglingEnd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fold supplies four callbacks over an accumulator:
///   val(spine, acc)      -> optional<Acc>; nullopt asks for a retry because the
///                           head (and possibly the context) changed
///   let_l(binder, acc)   -> Acc; may unlink and free the binder
///   let_a(acc, rhs)      -> Acc; rhs as read before let_l ran, possibly released
///   apply(acc, pending)  -> Acc
template <typename F, typename S, typename Acc>
concept Fold = requires(F f, S& s, Acc a, BinderId b, S* p) {
  { f.val(s, a) } -> std::convertible_to<std::optional<Acc>>;
  { f.let_l(b, a) } -> std::convertible_to<Acc>;
  { f.let_a(a, p) } -> std::convertible_to<Acc>;
  { f.apply(a, s) } -> std::convertible_to<Acc>;
};

namespace detail {

template <typename HeapT, typename S, typename F, typename Acc>
Acc unwind_context(HeapT& heap, BinderId& cp, BinderId end, F& f, Acc acc) {
  BinderId c = cp;
  while (c != end) {
    if (c.is_global()) throw DanglingEnd("end reference is not reachable from the context");
    auto& b = heap.binder(c);
    // Read everything needed before let_l, which may free the binder.
    S* sb = b.rhs.get();
    BinderId next = b.next;
    BinderId bend = sb ? sb->end : BinderId::global();

    acc = f.let_l(c, std::move(acc));

    if (sb != nullptr && bend != c) {
      acc = unwind_context<HeapT, S>(heap, next, bend, f, std::move(acc));
      acc = f.let_a(std::move(acc), sb);
    }
    c = next;
  }
  cp = c;
  return acc;
}

}  // namespace detail

/// Folds `f` over `s`: the head first, then binders from start to end,
/// stopping at each pending application's end to apply it.
template <typename HeapT, typename S, typename F, typename Acc>
  requires std::same_as<std::remove_const_t<S>, Spine> && Fold<F, S, Acc>
Acc unwind(HeapT& heap, S& s, F& f, Acc seed) {
  std::optional<Acc> ret;
  while (!(ret = f.val(s, seed))) {
  }
  Acc acc = std::move(*ret);
  // val may have rewritten the context; read it afterwards.
  BinderId c = s.start;
  for (std::size_t k = s.pending.size(); k-- > 0;) {
    acc = detail::unwind_context<HeapT, S>(heap, c, s.pending[k]->end, f, std::move(acc));
    acc = f.apply(std::move(acc), *s.pending[k]);
  }
  return detail::unwind_context<HeapT, S>(heap, c, s.end, f, std::move(acc));
}

/// Remaps external references: when an index walk reaches `from`, it
/// continues counting from `to`.
struct Rebase {
  BinderId from;
  BinderId to;
};

/// Recovers the initial encoding. Free references count steps past the
/// spine's end and so come out as indices beyond the local binder depth.
TermPtr get_ast(const Heap& heap, const Spine& s, std::optional<Rebase> rebase = std::nullopt);

/// Drops the head value: decrements its binder or destroys its sub-spine.
void release_head(Heap& heap, Spine& s);

/// Releases every binder, sub-spine and pending application of `s`.
void destroy(Heap& heap, SpinePtr s);

}  // namespace spinevm
