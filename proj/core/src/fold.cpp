#include "spinevm/fold.hpp"

#include <utility>

#include "spinevm/prim.hpp"

namespace spinevm {
namespace {

class AstFold {
 public:
  AstFold(const Heap& heap, std::optional<Rebase> rebase) : heap_(heap), rebase_(rebase) {}

  std::optional<TermPtr> val(const Spine& s, const TermPtr&) {
    return std::visit(
        [&](const auto& h) -> TermPtr {
          using H = std::decay_t<decltype(h)>;
          if constexpr (std::is_same_v<H, head::Var>) {
            return var(index_of(s, h.target));
          } else if constexpr (std::is_same_v<H, head::VarT>) {
            return var_t(index_of(s, h.target));
          } else if constexpr (std::is_same_v<H, head::Dtor>) {
            return dtor(index_of(s, h.target));
          } else if constexpr (std::is_same_v<H, head::Ctor>) {
            return ctor(h.tag, h.payload ? sub(*h.payload) : nullptr);
          } else if constexpr (std::is_same_v<H, head::Prim>) {
            return prim(h.def->tag, sub(*h.annot));
          } else {
            throw std::logic_error("get_ast on a spine with an unset head");
          }
        },
        s.head);
  }

  TermPtr let_l(BinderId c, TermPtr acc) {
    const Binder& b = heap_.binder(c);
    if (b.rhs && b.rhs->end == c) return letrec(b.name, sub(*b.annot), sub(*b.rhs), std::move(acc));
    return lambda(b.name, sub(*b.annot), std::move(acc));
  }

  TermPtr let_a(TermPtr acc, const Spine* rhs) { return spinevm::apply(std::move(acc), sub(*rhs)); }

  TermPtr apply(TermPtr acc, const Spine& app) { return spinevm::apply(std::move(acc), sub(app)); }

 private:
  const Heap& heap_;
  std::optional<Rebase> rebase_;

  TermPtr sub(const Spine& s) { return get_ast(heap_, s, rebase_); }

  std::size_t index_of(const Spine& s, BinderId target) const {
    std::size_t steps = 0;
    bool rebased = false;
    BinderId c = s.start;
    for (;;) {
      if (rebase_ && !rebased && c == rebase_->from) {
        c = rebase_->to;
        rebased = true;
        continue;
      }
      if (c == target) break;
      if (c.is_global()) throw DanglingEnd("reference to a binder not on the context chain");
      c = heap_.binder(c).next;
      ++steps;
    }
    return steps;
  }
};

class DestroyFold {
 public:
  explicit DestroyFold(Heap& heap) : heap_(heap) {}

  std::optional<int> val(Spine& s, int) {
    release_head(heap_, s);
    return 0;
  }

  int let_l(BinderId c, int) {
    Binder& b = heap_.binder(c);
    release(b.annot);
    release(b.rhs);
    heap_.free_binder(c);
    return 0;
  }

  int let_a(int, Spine*) { return 0; }

  int apply(int, Spine& app) {
    destroy_contents(app);
    return 0;
  }

  void destroy_contents(Spine& s) {
    DestroyFold f(heap_);
    unwind(heap_, s, f, 0);
    s.pending.clear();
    s.start = s.end;
  }

 private:
  Heap& heap_;

  void release(SpinePtr& p) {
    if (!p) return;
    destroy_contents(*p);
    p.reset();
  }
};

}  // namespace

TermPtr get_ast(const Heap& heap, const Spine& s, std::optional<Rebase> rebase) {
  if (rebase && rebase->from.is_global()) rebase.reset();
  AstFold f(heap, rebase);
  return unwind(heap, s, f, TermPtr{});
}

void release_head(Heap& heap, Spine& s) {
  if (auto t = head_target(s.head)) {
    heap.decref(*t);
  } else if (auto c = std::get_if<head::Ctor>(&s.head); c && c->payload) {
    destroy(heap, std::move(c->payload));
  } else if (auto p = std::get_if<head::Prim>(&s.head); p && p->annot) {
    destroy(heap, std::move(p->annot));
  }
  s.head = head::Unset{};
}

void destroy(Heap& heap, SpinePtr s) {
  if (!s) return;
  DestroyFold f(heap);
  f.destroy_contents(*s);
}

}  // namespace spinevm
