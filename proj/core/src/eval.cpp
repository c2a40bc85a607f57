#include "spinevm/eval.hpp"

#include <pthread.h>

#include <exception>
#include <string>

#include "spinevm/fold.hpp"
#include "spinevm/prim.hpp"
#include "spinevm/wind.hpp"

namespace spinevm {
namespace {

struct DepthGuard {
  std::size_t& depth;
  DepthGuard(std::size_t& d, std::size_t limit) : depth(d) {
    if (++depth > limit) {
      --depth;
      throw NonTermination("evaluation nested deeper than " + std::to_string(limit));
    }
  }
  ~DepthGuard() { --depth; }
};

struct Guarded {
  Binder& b;
  explicit Guarded(Binder& bd) : b(bd) { b.guard = true; }
  ~Guarded() { b.guard = false; }
};

bool is_letrec(const Binder& b, BinderId id) { return b.rhs && b.rhs->end == id; }

std::size_t count_refs(const Heap& heap, const Spine& s, BinderId target) {
  std::size_t n = 0;
  if (auto t = head_target(s.head); t && *t == target) ++n;
  for_each_child(heap, s, [&](const Spine& c) { n += count_refs(heap, c, target); });
  return n;
}

SpinePtr star_spine(Heap& heap, EndRef end) {
  SpinePtr s = heap.new_spine(end);
  s->head = head::Ctor{CtorTag::star(), nullptr};
  return s;
}

}  // namespace

// Call-by-need fold: let_l reclaims or evaluates annotations, let_a does
// nothing, apply evaluates the pending application.
class NeedFold {
 public:
  NeedFold(Evaluator& ev, Spine& s) : ev_(ev), s_(s) {}

  std::optional<int> val(Spine& s, int) {
    ev_.run_steps(s);
    return 0;
  }

  int let_l(BinderId c, int) {
    Heap& heap = ev_.heap_;
    Binder& b = heap.binder(c);
    bool dead = ev_.collectible(c);
    // A letrec referenced only from its own rhs is dead too.
    if (!dead && is_letrec(b, c) && !b.guard && b.refcount == count_refs(heap, *b.rhs, c)) dead = true;
    if (dead) {
      ev_.collect(s_, prev_, c);
    } else {
      prev_ = c;
      ev_.need(*b.annot);
    }
    return 0;
  }

  int let_a(int, Spine*) { return 0; }

  int apply(int, Spine& app) {
    ev_.need(app);
    return 0;
  }

 private:
  Evaluator& ev_;
  Spine& s_;
  BinderId prev_ = BinderId::global();
};

void Evaluator::evaluate(Spine& root) {
  Spine* saved = std::exchange(root_, &root);
  try {
    need(root);
  } catch (...) {
    root_ = saved;
    throw;
  }
  root_ = saved;
}

void Evaluator::evaluate_deep(Spine& root) {
  evaluate(root);
  Spine* saved = std::exchange(root_, &root);
  std::function<void(Spine&)> deep = [&](Spine& s) {
    if (auto* c = std::get_if<head::Ctor>(&s.head); c && c->payload) {
      need(*c->payload);
      deep(*c->payload);
    }
    for (auto& app : s.pending) deep(*app);
  };
  try {
    deep(root);
  } catch (...) {
    root_ = saved;
    throw;
  }
  root_ = saved;
}

void Evaluator::need(Spine& s) {
  DepthGuard d(depth_, opts_.max_depth);
  NeedFold f(*this, s);
  unwind(heap_, s, f, 0);
}

void Evaluator::run_steps(Spine& s) {
  DepthGuard d(depth_, opts_.max_depth);
  for (;;) {
    if (steps_ >= opts_.max_steps) {
      throw NonTermination("step budget of " + std::to_string(opts_.max_steps) + " exhausted");
    }
    if (step(s) == StepResult::Done) return;
    ++steps_;
    sweep(s);
    after_step();
  }
}

void Evaluator::after_step() {
  if (!opts_.check_every_step || root_ == nullptr) return;
  if (auto v = check_invariants(heap_, *root_)) throw InvariantViolation(*v);
  if (auto m = check_refcounts(heap_, *root_)) {
    throw InvariantViolation(Violation{0, "b" + std::to_string(m->binder.value),
                                       "reference count " + std::to_string(m->recorded) + ", counted " +
                                           std::to_string(m->counted)});
  }
}

StepResult Evaluator::step(Spine& s) {
  return std::visit(
      [&](auto& h) -> StepResult {
        using H = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<H, head::Var>) {
          return deref(s, h.target);
        } else if constexpr (std::is_same_v<H, head::VarT>) {
          return deref_type(s, h.target);
        } else if constexpr (std::is_same_v<H, head::Dtor>) {
          return destruct(s, h.target);
        } else if constexpr (std::is_same_v<H, head::Prim>) {
          return prim(s);
        } else if constexpr (std::is_same_v<H, head::Ctor>) {
          return StepResult::Done;
        } else {
          throw std::logic_error("step on a spine with an unset head");
        }
      },
      s.head);
}

StepResult Evaluator::deref(Spine& s, BinderId x) {
  Binder& b = heap_.binder(x);
  if (b.is_open() || b.guard) return StepResult::Done;
  {
    Guarded g(b);
    run_steps(*b.rhs);
  }
  // x = x ... : nothing to gain from unfolding again. Under a lambda the
  // unfolding is a real call.
  if (auto t = head_target(b.rhs->head); t && *t == x && std::holds_alternative<head::Var>(b.rhs->head)) {
    bool open = false;
    for (BinderId c = b.rhs->start; c != b.rhs->end && !open; c = heap_.binder(c).next) open = heap_.binder(c).is_open();
    if (!open) return StepResult::Done;
  }
  SpinePtr u;
  if (b.refcount == 1 && !is_letrec(b, x)) {
    // Sole reference: move the value out and leave an inert stand-in so the
    // binder stays paired until it is reclaimed.
    EndRef e = b.rhs->end;
    u = std::move(b.rhs);
    b.rhs = star_spine(heap_, e);
  } else {
    u = copy_spine(heap_, *b.rhs);
  }
  splice(heap_, s, std::move(u));
  return StepResult::Progressed;
}

StepResult Evaluator::deref_type(Spine& s, BinderId x) {
  // The annotation lies outside x's scope, so no guard is needed.
  Binder& b = heap_.binder(x);
  run_steps(*b.annot);
  splice(heap_, s, copy_spine(heap_, *b.annot));
  return StepResult::Progressed;
}

StepResult Evaluator::destruct(Spine& s, BinderId x) {
  Binder& b = heap_.binder(x);
  if (b.is_open() || b.guard) return StepResult::Done;
  {
    Guarded g(b);
    run_steps(*b.rhs);
  }
  const Spine& r = *b.rhs;
  for (BinderId c = r.start; c != r.end; c = heap_.binder(c).next) {
    if (heap_.binder(c).is_open()) throw DtorNonCtor("destructor applied to a function");
  }
  auto* c = std::get_if<head::Ctor>(&r.head);
  if (c == nullptr) {
    if (std::holds_alternative<head::Prim>(r.head) || head_target(r.head)) return StepResult::Done;
    throw DtorNonCtor("destructor applied to a non-constructor value");
  }
  if (!c->payload) throw DtorNonCtor("constructor " + c->tag.display_name() + " has no payload");

  SpinePtr copy = copy_spine(heap_, r);
  while (!copy->pending.empty()) {
    destroy(heap_, std::move(copy->pending.back()));
    copy->pending.pop_back();
  }
  SpinePtr payload = std::move(std::get<head::Ctor>(copy->head).payload);
  splice(heap_, *copy, std::move(payload));
  splice(heap_, s, std::move(copy));
  return StepResult::Progressed;
}

StepResult Evaluator::prim(Spine& s) {
  const PrimDef& def = *std::get<head::Prim>(s.head).def;
  if (s.pending.size() < def.tag.arity) return StepResult::Done;
  return delta(*this, def, s) ? StepResult::Progressed : StepResult::Done;
}

bool Evaluator::collectible(BinderId c) const {
  const Binder& b = heap_.binder(c);
  return !b.is_open() && !b.guard && b.refcount == 0;
}

void Evaluator::sweep(Spine& s) {
  BinderId prev = BinderId::global();
  for (BinderId c = s.start; c != s.end;) {
    BinderId nx = heap_.binder(c).next;
    if (collectible(c)) {
      collect(s, prev, c);
    } else {
      prev = c;
    }
    c = nx;
  }
}

void Evaluator::collect(Spine& s, BinderId prev, BinderId c) {
  Binder& b = heap_.binder(c);
  BinderId nx = b.next;
  destroy(heap_, std::move(b.annot));
  destroy(heap_, std::move(b.rhs));
  if (prev.is_global()) {
    s.start = nx;
  } else {
    heap_.binder(prev).next = nx;
  }
  retarget_ends(heap_, s, c, nx);
  heap_.free_binder(c);
}

SpinePtr Evaluator::type_of(const Spine& s) {
  SpinePtr t = copy_spine(heap_, s);
  try {
    SpinePtr ty = std::visit(
        [&](const auto& h) -> SpinePtr {
          using H = std::decay_t<decltype(h)>;
          if constexpr (std::is_same_v<H, head::Var>) {
            return copy_spine(heap_, *heap_.binder(h.target).annot);
          } else if constexpr (std::is_same_v<H, head::VarT>) {
            return wind_new(heap_, *star(), t->start);
          } else if constexpr (std::is_same_v<H, head::Ctor>) {
            if (h.tag.kind == CtorTag::Kind::IntLit) return wind_new(heap_, *int_type(), t->start);
            if (h.tag.kind == CtorTag::Kind::Star || !h.payload) return wind_new(heap_, *star(), t->start);
            return copy_spine(heap_, *h.payload);
          } else if constexpr (std::is_same_v<H, head::Prim>) {
            return copy_spine(heap_, *h.annot);
          } else if constexpr (std::is_same_v<H, head::Dtor>) {
            throw UnificationRequired("type of a destructor application needs the constructor's field type");
          } else {
            throw std::logic_error("typeof on a spine with an unset head");
          }
        },
        t->head);
    splice(heap_, *t, std::move(ty));
    evaluate(*t);
    auto* c = std::get_if<head::Ctor>(&t->head);
    if (c && c->tag.kind == CtorTag::Kind::Hole && !t->pending.empty()) {
      throw UnificationRequired("applying a value whose type is a hole");
    }
  } catch (...) {
    destroy(heap_, std::move(t));
    throw;
  }
  return t;
}

namespace {
struct ThreadJob {
  const std::function<void()>* f;
  std::exception_ptr err;
};
void* thread_main(void* p) {
  auto* job = static_cast<ThreadJob*>(p);
  try {
    (*job->f)();
  } catch (...) {
    job->err = std::current_exception();
  }
  return nullptr;
}
}  // namespace

void run_with_stack(std::size_t bytes, const std::function<void()>& f) {
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  ThreadJob job{&f, nullptr};
  pthread_t th;
  int rc = pthread_create(&th, &attr, thread_main, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    f();
    return;
  }
  pthread_join(th, nullptr);
  if (job.err) std::rethrow_exception(job.err);
}

}  // namespace spinevm
