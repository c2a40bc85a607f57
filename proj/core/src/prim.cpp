#include "spinevm/prim.hpp"

#include <array>

#include "spinevm/eval.hpp"
#include "spinevm/fold.hpp"
#include "spinevm/wind.hpp"

namespace spinevm {
namespace {

TermPtr arith_type() { return lambda("_", int_type(), lambda("_", int_type(), int_type())); }

// Int -> Int -> (the type of a Church boolean, \t:*. \f:*. *)
TermPtr compare_type() {
  return lambda("_", int_type(), lambda("_", int_type(), lambda("t", star(), lambda("f", star(), star()))));
}

using Op = bool (*)(std::int64_t, std::int64_t, std::int64_t*);

PrimDef arith(const char* name, Op op) {
  return PrimDef{PrimTag{name, 2}, arith_type(), [name, op](PrimArgs& a) -> PrimResult {
                   auto x = a.force_int(0);
                   if (!x) return std::monostate{};
                   auto y = a.force_int(1);
                   if (!y) return std::monostate{};
                   std::int64_t r;
                   if (op(*x, *y, &r)) throw PrimFailure(std::string(name) + ": integer overflow");
                   return int_lit(r);
                 }};
}

template <typename Cmp>
PrimDef compare(const char* name, Cmp cmp) {
  return PrimDef{PrimTag{name, 2}, compare_type(), [cmp](PrimArgs& a) -> PrimResult {
                   auto x = a.force_int(0);
                   if (!x) return std::monostate{};
                   auto y = a.force_int(1);
                   if (!y) return std::monostate{};
                   return cmp(*x, *y) ? church_true() : church_false();
                 }};
}

const std::array<PrimDef, 5>& table() {
  static const std::array<PrimDef, 5> t{
      arith("addI", [](std::int64_t x, std::int64_t y, std::int64_t* r) { return __builtin_add_overflow(x, y, r); }),
      arith("subI", [](std::int64_t x, std::int64_t y, std::int64_t* r) { return __builtin_sub_overflow(x, y, r); }),
      arith("mulI", [](std::int64_t x, std::int64_t y, std::int64_t* r) { return __builtin_mul_overflow(x, y, r); }),
      compare("ltI", [](std::int64_t x, std::int64_t y) { return x < y; }),
      compare("eqI", [](std::int64_t x, std::int64_t y) { return x == y; }),
  };
  return t;
}

}  // namespace

std::span<const PrimDef> builtin_table() { return table(); }

const PrimDef* find_prim(std::string_view name) {
  for (const PrimDef& p : table()) {
    if (p.tag.name == name) return &p;
  }
  return nullptr;
}

TermPtr church_true() { return lambda("t", star(), lambda("f", star(), var(1))); }
TermPtr church_false() { return lambda("t", star(), lambda("f", star(), var(0))); }

std::optional<std::int64_t> PrimArgs::force_int(unsigned i) {
  if (i >= count_) throw std::out_of_range("primitive argument index");
  Spine& arg = *spine_.pending[spine_.pending.size() - 1 - i];
  ev_.need(arg);
  Heap& heap = ev_.heap();
  for (BinderId c = arg.start; c != arg.end; c = heap.binder(c).next) {
    if (heap.binder(c).is_open()) throw PrimTypeError("primitive argument is a function");
  }
  if (auto* c = std::get_if<head::Ctor>(&arg.head)) {
    if (c->tag.kind != CtorTag::Kind::IntLit || !arg.pending.empty()) {
      throw PrimTypeError("primitive argument is not an integer literal");
    }
    return c->tag.value;
  }
  return std::nullopt;
}

bool delta(Evaluator& ev, const PrimDef& p, Spine& s) {
  PrimArgs args(ev, s, p.tag.arity);
  PrimResult r = p.delta(args);
  auto* t = std::get_if<TermPtr>(&r);
  if (t == nullptr) return false;
  Heap& heap = ev.heap();
  SpinePtr u = wind_new(heap, **t, s.start);
  for (unsigned k = 0; k < p.tag.arity; ++k) {
    destroy(heap, std::move(s.pending.back()));
    s.pending.pop_back();
  }
  splice(heap, s, std::move(u));
  return true;
}

}  // namespace spinevm
