#include "spinevm/wind.hpp"

#include <algorithm>
#include <vector>

#include "spinevm/fold.hpp"
#include "spinevm/prim.hpp"

namespace spinevm {
namespace {

BinderId walk(const Heap& heap, BinderId from, std::size_t n) {
  BinderId c = from;
  for (std::size_t i = 0; i < n && !c.is_global(); ++i) c = heap.binder(c).next;
  if (c.is_global()) throw UnboundIndex("index " + std::to_string(n) + " walks past the global end");
  return c;
}

SpinePtr wind_sub(Heap& heap, const Term& t, EndRef end) {
  SpinePtr s = heap.new_spine(end);
  try {
    wind(heap, *s, t);
  } catch (...) {
    destroy(heap, std::move(s));
    throw;
  }
  return s;
}

BinderId bind_ref(Heap& heap, const Spine& s, std::size_t index) {
  BinderId b = walk(heap, s.start, index);
  heap.incref(b);
  return b;
}

// Scratch map from old binder ids to their copies, reset by generation.
class Remap {
 public:
  void begin(std::size_t cap) {
    if (++gen_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      gen_ = 1;
    }
    if (stamp_.size() < cap) {
      stamp_.resize(cap, 0);
      to_.resize(cap);
    }
  }
  void set(BinderId from, BinderId to) {
    stamp_[from.value] = gen_;
    to_[from.value] = to;
  }
  bool has(BinderId b) const { return !b.is_global() && b.value < stamp_.size() && stamp_[b.value] == gen_; }
  BinderId operator()(BinderId b) const { return has(b) ? to_[b.value] : b; }

 private:
  std::vector<std::uint32_t> stamp_;
  std::vector<BinderId> to_;
  std::uint32_t gen_ = 0;
};

class Copier {
 public:
  explicit Copier(Heap& heap) : heap_(heap), map_(scratch()) {}

  SpinePtr run(const Spine& s) {
    map_.begin(heap_.capacity());
    allocate(s);
    return copy(s);
  }

 private:
  Heap& heap_;
  Remap& map_;

  static Remap& scratch() {
    thread_local Remap r;
    return r;
  }

  void allocate(const Spine& s) {
    for (BinderId c = s.start; c != s.end; c = heap_.binder(c).next) {
      BinderId fresh = heap_.new_binder(heap_.binder(c).name, BinderId::global());
      map_.set(c, fresh);
    }
    for_each_child(static_cast<const Heap&>(heap_), s, [&](const Spine& child) { allocate(child); });
  }

  SpinePtr copy(const Spine& s) {
    SpinePtr n = heap_.new_spine(map_(s.end));
    n->start = map_(s.start);
    for (BinderId c = s.start; c != s.end;) {
      const Binder& b = heap_.binder(c);
      BinderId nb = map_(c);
      heap_.binder(nb).next = map_(b.next);
      heap_.binder(nb).annot = copy(*b.annot);
      if (b.rhs) heap_.binder(nb).rhs = copy(*b.rhs);
      c = b.next;
    }
    n->head = copy_head(s.head);
    n->pending.reserve(s.pending.size());
    for (const auto& app : s.pending) n->pending.push_back(copy(*app));
    return n;
  }

  BinderId ref(BinderId b) {
    BinderId t = map_(b);
    heap_.incref(t);
    return t;
  }

  HeadValue copy_head(const HeadValue& h) {
    return std::visit(
        [&](const auto& v) -> HeadValue {
          using H = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<H, head::Var>) {
            return head::Var{ref(v.target)};
          } else if constexpr (std::is_same_v<H, head::VarT>) {
            return head::VarT{ref(v.target)};
          } else if constexpr (std::is_same_v<H, head::Dtor>) {
            return head::Dtor{ref(v.target)};
          } else if constexpr (std::is_same_v<H, head::Ctor>) {
            return head::Ctor{v.tag, v.payload ? copy(*v.payload) : nullptr};
          } else if constexpr (std::is_same_v<H, head::Prim>) {
            return head::Prim{v.def, copy(*v.annot)};
          } else {
            return head::Unset{};
          }
        },
        h);
  }
};

}  // namespace

Spine& wind(Heap& heap, Spine& s, const Term& t) {
  if (!std::holds_alternative<head::Unset>(s.head)) throw std::logic_error("wind into a spine with a head");
  const Term* cur = &t;
  for (;;) {
    if (auto a = cur->as<node::Apply>()) {
      s.pending.push_back(wind_sub(heap, *a->arg, s.start));
      cur = a->fun.get();
    } else if (auto l = cur->as<node::Lambda>()) {
      SpinePtr annot = wind_sub(heap, *l->annot, s.start);
      BinderId b = heap.new_binder(l->name, s.start);
      Binder& bd = heap.binder(b);
      bd.annot = std::move(annot);
      if (!s.pending.empty()) {
        bd.rhs = std::move(s.pending.back());
        s.pending.pop_back();
      }
      s.start = b;
      cur = l->body.get();
    } else if (auto r = cur->as<node::LetRec>()) {
      SpinePtr annot = wind_sub(heap, *r->annot, s.start);
      BinderId b = heap.new_binder(r->name, s.start);
      heap.binder(b).annot = std::move(annot);
      s.start = b;
      SpinePtr rhs = wind_sub(heap, *r->rhs, b);
      heap.binder(b).rhs = std::move(rhs);
      cur = r->body.get();
    } else if (auto v = cur->as<node::Var>()) {
      s.head = head::Var{bind_ref(heap, s, v->index)};
      return s;
    } else if (auto v = cur->as<node::VarT>()) {
      s.head = head::VarT{bind_ref(heap, s, v->index)};
      return s;
    } else if (auto v = cur->as<node::Dtor>()) {
      s.head = head::Dtor{bind_ref(heap, s, v->index)};
      return s;
    } else if (auto c = cur->as<node::Ctor>()) {
      SpinePtr payload = c->payload ? wind_sub(heap, *c->payload, s.start) : nullptr;
      s.head = head::Ctor{c->tag, std::move(payload)};
      return s;
    } else if (auto p = cur->as<node::Prim>()) {
      const PrimDef* def = find_prim(p->prim.name);
      if (!def || def->tag.arity != p->prim.arity) {
        throw std::invalid_argument("unknown primitive '" + p->prim.name + "'");
      }
      s.head = head::Prim{def, wind_sub(heap, *p->annot, s.start)};
      return s;
    }
  }
}

SpinePtr wind_new(Heap& heap, const Term& t, EndRef end) { return wind_sub(heap, t, end); }

SpinePtr copy_spine(Heap& heap, const Spine& s) {
  return Copier(heap).run(s);
}

void splice(Heap& heap, Spine& s, SpinePtr u) {
  release_head(heap, s);
  const BinderId boundary = s.start;
  if (u->end != boundary) {
    retarget_ends(heap, *u, u->end, boundary);
    if (u->start == u->end) {
      u->start = boundary;
    } else {
      BinderId last = u->start;
      while (heap.binder(last).next != u->end) last = heap.binder(last).next;
      heap.binder(last).next = boundary;
    }
    u->end = boundary;
  }

  if (!s.pending.empty() && u->start != boundary) {
    std::vector<BinderId> seg = segment(heap, *u);
    for (std::size_t k = seg.size(); k-- > 0 && !s.pending.empty();) {
      Binder& b = heap.binder(seg[k]);
      if (!b.is_open()) continue;
      b.rhs = std::move(s.pending.back());
      s.pending.pop_back();
    }
  }
  for (auto& app : u->pending) s.pending.push_back(std::move(app));
  s.head = std::move(u->head);
  s.start = u->start;
}

void append_stack(Heap& heap, Spine& s, const Spine& u) { splice(heap, s, copy_spine(heap, u)); }

void append_stack_by_rewind(Heap& heap, Spine& s, const Spine& u) {
  TermPtr t = get_ast(heap, u, Rebase{u.end, s.start});
  release_head(heap, s);
  wind(heap, s, *t);
}

}  // namespace spinevm
