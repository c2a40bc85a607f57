#include "spinevm/oracle.hpp"

#include <functional>
#include <cstdlib>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace spinevm::oracle {
namespace {

// Private term representation. Dtor is kept as "destruct this term" so that
// substitution can put any value under it.
enum class K { App, Lam, Rec, Var, Ctor, DtorOf, Prim };

struct O;
using OP = std::shared_ptr<const O>;

struct O {
  K k;
  std::string name;
  OP a, b, c;
  std::size_t idx = 0;
  CtorTag tag;
  PrimTag prim;
};

OP mk(K k, std::string name = {}, OP a = nullptr, OP b = nullptr, OP c = nullptr) {
  auto o = std::make_shared<O>();
  o->k = k;
  o->name = std::move(name);
  o->a = std::move(a);
  o->b = std::move(b);
  o->c = std::move(c);
  return o;
}
OP mk_var(std::size_t i) {
  auto o = std::make_shared<O>();
  o->k = K::Var;
  o->idx = i;
  return o;
}
OP mk_ctor(CtorTag tag, OP payload) {
  auto o = std::make_shared<O>();
  o->k = K::Ctor;
  o->tag = std::move(tag);
  o->a = std::move(payload);
  return o;
}
OP mk_prim(PrimTag tag, OP annot) {
  auto o = std::make_shared<O>();
  o->k = K::Prim;
  o->prim = std::move(tag);
  o->a = std::move(annot);
  return o;
}
OP with(const OP& t, OP a, OP b = nullptr, OP c = nullptr) {
  auto o = std::make_shared<O>(*t);
  o->a = std::move(a);
  o->b = std::move(b);
  o->c = std::move(c);
  return o;
}

// Binders introduced by child i (annotations live outside their binder).
std::size_t binds(const O& t, int child) {
  if (t.k == K::Lam) return child == 1 ? 1 : 0;
  if (t.k == K::Rec) return child == 0 ? 0 : 1;
  return 0;
}

OP shift(const OP& t, std::ptrdiff_t d, std::size_t cutoff) {
  if (!t) return t;
  if (t->k == K::Var) return t->idx >= cutoff ? mk_var(static_cast<std::size_t>(t->idx + d)) : t;
  return with(t, shift(t->a, d, cutoff + binds(*t, 0)), shift(t->b, d, cutoff + binds(*t, 1)),
              shift(t->c, d, cutoff + binds(*t, 2)));
}

// Removes binder `depth` (relative to t) and puts v, which lives outside it,
// in its place.
OP subst(const OP& t, std::size_t depth, const OP& v) {
  if (!t) return t;
  if (t->k == K::Var) {
    if (t->idx == depth) return shift(v, static_cast<std::ptrdiff_t>(depth), 0);
    if (t->idx > depth) return mk_var(t->idx - 1);
    return t;
  }
  return with(t, subst(t->a, depth + binds(*t, 0), v), subst(t->b, depth + binds(*t, 1), v),
              subst(t->c, depth + binds(*t, 2), v));
}

// env.back() is the annotation of index 0, as it was at its own binder.
OP from_term(const Term& t, std::vector<OP>& env) {
  return std::visit(
      [&](const auto& n) -> OP {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Apply>) {
          return mk(K::App, {}, from_term(*n.fun, env), from_term(*n.arg, env));
        } else if constexpr (std::is_same_v<N, node::Lambda>) {
          OP annot = from_term(*n.annot, env);
          env.push_back(annot);
          OP body = from_term(*n.body, env);
          env.pop_back();
          return mk(K::Lam, n.name, annot, body);
        } else if constexpr (std::is_same_v<N, node::LetRec>) {
          OP annot = from_term(*n.annot, env);
          env.push_back(annot);
          OP rhs = from_term(*n.rhs, env);
          OP body = from_term(*n.body, env);
          env.pop_back();
          return mk(K::Rec, n.name, annot, rhs, body);
        } else if constexpr (std::is_same_v<N, node::Var>) {
          return mk_var(n.index);
        } else if constexpr (std::is_same_v<N, node::VarT>) {
          if (n.index >= env.size()) throw std::invalid_argument("free type reference");
          return shift(env[env.size() - 1 - n.index], static_cast<std::ptrdiff_t>(n.index + 1), 0);
        } else if constexpr (std::is_same_v<N, node::Ctor>) {
          return mk_ctor(n.tag, n.payload ? from_term(*n.payload, env) : nullptr);
        } else if constexpr (std::is_same_v<N, node::Dtor>) {
          return mk(K::DtorOf, {}, mk_var(n.index));
        } else {
          return mk_prim(n.prim, from_term(*n.annot, env));
        }
      },
      t.node);
}

TermPtr to_term(const OP& t) {
  switch (t->k) {
    case K::App: return apply(to_term(t->a), to_term(t->b));
    case K::Lam: return lambda(t->name, to_term(t->a), to_term(t->b));
    case K::Rec: return letrec(t->name, to_term(t->a), to_term(t->b), to_term(t->c));
    case K::Var: return var(t->idx);
    case K::Ctor: return ctor(t->tag, t->a ? to_term(t->a) : nullptr);
    case K::DtorOf:
      if (t->a->k == K::Var) return dtor(t->a->idx);
      return apply(lambda("d", star(), dtor(0)), to_term(t->a));
    case K::Prim: return prim(t->prim, to_term(t->a));
  }
  return nullptr;
}

OP star_o() { return mk_ctor(CtorTag::star(), nullptr); }

OP church(bool which) {
  // \t:*. \f:*. t   or   \t:*. \f:*. f
  return mk(K::Lam, "t", star_o(), mk(K::Lam, "f", star_o(), mk_var(which ? 1 : 0)));
}

OP delta(const std::string& name, std::int64_t x, std::int64_t y) {
  std::int64_t r = 0;
  bool overflow = false;
  if (name == "addI") {
    overflow = __builtin_add_overflow(x, y, &r);
  } else if (name == "subI") {
    overflow = __builtin_sub_overflow(x, y, &r);
  } else if (name == "mulI") {
    overflow = __builtin_mul_overflow(x, y, &r);
  } else if (name == "ltI") {
    return church(x < y);
  } else if (name == "eqI") {
    return church(x == y);
  } else {
    throw Stuck("unknown primitive " + name);
  }
  if (overflow) throw Stuck(name + ": integer overflow");
  return mk_ctor(CtorTag::int_lit(r), star_o());
}

OP rebuild(OP head, const std::vector<OP>& args) {
  for (std::size_t k = args.size(); k-- > 0;) head = mk(K::App, {}, head, args[k]);
  return head;
}

class Reducer {
 public:
  explicit Reducer(std::uint64_t budget) : budget_(budget) {}

  // `full` also reduces the arguments of the stuck head.
  OP hnf(OP t, bool full) {
    std::vector<OP> args;  // back() is the innermost argument
    for (;;) {
      tick();
      switch (t->k) {
        case K::App:
          args.push_back(t->b);
          t = t->a;
          continue;
        case K::Lam:
          if (!args.empty()) {
            OP v = args.back();
            args.pop_back();
            t = subst(t->b, 0, v);
            continue;
          }
          return with(t, t->a, hnf(t->b, full));
        case K::Rec: {
          OP fix = with(t, t->a, t->b, mk_var(0));
          OP val = subst(t->b, 0, fix);
          t = subst(t->c, 0, val);
          continue;
        }
        case K::Prim: {
          unsigned k = t->prim.arity;
          if (args.size() < k) return finish(t, args, full);
          std::vector<std::int64_t> vals;
          bool stuck = false;
          for (unsigned i = 0; i < k && !stuck; ++i) {
            OP& a = args[args.size() - 1 - i];
            a = hnf(a, true);
            auto v = literal(a);
            if (v) {
              vals.push_back(*v);
            } else {
              stuck = true;
            }
          }
          if (stuck) return finish(t, args, full);
          for (unsigned i = 0; i < k; ++i) args.pop_back();
          t = delta(t->prim.name, vals[0], vals[1]);
          continue;
        }
        case K::DtorOf: {
          OP w = hnf(t->a, false);
          if (w->k == K::Lam) throw Stuck("destructor applied to a function");
          OP h = w;
          while (h->k == K::App) h = h->a;
          if (h->k == K::Ctor) {
            if (!h->a) throw Stuck("constructor without payload");
            t = h->a;
            continue;
          }
          return finish(with(t, w), args, full);
        }
        case K::Var:
        case K::Ctor:
          return finish(t, args, full);
      }
    }
  }

  OP strong(OP t) {
    t = hnf(t, true);
    return deep(t);
  }

 private:
  std::uint64_t budget_;

  void tick() {
    if (budget_ == 0) throw BudgetExceeded("oracle step budget exhausted");
    --budget_;
  }

  OP finish(OP head, std::vector<OP>& args, bool full) {
    if (full) {
      for (auto& a : args) a = hnf(a, true);
    }
    return rebuild(std::move(head), args);
  }

  // Value of a reduced primitive argument, nullopt if it is stuck.
  static std::optional<std::int64_t> literal(const OP& a) {
    if (a->k == K::Lam) throw Stuck("primitive argument is a function");
    if (a->k == K::Ctor) {
      if (a->tag.kind != CtorTag::Kind::IntLit) throw Stuck("primitive argument is not an integer");
      return a->tag.value;
    }
    const O* h = a.get();
    while (h->k == K::App) h = h->a.get();
    if (h->k == K::Ctor) throw Stuck("primitive argument is an applied constructor");
    return std::nullopt;
  }

  // Normalizes every subterm of a head-normal term.
  OP deep(const OP& t) {
    switch (t->k) {
      case K::Lam: return with(t, strong(t->a), deep(t->b));
      case K::App: return with(t, deep(t->a), strong(t->b));
      case K::Ctor: return with(t, t->a ? strong(t->a) : nullptr);
      case K::Prim: return with(t, strong(t->a));
      case K::DtorOf: return with(t, deep(t->a));
      case K::Var: return t;
      case K::Rec: return strong(t);
    }
    return t;
  }
};

OP convert(const Term& t) {
  std::vector<OP> env;
  return from_term(t, env);
}

HeadShape shape(const OP& t) {
  HeadShape s;
  const O* c = t.get();
  while (c->k == K::Lam) {
    ++s.open;
    c = c->b.get();
  }
  while (c->k == K::App) {
    ++s.pending;
    c = c->a.get();
  }
  switch (c->k) {
    case K::Var: s.head = head_label_var(); break;
    case K::Ctor: s.head = head_label(c->tag); break;
    case K::Prim: s.head = head_label(c->prim); break;
    case K::DtorOf: s.head = head_label_dtor(); break;
    default: s.head = "?"; break;
  }
  return s;
}

}  // namespace

std::string head_label_var() { return "var"; }
std::string head_label_dtor() { return "dtor"; }
std::string head_label(const CtorTag& tag) {
  if (tag.kind == CtorTag::Kind::IntLit) return "ctor:int:" + std::to_string(tag.value);
  return "ctor:" + tag.display_name();
}
std::string head_label(const PrimTag& tag) { return "prim:" + tag.name; }

TermPtr normalize_whnf(const Term& t, std::uint64_t budget, HeadShape* out) {
  Reducer r(budget);
  OP w = r.hnf(convert(t), true);
  if (out) *out = shape(w);
  return to_term(w);
}

TermPtr normalize_strong(const Term& t, std::uint64_t budget) {
  Reducer r(budget);
  return to_term(r.strong(convert(t)));
}

bool strong_equal(const Term& a, const Term& b, std::uint64_t budget) {
  return alpha_eq(*normalize_strong(a, budget), *normalize_strong(b, budget));
}

// ---------------------------------------------------------------------------
// Generator

namespace {

struct Ty;
using TyP = std::shared_ptr<const Ty>;
struct Ty {
  enum Kind { Int, Star, Fun, Box } k;
  TyP a, b;
};

bool same(const TyP& x, const TyP& y) {
  if (x->k != y->k) return false;
  if (x->k == Ty::Fun) return same(x->a, y->a) && same(x->b, y->b);
  if (x->k == Ty::Box) return same(x->a, y->a);
  return true;
}

class Gen {
 public:
  Gen(std::uint64_t seed, unsigned max_depth) : rng_(seed), max_depth_(max_depth) {}

  TermPtr run() { return gen(small_type(), max_depth_); }

 private:
  struct Entry {
    TyP ty;
    bool usable;
  };
  std::mt19937_64 rng_;
  unsigned max_depth_;
  std::vector<Entry> ctx_;  // back() is index 0

  TyP t_int() { return std::make_shared<Ty>(Ty{Ty::Int, nullptr, nullptr}); }
  TyP t_star() { return std::make_shared<Ty>(Ty{Ty::Star, nullptr, nullptr}); }
  TyP t_fun(TyP a, TyP b) { return std::make_shared<Ty>(Ty{Ty::Fun, std::move(a), std::move(b)}); }
  TyP t_box(TyP a) { return std::make_shared<Ty>(Ty{Ty::Box, std::move(a), nullptr}); }

  unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }
  bool chance(unsigned pct) { return pick(100) < pct; }

  TyP small_type() {
    switch (pick(8)) {
      case 0: return t_star();
      case 1:
      case 2: return t_box(t_int());
      case 3:
      case 4: return t_fun(t_int(), t_int());
      default: return t_int();
    }
  }

  TermPtr type_term(const TyP& t) {
    switch (t->k) {
      case Ty::Int: return int_type();
      case Ty::Star: return star();
      case Ty::Fun: return lambda("_", type_term(t->a), type_term(t->b));
      case Ty::Box: return ctor(CtorTag::named("Box"), type_term(t->a));
    }
    return star();
  }

  TermPtr annot(const TyP& t) {
    if (chance(12)) return hole(star());
    if (!ctx_.empty() && chance(10)) return var_t(pick(static_cast<unsigned>(ctx_.size())));
    return type_term(t);
  }

  std::vector<std::size_t> vars_of(const TyP& t) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ctx_.size(); ++i) {
      const Entry& e = ctx_[ctx_.size() - 1 - i];
      if (e.usable && same(e.ty, t)) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> boxes_of(const TyP& t) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ctx_.size(); ++i) {
      const Entry& e = ctx_[ctx_.size() - 1 - i];
      if (e.usable && e.ty->k == Ty::Box && same(e.ty->a, t)) out.push_back(i);
    }
    return out;
  }

  TermPtr under(const TyP& bound, bool usable, const std::function<TermPtr()>& f) {
    ctx_.push_back(Entry{bound, usable});
    TermPtr r = f();
    ctx_.pop_back();
    return r;
  }

  std::string fresh() { return std::string(1, static_cast<char>('a' + ctx_.size() % 26)); }

  TermPtr leaf(const TyP& t) {
    auto vs = vars_of(t);
    if (!vs.empty() && chance(55)) return var(vs[pick(static_cast<unsigned>(vs.size()))]);
    auto bs = boxes_of(t);
    if (!bs.empty() && chance(40)) return dtor(bs[pick(static_cast<unsigned>(bs.size()))]);
    switch (t->k) {
      case Ty::Int: return int_lit(static_cast<std::int64_t>(pick(19)) - 9);
      case Ty::Star:
        switch (pick(4)) {
          case 0: return int_type();
          case 1: return hole(star());
          case 2:
            if (!ctx_.empty()) return var_t(pick(static_cast<unsigned>(ctx_.size())));
            return star();
          default: return star();
        }
      case Ty::Fun:
        if (t->a->k == Ty::Int && t->b->k == Ty::Int && chance(30)) {
          static const char* ops[] = {"addI", "subI", "mulI"};
          return apply(prim(PrimTag{ops[pick(3)], 2}, arith_annot()), int_lit(pick(5)));
        }
        return lambda(fresh(), annot(t->a), under(t->a, true, [&] { return leaf(t->b); }));
      case Ty::Box: return ctor(CtorTag::named("Box"), leaf(t->a));
    }
    return star();
  }

  static TermPtr arith_annot() { return lambda("_", int_type(), lambda("_", int_type(), int_type())); }
  static TermPtr cmp_annot() {
    return lambda("_", int_type(), lambda("_", int_type(), lambda("t", star(), lambda("f", star(), star()))));
  }

  TermPtr gen(const TyP& t, unsigned d) {
    if (d == 0 || chance(30)) return leaf(t);
    switch (pick(t->k == Ty::Int ? 7 : 5)) {
      case 0: {  // beta redex
        TyP a = small_type();
        std::string n = fresh();
        TermPtr arg = gen(a, d - 1);
        TermPtr ann = annot(a);
        TermPtr body = under(a, true, [&] { return gen(t, d - 1); });
        return apply(lambda(n, ann, body), arg);
      }
      case 1: {  // non-recursive letrec
        TyP a = small_type();
        std::string n = fresh();
        TermPtr ann = annot(a);
        TermPtr rhs = under(a, false, [&] { return gen(a, d - 1); });
        TermPtr body = under(a, true, [&] { return gen(t, d - 1); });
        return letrec(n, ann, rhs, body);
      }
      case 2: {  // application of a generated function
        TyP a = chance(70) ? t_int() : small_type();
        TermPtr f = gen(t_fun(a, t), d - 1);
        return apply(f, gen(a, d - 1));
      }
      case 3: {  // comparison choosing a branch
        static const char* ops[] = {"ltI", "eqI"};
        TermPtr c = prim(PrimTag{ops[pick(2)], 2}, cmp_annot());
        c = apply(apply(c, gen(t_int(), d - 1)), gen(t_int(), d - 1));
        return apply(apply(c, gen(t, d - 1)), gen(t, d - 1));
      }
      case 4:
        if (t->k == Ty::Fun) {
          std::string n = fresh();
          TermPtr ann = annot(t->a);
          return lambda(n, ann, under(t->a, true, [&] { return gen(t->b, d - 1); }));
        }
        if (t->k == Ty::Box) return ctor(CtorTag::named("Box"), gen(t->a, d - 1));
        return leaf(t);
      case 5: {  // arithmetic
        static const char* ops[] = {"addI", "subI", "mulI"};
        TermPtr p = prim(PrimTag{ops[pick(3)], 2}, arith_annot());
        return apply(apply(p, gen(t, d - 1)), gen(t, d - 1));
      }
      default: {  // destruct a box built on the spot
        std::string n = fresh();
        TyP bt = t_box(t);
        TermPtr arg = gen(bt, d - 1);
        TermPtr ann = annot(bt);
        return apply(lambda(n, ann, under(bt, true, [&] { return dtor(0); })), arg);
      }
    }
  }
};

}  // namespace

TermPtr gen_term(std::uint64_t seed, unsigned max_depth) { return Gen(seed, max_depth).run(); }

std::uint64_t queens_count(unsigned n) {
  std::vector<int> cols;
  std::function<std::uint64_t()> place = [&]() -> std::uint64_t {
    if (cols.size() == n) return 1;
    std::uint64_t total = 0;
    int row = static_cast<int>(cols.size());
    for (int c = 0; c < static_cast<int>(n); ++c) {
      bool ok = true;
      for (int r = 0; r < row && ok; ++r) {
        ok = cols[r] != c && std::abs(cols[r] - c) != row - r;
      }
      if (!ok) continue;
      cols.push_back(c);
      total += place();
      cols.pop_back();
    }
    return total;
  };
  return place();
}

std::int64_t tak_direct(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t* calls) {
  if (calls) ++*calls;
  if (!(y < x)) return z;
  return tak_direct(tak_direct(x - 1, y, z, calls), tak_direct(y - 1, z, x, calls), tak_direct(z - 1, x, y, calls),
                    calls);
}

}  // namespace spinevm::oracle
