#include "spinevm/term.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spinevm/prim.hpp"

namespace spinevm {

CtorTag CtorTag::named(std::string_view n) {
  if (n == "Star") return star();
  if (n == "Hole") return hole();
  if (n == "Int") return int_type();
  if (n == "Cons") return {Kind::Cons, 0, {}};
  if (n == "Nil") return {Kind::Nil, 0, {}};
  if (n == "Tup") return {Kind::Tup, 0, {}};
  return {Kind::User, 0, std::string(n)};
}

std::string CtorTag::display_name() const {
  switch (kind) {
    case Kind::Star: return "Star";
    case Kind::Hole: return "Hole";
    case Kind::IntLit: return std::to_string(value);
    case Kind::Int: return "Int";
    case Kind::Cons: return "Cons";
    case Kind::Nil: return "Nil";
    case Kind::Tup: return "Tup";
    case Kind::User: return name;
  }
  return name;
}

namespace {
TermPtr make(Term::Node n) { return std::make_shared<const Term>(Term{std::move(n)}); }
}  // namespace

TermPtr apply(TermPtr fun, TermPtr arg) { return make(node::Apply{std::move(fun), std::move(arg)}); }
TermPtr lambda(std::string name, TermPtr annot, TermPtr body) {
  return make(node::Lambda{std::move(name), std::move(annot), std::move(body)});
}
TermPtr letrec(std::string name, TermPtr annot, TermPtr rhs, TermPtr body) {
  return make(node::LetRec{std::move(name), std::move(annot), std::move(rhs), std::move(body)});
}
TermPtr var(std::size_t index) { return make(node::Var{index}); }
TermPtr var_t(std::size_t index) { return make(node::VarT{index}); }
TermPtr ctor(CtorTag tag, TermPtr payload) { return make(node::Ctor{std::move(tag), std::move(payload)}); }
TermPtr dtor(std::size_t index) { return make(node::Dtor{index}); }
TermPtr prim(PrimTag tag, TermPtr annot) { return make(node::Prim{std::move(tag), std::move(annot)}); }

TermPtr star() {
  static const TermPtr s = ctor(CtorTag::star());
  return s;
}
TermPtr hole(TermPtr annot) { return ctor(CtorTag::hole(), std::move(annot)); }
TermPtr int_lit(std::int64_t v) { return ctor(CtorTag::int_lit(v), star()); }
TermPtr int_type() {
  static const TermPtr t = ctor(CtorTag::int_type(), star());
  return t;
}

SyntaxError::SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

UnboundName::UnboundName(std::string name)
    : std::runtime_error("unbound name '" + name + "'"), name_(std::move(name)) {}

// ---------------------------------------------------------------------------
// alpha_eq and structural utilities

bool alpha_eq(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.node.index() != b.node.index()) return false;
  auto eq = [](const TermPtr& x, const TermPtr& y) {
    if (!x || !y) return !x && !y;
    return alpha_eq(*x, *y);
  };
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        const auto& m = std::get<N>(b.node);
        if constexpr (std::is_same_v<N, node::Apply>) {
          return eq(n.fun, m.fun) && eq(n.arg, m.arg);
        } else if constexpr (std::is_same_v<N, node::Lambda>) {
          return eq(n.annot, m.annot) && eq(n.body, m.body);
        } else if constexpr (std::is_same_v<N, node::LetRec>) {
          return eq(n.annot, m.annot) && eq(n.rhs, m.rhs) && eq(n.body, m.body);
        } else if constexpr (std::is_same_v<N, node::Ctor>) {
          return n.tag == m.tag && eq(n.payload, m.payload);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          return n.prim == m.prim && eq(n.annot, m.annot);
        } else {
          return n.index == m.index;
        }
      },
      a.node);
}

namespace {

template <typename F>
void for_children(const Term& t, F&& f) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Apply>) {
          f(*n.fun, 0);
          f(*n.arg, 0);
        } else if constexpr (std::is_same_v<N, node::Lambda>) {
          f(*n.annot, 0);
          f(*n.body, 1);
        } else if constexpr (std::is_same_v<N, node::LetRec>) {
          f(*n.annot, 0);
          f(*n.rhs, 1);
          f(*n.body, 1);
        } else if constexpr (std::is_same_v<N, node::Ctor>) {
          if (n.payload) f(*n.payload, 0);
        } else if constexpr (std::is_same_v<N, node::Prim>) {
          f(*n.annot, 0);
        }
      },
      t.node);
}

bool closed_at(const Term& t, std::size_t binders) {
  if (auto v = t.as<node::Var>()) return v->index < binders;
  if (auto v = t.as<node::VarT>()) return v->index < binders;
  if (auto v = t.as<node::Dtor>()) return v->index < binders;
  bool ok = true;
  for_children(t, [&](const Term& c, std::size_t extra) { ok = ok && closed_at(c, binders + extra); });
  return ok;
}

}  // namespace

std::size_t count_leaves(const Term& t) {
  std::size_t n = 0;
  if (!t.as<node::Apply>() && !t.as<node::Lambda>() && !t.as<node::LetRec>()) n = 1;
  for_children(t, [&](const Term& c, std::size_t) { n += count_leaves(c); });
  return n;
}

std::size_t count_binders(const Term& t) {
  std::size_t n = (t.as<node::Lambda>() || t.as<node::LetRec>()) ? 1 : 0;
  for_children(t, [&](const Term& c, std::size_t) { n += count_binders(c); });
  return n;
}

bool is_closed(const Term& t) { return closed_at(t, 0); }

std::size_t depth(const Term& t) {
  std::size_t d = 0;
  for_children(t, [&](const Term& c, std::size_t) { d = std::max(d, depth(c)); });
  return d + 1;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool references(const Term& t, std::size_t index) {
  if (auto v = t.as<node::Var>()) return v->index == index;
  if (auto v = t.as<node::VarT>()) return v->index == index;
  if (auto v = t.as<node::Dtor>()) return v->index == index;
  bool found = false;
  for_children(t, [&](const Term& c, std::size_t extra) { found = found || references(c, index + extra); });
  return found;
}

bool is_reserved(std::string_view n) {
  return n == "letrec" || n == "in" || n == "Int" || find_prim(n) != nullptr;
}

class Printer {
 public:
  std::string run(const Term& t) {
    term(t);
    return out_.str();
  }

 private:
  std::ostringstream out_;
  std::vector<std::string> scope_;  // innermost last

  std::string pick_name(const std::string& hint, const Term& body, std::size_t body_index) {
    bool used = references(body, body_index);
    std::string base = hint.empty() ? "_" : hint;
    if (base == "_" && !used) return base;
    if (base == "_") base = "v";
    auto taken = [&](const std::string& n) {
      return is_reserved(n) || std::find(scope_.begin(), scope_.end(), n) != scope_.end();
    };
    if (!taken(base)) return base;
    for (std::size_t i = 1;; ++i) {
      std::string cand = base + std::to_string(i);
      if (!taken(cand)) return cand;
    }
  }

  void ref(std::size_t index) {
    if (index < scope_.size()) {
      out_ << scope_[scope_.size() - 1 - index];
    } else {
      out_ << '#' << index;
    }
  }

  void term(const Term& t) {
    if (auto l = t.as<node::Lambda>()) {
      std::string n = pick_name(l->name, *l->body, 0);
      out_ << '\\' << n << ':';
      annot(*l->annot);
      out_ << ". ";
      scope_.push_back(n);
      term(*l->body);
      scope_.pop_back();
    } else if (auto r = t.as<node::LetRec>()) {
      // The name must be usable in both rhs and body.
      std::string n = pick_name(r->name, *apply(r->rhs, r->body), 0);
      out_ << "letrec " << n << ':';
      annot(*r->annot);
      out_ << " = ";
      scope_.push_back(n);
      term(*r->rhs);
      out_ << " in ";
      term(*r->body);
      scope_.pop_back();
    } else {
      app(t);
    }
  }

  // Annotations stop at '.' or '=', so binders inside them are parenthesized.
  void annot(const Term& t) {
    if (t.as<node::Lambda>() || t.as<node::LetRec>()) {
      out_ << '(';
      term(t);
      out_ << ')';
    } else {
      app(t);
    }
  }

  void app(const Term& t) {
    if (auto a = t.as<node::Apply>()) {
      app(*a->fun);
      out_ << ' ';
      atom(*a->arg);
    } else {
      atom(t);
    }
  }

  void atom(const Term& t) {
    if (auto v = t.as<node::Var>()) {
      ref(v->index);
    } else if (auto v = t.as<node::VarT>()) {
      out_ << '\'';
      ref(v->index);
    } else if (auto v = t.as<node::Dtor>()) {
      out_ << '!';
      ref(v->index);
    } else if (auto c = t.as<node::Ctor>()) {
      ctor_atom(*c);
    } else if (auto p = t.as<node::Prim>()) {
      out_ << p->prim.name;
      const PrimDef* def = find_prim(p->prim.name);
      if (!def || def->tag.arity != p->prim.arity) {
        // Unknown primitives cannot round-trip; print something recognizable.
        out_ << "/*" << p->prim.arity << "*/";
      }
      if (!def || !alpha_eq(*p->annot, *def->annot)) {
        out_ << ':';
        atom(*p->annot);
      }
    } else {
      out_ << '(';
      term(t);
      out_ << ')';
    }
  }

  static bool is_star(const TermPtr& p) {
    if (!p) return false;
    auto c = p->as<node::Ctor>();
    return c && c->tag.kind == CtorTag::Kind::Star && !c->payload;
  }

  void ctor_atom(const node::Ctor& c) {
    using K = CtorTag::Kind;
    switch (c.tag.kind) {
      case K::Star:
        if (!c.payload) {
          out_ << '*';
          return;
        }
        break;
      case K::Hole:
        if (c.payload) {
          out_ << "?:";
          atom(*c.payload);
          return;
        }
        break;
      case K::IntLit:
        if (is_star(c.payload)) {
          out_ << c.tag.value;
          return;
        }
        break;
      case K::Int:
        if (is_star(c.payload)) {
          out_ << "Int";
          return;
        }
        break;
      default:
        break;
    }
    out_ << '%' << c.tag.display_name();
    if (c.payload) {
      out_ << ':';
      atom(*c.payload);
    }
  }
};

}  // namespace

std::string print(const Term& t) { return Printer{}.run(t); }

}  // namespace spinevm
