#pragma once

// Initial (syntax-tree) encoding of terms with de Bruijn indices, plus the
// textual surface syntax used by the tools.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace spinevm {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct CtorTag {
  enum class Kind : std::uint8_t { Star, Hole, IntLit, Int, Cons, Nil, Tup, User };

  Kind kind = Kind::Star;
  std::int64_t value = 0;  // IntLit only
  std::string name;        // User only

  static CtorTag star() { return {Kind::Star, 0, {}}; }
  static CtorTag hole() { return {Kind::Hole, 0, {}}; }
  static CtorTag int_lit(std::int64_t v) { return {Kind::IntLit, v, {}}; }
  static CtorTag int_type() { return {Kind::Int, 0, {}}; }
  static CtorTag named(std::string_view n);

  /// Name used after `%` in the surface syntax (Cons, Nil, Tup, user names).
  std::string display_name() const;

  friend bool operator==(const CtorTag&, const CtorTag&) = default;
};

struct PrimTag {
  std::string name;
  unsigned arity = 1;

  friend bool operator==(const PrimTag&, const PrimTag&) = default;
};

namespace node {
struct Apply {
  TermPtr fun;
  TermPtr arg;
};
struct Lambda {
  std::string name;
  TermPtr annot;
  TermPtr body;
};
struct LetRec {
  std::string name;
  TermPtr annot;
  TermPtr rhs;
  TermPtr body;
};
struct Var {
  std::size_t index;
};
struct VarT {
  std::size_t index;
};
struct Ctor {
  CtorTag tag;
  TermPtr payload;  // may be null
};
struct Dtor {
  std::size_t index;
};
struct Prim {
  PrimTag prim;
  TermPtr annot;
};
}  // namespace node

struct Term {
  using Node = std::variant<node::Apply, node::Lambda, node::LetRec, node::Var, node::VarT,
                            node::Ctor, node::Dtor, node::Prim>;
  Node node;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

// Constructors.
TermPtr apply(TermPtr fun, TermPtr arg);
TermPtr lambda(std::string name, TermPtr annot, TermPtr body);
TermPtr letrec(std::string name, TermPtr annot, TermPtr rhs, TermPtr body);
TermPtr var(std::size_t index);
TermPtr var_t(std::size_t index);
TermPtr ctor(CtorTag tag, TermPtr payload = nullptr);
TermPtr dtor(std::size_t index);
TermPtr prim(PrimTag tag, TermPtr annot);

TermPtr star();
TermPtr hole(TermPtr annot);
TermPtr int_lit(std::int64_t v);  // payload annotation is `*`
TermPtr int_type();               // the builtin `Int` constant, annotated `*`

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnboundName : public std::runtime_error {
 public:
  explicit UnboundName(std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Parses the surface syntax. Names resolve to de Bruijn indices; primitive
/// names from the builtin table are reserved.
TermPtr parse(std::string_view source);

/// Prints a term so that `parse(print(t))` is structurally identical to `t`.
/// Indices that escape their binders print as `#n`.
std::string print(const Term& t);

/// Structural equality ignoring binder name hints.
bool alpha_eq(const Term& a, const Term& b);

/// Number of nodes that are not Lambda, LetRec or Apply (spine bottoms).
std::size_t count_leaves(const Term& t);
/// Number of Lambda and LetRec nodes.
std::size_t count_binders(const Term& t);
/// True iff every index is bound within the term.
bool is_closed(const Term& t);
std::size_t depth(const Term& t);

}  // namespace spinevm
