#include <doctest.h>

#include "helpers.hpp"
#include "spinevm/oracle.hpp"

using namespace spinevm;

TEST_CASE("winding a redex pairs the binder") {
  Heap h;
  SpinePtr s = wind_new(h, *parse("(\\x:*. x) *"));
  CHECK(s->pending.empty());
  auto seg = segment(h, *s);
  REQUIRE(seg.size() == 1);
  const Binder& x = h.binder(seg[0]);
  CHECK_FALSE(x.is_open());
  CHECK(x.refcount == 1);
  REQUIRE(std::holds_alternative<head::Var>(s->head));
  CHECK(std::get<head::Var>(s->head).target == seg[0]);
  destroy(h, std::move(s));
}

TEST_CASE("unpaired lambdas stay open and extra arguments stay pending") {
  Heap h;
  SpinePtr s = wind_new(h, *parse("\\x:*. x"));
  CHECK(h.binder(s->start).is_open());
  destroy(h, std::move(s));
  s = wind_new(h, *parse("addI 1 2"));
  CHECK(s->pending.size() == 2);
  CHECK(s->start == s->end);
  destroy(h, std::move(s));
}

TEST_CASE("letrec rhs ends at its own binder") {
  Heap h;
  SpinePtr s = wind_new(h, *parse("letrec f : Int = f in f"));
  const Binder& f = h.binder(s->start);
  CHECK(f.rhs->end == s->start);
  CHECK(f.refcount == 2);  // the body and the rhs
  CHECK(f.annot->end == f.next);
  destroy(h, std::move(s));
}

TEST_CASE("free indices are rejected") {
  Heap h;
  CHECK_THROWS_AS(wind_new(h, *parse("#0")), UnboundIndex);
  CHECK_THROWS_AS(wind_new(h, *parse("\\x:*. #1")), UnboundIndex);
}

TEST_CASE("get_ast inverts wind") {
  for (const char* src : {"*", "(\\x:*. x) *", "\\a:*. \\b:'a. b", "letrec f : Int = addI 1 f in f",
                          "\\b:%Box:Int. !b", "(\\x:Int. \\y:Int. subI x y) 3 4 5"}) {
    Heap h;
    TermPtr t = parse(src);
    SpinePtr s = wind_new(h, *t);
    INFO(src);
    CHECK(alpha_eq(*get_ast(h, *s), *t));
    destroy(h, std::move(s));
  }
}

TEST_CASE("copy is independent of the original") {
  Heap h;
  TermPtr t = parse("(\\x:Int. \\y:Int. addI x y) 1 2");
  SpinePtr s = wind_new(h, *t);
  SpinePtr c = copy_spine(h, *s);
  CHECK(alpha_eq(*get_ast(h, *c), *t));
  auto a = segment(h, *s);
  auto b = segment(h, *c);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] != b[i]);
  destroy(h, std::move(s));
  CHECK(alpha_eq(*get_ast(h, *c), *t));
  destroy(h, std::move(c));
  CHECK(h.stats().live_contexts == 0);
  CHECK(h.stats().live_spines == 0);
}

TEST_CASE("append_stack agrees with rewinding") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    for (const char* base : {"\\z:*. z", "\\z:*. z * 1", "\\z:*. (\\w:Int. z w) 2"}) {
      Heap h;
      TermPtr ut = oracle::gen_term(seed, 5);
      SpinePtr u = wind_new(h, *ut);
      SpinePtr a = wind_new(h, *parse(base));
      SpinePtr b = wind_new(h, *parse(base));
      append_stack(h, *a, *u);
      append_stack_by_rewind(h, *b, *u);
      INFO(base, " <- ", print(*ut));
      CHECK(alpha_eq(*get_ast(h, *a), *get_ast(h, *b)));
      CHECK_FALSE(check_invariants(h, *a).has_value());
      CHECK_FALSE(check_refcounts(h, *a).has_value());
      CHECK(count_shape(h, *a) == count_shape(h, *b));
      destroy(h, std::move(a));
      destroy(h, std::move(b));
      destroy(h, std::move(u));
      CHECK(h.stats().live_contexts == 0);
      CHECK(h.stats().live_spines == 0);
    }
  }
}
