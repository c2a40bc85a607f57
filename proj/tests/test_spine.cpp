#include <doctest.h>

#include "helpers.hpp"
#include "spinevm/spine.hpp"

using namespace spinevm;

namespace {
SpinePtr star_at(Heap& h, EndRef end) {
  SpinePtr s = h.new_spine(end);
  s->head = head::Ctor{CtorTag::star(), nullptr};
  return s;
}
}  // namespace

TEST_CASE("new spine and gauges") {
  Heap h;
  {
    SpinePtr s = star_at(h, EndRef::global());
    CHECK(s->start == s->end);
    CHECK(h.stats().live_spines == 1);
    CHECK(h.stats().spines_allocated == 1);
  }
  CHECK(h.stats().live_spines == 0);
  BinderId b = h.new_binder("x", BinderId::global());
  CHECK(h.stats().live_contexts == 1);
  CHECK(h.incref(b) == 1);
  CHECK(h.incref(b) == 2);
  CHECK(h.decref(b) == 1);
  CHECK(h.decref(b) == 0);
  CHECK_THROWS_AS(h.decref(b), InternalRefcount);
  h.free_binder(b);
  CHECK(h.stats().live_contexts == 0);
  CHECK_THROWS_AS(h.incref(b), InternalRefcount);
  CHECK(h.stats().hw_contexts == 1);
}

TEST_CASE("freeing a referenced binder is refused") {
  Heap h;
  BinderId b = h.new_binder("x", BinderId::global());
  h.incref(b);
  CHECK_THROWS_AS(h.free_binder(b), InternalRefcount);
}

TEST_CASE("footprint") {
  CHECK(footprint_bytes(10, 10) == 10 * 48 + 10 * 56);
  CHECK(footprint_bytes(1, 2, RecordSizes{8, 16}) == 40);
}

TEST_CASE("shape of wound terms") {
  for (const char* src : {"*", "(\\x:*. x) *", "\\x:Int. addI x 1", "letrec f : Int = 1 in addI f f",
                          "\\b:*. !b", "%Box:(\\x:*. x)"}) {
    INFO(src);
    TermPtr t = parse(src);
    Heap h;
    SpinePtr s = wind_new(h, *t);
    CHECK(count_shape(h, *s) == Shape{count_leaves(*t), count_binders(*t)});
    CHECK_FALSE(check_invariants(h, *s).has_value());
    CHECK_FALSE(check_refcounts(h, *s).has_value());
    destroy(h, std::move(s));
    CHECK(h.stats().live_spines == 0);
    CHECK(h.stats().live_contexts == 0);
  }
}

TEST_CASE("pending application ending inside a pair is reported") {
  Heap h;
  SpinePtr s = star_at(h, EndRef::global());
  BinderId b1 = h.new_binder("q", BinderId::global());
  BinderId b0 = h.new_binder("p", b1);
  h.binder(b1).annot = star_at(h, EndRef::global());
  h.binder(b1).rhs = star_at(h, EndRef::global());
  h.binder(b0).annot = star_at(h, b1);
  h.binder(b0).rhs = star_at(h, EndRef::global());
  s->start = b0;
  s->pending.push_back(star_at(h, b1));

  auto v = check_invariants(h, *s);
  REQUIRE(v.has_value());
  CHECK(v->property == 6);
  CHECK(v->message().find("pending") != std::string::npos);
  s->pending.back()->start = s->pending.back()->end = EndRef::global();
  CHECK_FALSE(check_invariants(h, *s).has_value());
  destroy(h, std::move(s));
}

TEST_CASE("refcount mismatch is reported") {
  Heap h;
  SpinePtr s = wind_new(h, *parse("(\\x:*. x) *"));
  BinderId x = s->start;
  h.incref(x);
  auto m = check_refcounts(h, *s);
  REQUIRE(m.has_value());
  CHECK(m->binder == x);
  CHECK(m->recorded == m->counted + 1);
  h.decref(x);
  destroy(h, std::move(s));
}
