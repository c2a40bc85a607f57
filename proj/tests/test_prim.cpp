#include <doctest.h>

#include "helpers.hpp"
#include "spinevm/prim.hpp"

using namespace spinevm;
using testing::eval_str;
using testing::same;

TEST_CASE("arithmetic") {
  CHECK(eval_str("addI 2 3") == "5");
  CHECK(eval_str("subI 10 3") == "7");
  CHECK(eval_str("mulI (subI 0 4) 5") == "-20");
  CHECK(eval_str("addI (addI 1 2) (mulI 2 2)") == "7");
}

TEST_CASE("comparisons give church booleans") {
  CHECK(alpha_eq(*parse(eval_str("ltI 1 2")), *church_true()));
  CHECK(alpha_eq(*parse(eval_str("ltI 2 1")), *church_false()));
  CHECK(alpha_eq(*parse(eval_str("eqI 4 4")), *church_true()));
  CHECK(eval_str("ltI 1 2 10 20") == "10");
  CHECK(eval_str("eqI 1 2 10 20") == "20");
}

TEST_CASE("under-application and stuck arguments") {
  CHECK(same(eval_str("addI 2"), "addI 2"));
  CHECK(same(eval_str("\\x:Int. addI x 1"), "\\x:Int. addI x 1"));
  CHECK(same(eval_str("\\x:Int. addI (addI 1 1) x"), "\\x:Int. addI 2 x"));
}

TEST_CASE("failures") {
  CHECK_THROWS_AS(eval_str("addI 9223372036854775807 1"), PrimFailure);
  CHECK_THROWS_AS(eval_str("addI (\\x:*. x) 1"), PrimTypeError);
  CHECK_THROWS_AS(eval_str("addI %Box:1 1"), PrimTypeError);
}

TEST_CASE("table") {
  auto table = builtin_table();
  CHECK(table.size() == 5);
  for (const PrimDef& p : table) {
    CHECK(find_prim(p.tag.name) == &p);
    CHECK(p.tag.arity == 2);
    CHECK(p.annot != nullptr);
  }
  CHECK(find_prim("divI") == nullptr);
  CHECK(testing::roundtrip("addI:Int 1") == "addI:Int 1");
  CHECK(same(print(*find_prim("ltI")->annot), "\\_:Int. \\_:Int. \\t:*. \\f:*. *"));
}
