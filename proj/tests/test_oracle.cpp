#include <doctest.h>

#include "helpers.hpp"
#include "spinevm/oracle.hpp"

using namespace spinevm;

TEST_CASE("normal forms") {
  TermPtr k = parse("(\\a:*. \\b:*. a) %A %B");
  CHECK(print(*oracle::normalize_strong(*k, 1000)) == "%A");
  CHECK(print(*oracle::normalize_strong(*parse("letrec n : Int = 4 in mulI n n"), 1000)) == "16");
  CHECK(print(*oracle::normalize_strong(*parse("\\x:Int. (\\y:Int. y) x"), 1000)) == "\\x:Int. x");
  CHECK_THROWS_AS(oracle::normalize_strong(*parse("letrec f : Int = addI 1 f in f"), 1000),
                  oracle::BudgetExceeded);
  CHECK_THROWS_AS(oracle::normalize_strong(*parse("(\\b:*. !b) (\\x:*. x)"), 1000), oracle::Stuck);
}

TEST_CASE("head shape") {
  oracle::HeadShape hs;
  oracle::normalize_whnf(*parse("\\x:Int. \\y:Int. addI x"), 1000, &hs);
  CHECK(hs.open == 2);
  CHECK(hs.head == oracle::head_label(PrimTag{"addI", 2}));
  CHECK(hs.pending == 1);
}

TEST_CASE("benchmark answers") {
  CHECK(oracle::queens_count(1) == 1);
  CHECK(oracle::queens_count(4) == 2);
  CHECK(oracle::queens_count(6) == 4);
  CHECK(oracle::queens_count(8) == 92);
  CHECK(oracle::tak_direct(18, 12, 6) == 7);
}

TEST_CASE("generator") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    TermPtr a = oracle::gen_term(seed, 8);
    TermPtr b = oracle::gen_term(seed, 8);
    CHECK(alpha_eq(*a, *b));
    CHECK(is_closed(*a));
  }
  CHECK_FALSE(alpha_eq(*oracle::gen_term(1, 8), *oracle::gen_term(2, 8)));
}
