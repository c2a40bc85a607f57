#include <doctest.h>

#include "helpers.hpp"
#include "spinevm/eval.hpp"
#include "spinevm/oracle.hpp"
#include "spinevm/prim.hpp"

using namespace spinevm;
using testing::eval_str;
using testing::same;

TEST_CASE("single steps") {
  Heap h;
  Evaluator ev(h);
  SpinePtr s = wind_new(h, *parse("(\\x:*. x) *"));
  CHECK(ev.step(*s) == StepResult::Progressed);
  CHECK(std::holds_alternative<head::Ctor>(s->head));
  CHECK(h.binder(s->start).refcount == 0);
  CHECK(ev.step(*s) == StepResult::Done);
  destroy(h, std::move(s));

  s = wind_new(h, *parse("\\x:*. x"));
  CHECK(ev.step(*s) == StepResult::Done);  // open variable
  destroy(h, std::move(s));

  s = wind_new(h, *parse("addI 2 3"));
  CHECK(ev.step(*s) == StepResult::Progressed);
  CHECK(print(*get_ast(h, *s)) == "5");
  destroy(h, std::move(s));
  CHECK(h.stats().live_contexts == 0);
}

TEST_CASE("need reclaims dead binders") {
  Heap h;
  Evaluator ev(h, EvalOptions{1'000'000, 10'000, true});
  SpinePtr s = wind_new(h, *parse("(\\x:*. \\y:*. x) * %A"));
  ev.evaluate(*s);
  CHECK(print(*get_ast(h, *s)) == "*");
  CHECK(h.stats().live_contexts == 0);
  destroy(h, std::move(s));
}

TEST_CASE("evaluation results") {
  CHECK(eval_str("(\\f:Int. addI f f) (mulI 3 4)") == "24");
  CHECK(same(eval_str("\\x:Int. (\\y:Int. y) x"), "\\x:Int. x"));
  CHECK(eval_str("letrec f : Int = 1 in addI f f") == "2");
  CHECK(eval_str("(\\b:*. !b) %Box:5") == "5");
  CHECK(eval_str("(\\k:*. \\a:*. \\b:*. k b a) subI 3 10") == "7");
  CHECK(same(eval_str("letrec f : Int = f in f"), "letrec f : Int = f in f"));
  CHECK(eval_str("(\\x:Int. 'x) 3") == "Int");
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(eval_str("(\\b:*. !b) (\\x:*. x)"), DtorNonCtor);
  CHECK_THROWS_AS(eval_str("(\\b:*. !b) %Box"), DtorNonCtor);
  RunOptions o;
  o.eval.max_steps = 10'000;
  o.stack_bytes = std::size_t{64} << 20;
  CHECK_THROWS_AS(run_program(*parse("letrec f : \\_:Int. Int = \\x:Int. f x in f 1"), o), NonTermination);
}

TEST_CASE("typeof") {
  Heap h;
  Evaluator ev(h);
  auto type_str = [&](const char* src) {
    SpinePtr s = wind_new(h, *parse(src));
    std::string out;
    try {
      SpinePtr t = ev.type_of(*s);
      out = print(*get_ast(h, *t));
      destroy(h, std::move(t));
    } catch (...) {
      destroy(h, std::move(s));
      throw;
    }
    destroy(h, std::move(s));
    return out;
  };
  CHECK(type_str("addI 2 3") == "Int");
  CHECK(type_str("7") == "Int");
  CHECK(type_str("(\\x:*. x) *") == "*");
  CHECK(same(type_str("\\x:Int. addI x 1"), "\\x:Int. Int"));
  CHECK(same(type_str("ltI 1 2"), "\\t:*. \\f:*. *"));
  CHECK_THROWS_AS(type_str("\\b:*. !b"), UnificationRequired);
  CHECK_THROWS_AS(type_str("\\f:?:*. f 1"), UnificationRequired);
  CHECK(h.stats().live_contexts == 0);
  CHECK(h.stats().live_spines == 0);
}

// Stopping after k steps must leave a spine whose syntax tree means the same
// as the input.
TEST_CASE("interrupted evaluation keeps the meaning") {
  const std::uint64_t budget = 1'000'000;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    TermPtr t = oracle::gen_term(seed, 7);
    TermPtr want;
    try {
      want = oracle::normalize_strong(*t, budget);
    } catch (const std::exception&) {
      continue;
    }
    for (std::uint64_t k : {1, 2, 3, 5, 8, 13, 40}) {
      Heap h;
      Evaluator ev(h, EvalOptions{k, 10'000, false});
      SpinePtr s = wind_new(h, *t);
      bool stopped = false;
      try {
        ev.evaluate(*s);
      } catch (const NonTermination&) {
        stopped = true;
      } catch (const std::exception&) {
        destroy(h, std::move(s));
        break;
      }
      INFO("seed ", seed, " k ", k, ": ", print(*t));
      CHECK_FALSE(check_invariants(h, *s).has_value());
      CHECK_FALSE(check_refcounts(h, *s).has_value());
      TermPtr partial = get_ast(h, *s);
      CHECK(alpha_eq(*oracle::normalize_strong(*partial, budget), *want));
      destroy(h, std::move(s));
      CHECK(h.stats().live_contexts == 0);
      ++checked;
      if (!stopped) break;
    }
  }
  CHECK(checked > 150);
}
