#include <doctest.h>

#include "helpers.hpp"
#include "spinevm/oracle.hpp"

using namespace spinevm;

namespace {
struct Trace {
  const Heap& heap;
  std::optional<std::string> val(const Spine&, std::string acc) { return acc + "V"; }
  std::string let_l(BinderId b, std::string acc) { return acc + " L" + heap.binder(b).name; }
  std::string let_a(std::string acc, const Spine*) { return acc + " A"; }
  std::string apply(std::string acc, const Spine&) { return acc + " @"; }
};

std::string trace(const char* src) {
  Heap h;
  SpinePtr s = wind_new(h, *parse(src));
  Trace f{h};
  std::string out = unwind(h, static_cast<const Spine&>(*s), f, std::string());
  destroy(h, std::move(s));
  return out;
}
}  // namespace

TEST_CASE("callback order") {
  CHECK(trace("*") == "V");
  CHECK(trace("addI 1 2") == "V @ @");
  CHECK(trace("(\\x:*. x) *") == "V Lx A");
  CHECK(trace("\\x:*. x") == "V Lx");
  CHECK(trace("\\x:*. \\y:*. x") == "V Ly Lx");
  CHECK(trace("(\\x:*. \\y:*. x) * *") == "V Ly Lx A A");
  CHECK(trace("letrec f : Int = f in f") == "V Lf");
}

TEST_CASE("destroy returns the gauges to zero") {
  Heap h;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SpinePtr s = wind_new(h, *oracle::gen_term(seed, 7));
    CHECK(h.stats().live_spines > 0);
    destroy(h, std::move(s));
    REQUIRE(h.stats().live_spines == 0);
    REQUIRE(h.stats().live_contexts == 0);
  }
  CHECK(h.stats().hw_spines > 0);
}

TEST_CASE("get_ast on generated terms") {
  for (std::uint64_t seed = 1000; seed < 1300; ++seed) {
    Heap h;
    TermPtr t = oracle::gen_term(seed, 8);
    SpinePtr s = wind_new(h, *t);
    CHECK(alpha_eq(*get_ast(h, *s), *t));
    destroy(h, std::move(s));
  }
}
