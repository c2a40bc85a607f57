// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "spinevm/fold.hpp"
#include "spinevm/oracle.hpp"
#include "spinevm/run.hpp"
#include "spinevm/wind.hpp"

using namespace spinevm;

namespace {

constexpr unsigned kCorpus = 1000;
constexpr unsigned kDepth = 8;
constexpr std::uint64_t kOracleBudget = 1'000'000;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

TermPtr program(const std::string& name) { return parse(read_file(std::string(SPINEVM_PROGRAMS_DIR) + "/" + name)); }

std::int64_t int_value(const Term& t) {
  const auto* c = t.as<node::Ctor>();
  if (c == nullptr || c->tag.kind != CtorTag::Kind::IntLit) return INT64_MIN;
  return c->tag.value;
}

RunResult run(const Term& t, bool check, bool trace) {
  RunOptions o;
  o.eval.check_every_step = check;
  o.trace = trace;
  return run_program(t, o);
}

void roundtrip(const std::vector<TermPtr>& corpus) {
  auto t0 = std::chrono::steady_clock::now();
  unsigned ok = 0;
  for (const TermPtr& t : corpus) {
    Heap h;
    SpinePtr s = wind_new(h, *t);
    if (alpha_eq(*get_ast(h, *s), *t)) ++ok;
    destroy(h, std::move(s));
  }
  double secs = since(t0);
  report(1, ok == corpus.size() && secs < 30, "wind/get_ast roundtrip",
         std::to_string(ok) + "/" + std::to_string(corpus.size()) + " terms, " + fmt(secs) + " s (limit 30 s)");
}

void check_every_step(const Term& tak, const Term& q6) {
  auto t0 = std::chrono::steady_clock::now();
  unsigned violations = 0;
  std::string note;
  for (const Term* t : {&tak, &q6}) {
    try {
      run(*t, true, false);
    } catch (const InvariantViolation& e) {
      ++violations;
      note = std::string(" (") + e.what() + ")";
    }
  }
  double secs = since(t0);
  report(2, violations == 0 && secs < 600, "invariants after every step on tak and queens6",
         std::to_string(violations) + " violations, " + fmt(secs) + " s (limit 600 s)" + note);
}

void oracle_equivalence(const std::vector<TermPtr>& corpus) {
  unsigned terminating = 0, agree = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Term& t = *corpus[i];
    TermPtr want;
    oracle::HeadShape want_shape;
    bool want_err = false;
    try {
      want = oracle::normalize_strong(*oracle::normalize_whnf(t, kOracleBudget, &want_shape), kOracleBudget);
    } catch (const oracle::BudgetExceeded&) {
      continue;
    } catch (const oracle::Stuck&) {
      want_err = true;
    }
    ++terminating;
    TermPtr got;
    oracle::HeadShape got_shape;
    bool got_err = false;
    try {
      RunOptions o;
      o.eval.max_steps = kOracleBudget;
      o.stack_bytes = std::size_t{64} << 20;
      TermPtr r = run_program(t, o).result;
      got = oracle::normalize_strong(*oracle::normalize_whnf(*r, kOracleBudget, &got_shape), kOracleBudget);
    } catch (const std::exception&) {
      got_err = true;
    }
    bool same = want_err ? got_err : (!got_err && alpha_eq(*got, *want) && got_shape == want_shape);
    if (same) {
      ++agree;
    } else if (first_bad.empty()) {
      first_bad = "; first mismatch at term " + std::to_string(i);
    }
  }
  report(3, terminating > 0 && agree == terminating, "agreement with the reference normalizer",
         std::to_string(agree) + "/" + std::to_string(terminating) + " terminating terms" + first_bad);
}

void answers(const RunResult& tak, const RunResult& q6, const RunResult& q8) {
  std::int64_t a = int_value(*tak.result), b = int_value(*q6.result), c = int_value(*q8.result);
  auto q6want = static_cast<std::int64_t>(oracle::queens_count(6));
  auto q8want = static_cast<std::int64_t>(oracle::queens_count(8));
  bool ok = a == oracle::tak_direct(18, 12, 6) && a == 7 && b == q6want && c == q8want;
  report(4, ok, "program answers",
         "tak=" + std::to_string(a) + " queens6=" + std::to_string(b) + " (want " + std::to_string(q6want) +
             ") queens8=" + std::to_string(c) + " (want " + std::to_string(q8want) + ")");
}

void constant_space(const RunResult& tak, const RunResult& q6) {
  HalfMarks a = half_marks(tak.trace), b = half_marks(q6.trace);
  auto line = [](const char* n, const HalfMarks& m) {
    return std::string(n) + " first=" + std::to_string(m.first) + " second=" + std::to_string(m.second) +
           " full=" + std::to_string(m.full);
  };
  report(5, a.second == a.full && b.second == b.full, "live contexts: second-half high water equals full run",
         line("tak", a) + "; " + line("queens6", b));
}

void shapes(const std::vector<TermPtr>& corpus) {
  unsigned ok = 0;
  for (const TermPtr& t : corpus) {
    Heap h;
    SpinePtr s = wind_new(h, *t);
    if (count_shape(h, *s) == Shape{count_leaves(*t), count_binders(*t)}) ++ok;
    destroy(h, std::move(s));
  }
  report(6, ok == corpus.size(), "shape after winding matches leaves and binders",
         std::to_string(ok) + "/" + std::to_string(corpus.size()));
}

void conservation(const std::vector<const RunResult*>& runs) {
  bool ok = true;
  std::string detail;
  for (const RunResult* r : runs) {
    ok = ok && r->after_destroy.live_contexts == 0 && r->after_destroy.live_spines == 0;
    detail += (detail.empty() ? "" : ", ") + std::to_string(r->after_destroy.live_contexts) + "/" +
              std::to_string(r->after_destroy.live_spines);
  }
  report(7, ok, "live contexts/spines after teardown", detail);
}

void footprint(const RunResult& tak, const RunResult& q6, const RunResult& q8) {
  auto fp = [](const RunResult& r) { return footprint_bytes(r.stats.hw_contexts, r.stats.hw_spines); };
  const std::uint64_t tak_limit = 20 * 77'000, q_limit = 20 * 738'000;
  bool ok = fp(tak) <= tak_limit && fp(q6) <= q_limit && fp(q8) <= q_limit;
  report(8, ok, "footprint within 20x of reference",
         "tak " + std::to_string(fp(tak)) + " B (limit " + std::to_string(tak_limit) + "), queens6 " +
             std::to_string(fp(q6)) + " B, queens8 " + std::to_string(fp(q8)) + " B (limit " +
             std::to_string(q_limit) + ")");
}

}  // namespace

int main() {
  std::vector<TermPtr> corpus;
  for (unsigned i = 0; i < kCorpus; ++i) corpus.push_back(oracle::gen_term(i, kDepth));

  TermPtr tak = program("tak.lam"), q6 = program("queens6.lam"), q8 = program("queens8.lam");

  roundtrip(corpus);
  check_every_step(*tak, *q6);
  oracle_equivalence(corpus);

  RunResult rt = run(*tak, false, true);
  RunResult r6 = run(*q6, false, true);
  RunResult r8 = run(*q8, false, false);
  answers(rt, r6, r8);
  constant_space(rt, r6);
  shapes(corpus);
  conservation({&rt, &r6, &r8});
  footprint(rt, r6, r8);
  return failures;
}
