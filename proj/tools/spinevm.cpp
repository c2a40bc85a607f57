// Command-line driver: eval, ast, typeof, bench, corpus.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "spinevm/fold.hpp"
#include "spinevm/oracle.hpp"
#include "spinevm/prim.hpp"
#include "spinevm/run.hpp"
#include "spinevm/wind.hpp"

using namespace spinevm;

namespace {

struct Common {
  std::string file;
  bool stats = false;
  bool check = false;
  bool deep = false;
  std::uint64_t max_steps = 1'000'000'000;
};

RunOptions run_options(const Common& c) {
  RunOptions o;
  o.eval.max_steps = c.max_steps;
  o.eval.check_every_step = c.check;
  o.deep = c.deep;
  return o;
}

int cmd_eval(const Common& c) {
  TermPtr t = parse(read_file(c.file));
  RunResult r = run_program(*t, run_options(c));
  std::cout << print(*r.result) << "\n";
  if (c.stats) {
    std::cout << r.stats.line() << " steps=" << r.steps << "\n";
  }
  return 0;
}

int cmd_ast(const Common& c) {
  TermPtr t = parse(read_file(c.file));
  std::cout << print(*t) << "\n";
  return 0;
}

int cmd_typeof(const Common& c) {
  TermPtr t = parse(read_file(c.file));
  Heap heap;
  std::string out;
  run_with_stack(std::size_t{1} << 28, [&] {
    SpinePtr s = wind_new(heap, *t);
    EvalOptions eo;
    eo.max_steps = c.max_steps;
    eo.check_every_step = c.check;
    Evaluator ev(heap, eo);
    try {
      SpinePtr ty = ev.type_of(*s);
      out = print(*get_ast(heap, *ty));
      destroy(heap, std::move(ty));
    } catch (...) {
      destroy(heap, std::move(s));
      throw;
    }
    destroy(heap, std::move(s));
  });
  std::cout << out << "\n";
  return 0;
}

int cmd_bench(const Common& c, unsigned samples) {
  TermPtr t = parse(read_file(c.file));
  RunOptions heap_run = run_options(c);
  heap_run.trace = true;
  RunResult r = run_program(*t, heap_run);
  HalfMarks m = half_marks(r.trace);
  RecordSizes sizes;
  std::cout << "result " << print(*r.result) << "\n";
  std::cout << r.stats.line() << " steps=" << r.steps << "\n";
  std::cout << "samples=" << r.trace.size() << " hw_first_half=" << m.first << " hw_second_half=" << m.second
            << " hw_full=" << m.full << " constant_space=" << (m.second == m.full ? "yes" : "no") << "\n";
  std::cout << "footprint_bytes=" << footprint_bytes(r.stats.hw_contexts, r.stats.hw_spines, sizes)
            << " (context=" << sizes.context_bytes << "B spine=" << sizes.spine_bytes << "B)\n";

  // Timing runs without heap reporting.
  RunOptions quiet = run_options(c);
  quiet.sampling = false;
  double best = 0, total = 0;
  for (unsigned i = 0; i < samples; ++i) {
    RunResult q = run_program(*t, quiet);
    best = i == 0 ? q.seconds : std::min(best, q.seconds);
    total += q.seconds;
  }
  if (samples > 0) {
    std::printf("time_best=%.4fs time_mean=%.4fs runs=%u\n", best, total / samples, samples);
  }
  return 0;
}

int cmd_corpus(std::uint64_t seed, unsigned count, unsigned depth, std::uint64_t budget) {
  unsigned roundtrip = 0, shape = 0, agree = 0, both_err = 0;
  for (unsigned i = 0; i < count; ++i) {
    TermPtr t = oracle::gen_term(seed + i, depth);
    Heap heap;
    SpinePtr s = wind_new(heap, *t);
    if (alpha_eq(*get_ast(heap, *s), *t)) ++roundtrip;
    if (count_shape(heap, *s) == Shape{count_leaves(*t), count_binders(*t)}) ++shape;
    destroy(heap, std::move(s));

    TermPtr ev_out, or_out;
    try {
      RunOptions o;
      o.eval.max_steps = budget;
      o.stack_bytes = std::size_t{64} << 20;
      ev_out = oracle::normalize_strong(*run_program(*t, o).result, budget);
    } catch (const std::exception&) {
    }
    try {
      or_out = oracle::normalize_strong(*oracle::normalize_whnf(*t, budget), budget);
    } catch (const std::exception&) {
    }
    if (!ev_out && !or_out) {
      ++both_err;
      ++agree;
    } else if (ev_out && or_out && alpha_eq(*ev_out, *or_out)) {
      ++agree;
    } else {
      std::cout << "disagree seed=" << seed + i << ": " << print(*t) << "\n";
    }
  }
  std::cout << "terms=" << count << " roundtrip=" << roundtrip << " shape=" << shape << " oracle_agree=" << agree
            << " (both_error=" << both_err << ")\n";
  return agree == count && roundtrip == count && shape == count ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"By-need evaluator over spine-represented terms"};
  app.require_subcommand(1);
  Common c;
  unsigned samples = 3;
  std::uint64_t seed = 0;
  unsigned count = 1000, depth = 8;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", c.file, "program file")->required();
    sub->add_flag("--stats", c.stats, "print allocation statistics");
    sub->add_flag("--check-every-step", c.check, "validate invariants after every step");
    sub->add_option("--max-steps", c.max_steps, "step budget");
  };
  auto* eval = app.add_subcommand("eval", "evaluate a program");
  add_common(eval);
  eval->add_flag("--deep", c.deep, "also normalize under constructor payloads");
  auto* ast = app.add_subcommand("ast", "print the parsed program");
  ast->add_option("file", c.file, "program file")->required();
  auto* ty = app.add_subcommand("typeof", "print the type of a program");
  add_common(ty);
  auto* bench = app.add_subcommand("bench", "allocation profile and timing");
  add_common(bench);
  bench->add_option("--samples", samples, "timing runs with heap reporting off");
  auto* corpus = app.add_subcommand("corpus", "roundtrip and oracle checks on generated terms");
  corpus->add_option("--seed", seed, "first generator seed");
  corpus->add_option("--count", count, "number of terms");
  corpus->add_option("--depth", depth, "generator depth");
  corpus->add_option("--max-steps", c.max_steps, "step budget");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*eval) return cmd_eval(c);
    if (*ast) return cmd_ast(c);
    if (*ty) return cmd_typeof(c);
    if (*bench) return cmd_bench(c, samples);
    if (*corpus) return cmd_corpus(seed, count, depth, std::min<std::uint64_t>(c.max_steps, 1'000'000));
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const SyntaxError& e) {
    std::cerr << c.file << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
