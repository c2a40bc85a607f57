#include <benchmark/benchmark.h>

#include <vector>

#include "spinevm/fold.hpp"
#include "spinevm/oracle.hpp"
#include "spinevm/run.hpp"
#include "spinevm/wind.hpp"

using namespace spinevm;

namespace {

TermPtr program(const char* name) { return parse(read_file(std::string(SPINEVM_PROGRAMS_DIR) + "/" + name)); }

// Sampling off: the gauges are only read at the end. Evaluation runs on its
// own big-stack thread, hence real time.
void run_file(benchmark::State& state, const char* name) {
  TermPtr t = program(name);
  RunOptions o;
  o.sampling = false;
  RunResult r;
  for (auto _ : state) {
    r = run_program(*t, o);
    benchmark::DoNotOptimize(r.result);
  }
  state.counters["steps"] = static_cast<double>(r.steps);
  state.counters["contexts_alloc"] = static_cast<double>(r.stats.contexts_allocated);
}

void BM_tak(benchmark::State& state) { run_file(state, "tak.lam"); }
void BM_queens6(benchmark::State& state) { run_file(state, "queens6.lam"); }
void BM_queens8(benchmark::State& state) { run_file(state, "queens8.lam"); }

const std::vector<TermPtr>& corpus() {
  static const std::vector<TermPtr> c = [] {
    std::vector<TermPtr> v;
    for (unsigned i = 0; i < 1000; ++i) v.push_back(oracle::gen_term(i, 8));
    return v;
  }();
  return c;
}

void BM_wind_get_ast(benchmark::State& state) {
  Heap h;
  for (auto _ : state) {
    for (const TermPtr& t : corpus()) {
      SpinePtr s = wind_new(h, *t);
      benchmark::DoNotOptimize(get_ast(h, *s));
      destroy(h, std::move(s));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

void BM_copy_spine(benchmark::State& state) {
  Heap h;
  std::vector<SpinePtr> wound;
  for (const TermPtr& t : corpus()) wound.push_back(wind_new(h, *t));
  for (auto _ : state) {
    for (const SpinePtr& s : wound) destroy(h, copy_spine(h, *s));
  }
  for (SpinePtr& s : wound) destroy(h, std::move(s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

}  // namespace

BENCHMARK(BM_tak)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_queens6)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_queens8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_wind_get_ast)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_copy_spine)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
