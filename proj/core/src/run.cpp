#include "spinevm/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "spinevm/fold.hpp"
#include "spinevm/wind.hpp"

namespace spinevm {

HalfMarks half_marks(const std::vector<std::uint32_t>& trace) {
  HalfMarks m;
  const std::size_t mid = trace.size() / 2;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::uint64_t v = trace[i];
    if (i < mid) {
      m.first = std::max(m.first, v);
    } else {
      m.second = std::max(m.second, v);
    }
    m.full = std::max(m.full, v);
  }
  return m;
}

RunResult run_program(const Term& t, const RunOptions& opts) {
  RunResult out;
  Heap heap;
  heap.set_sampling(opts.sampling);
  if (opts.trace) {
    heap.set_observer([&out](const Stats& s) { out.trace.push_back(static_cast<std::uint32_t>(s.live_contexts)); });
  }
  std::exception_ptr err;
  run_with_stack(opts.stack_bytes, [&] {
    SpinePtr s = wind_new(heap, t);
    out.wound_shape = count_shape(heap, *s);
    Evaluator ev(heap, opts.eval);
    try {
      auto t0 = std::chrono::steady_clock::now();
      if (opts.deep) {
        ev.evaluate_deep(*s);
      } else {
        ev.evaluate(*s);
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.result = get_ast(heap, *s);
    } catch (...) {
      err = std::current_exception();
    }
    out.steps = ev.steps();
    out.stats = heap.stats();
    heap.set_observer(nullptr);
    destroy(heap, std::move(s));
    out.after_destroy = heap.stats();
  });
  if (err) std::rethrow_exception(err);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace spinevm
