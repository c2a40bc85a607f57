#include "spinevm/spine.hpp"

#include <sstream>

namespace spinevm {

void SpineDeleter::operator()(Spine* s) const {
  if (heap) --heap->stats_.live_spines;
  delete s;
}

std::optional<BinderId> head_target(const HeadValue& h) {
  if (auto v = std::get_if<head::Var>(&h)) return v->target;
  if (auto v = std::get_if<head::VarT>(&h)) return v->target;
  if (auto v = std::get_if<head::Dtor>(&h)) return v->target;
  return std::nullopt;
}

Spine* head_payload(const HeadValue& h) {
  if (auto c = std::get_if<head::Ctor>(&h)) return c->payload.get();
  if (auto p = std::get_if<head::Prim>(&h)) return p->annot.get();
  return nullptr;
}

std::string Stats::line() const {
  std::ostringstream os;
  os << "contexts_alloc=" << contexts_allocated << " spines_alloc=" << spines_allocated
     << " hw_contexts=" << hw_contexts << " hw_spines=" << hw_spines
     << " live_contexts=" << live_contexts << " live_spines=" << live_spines;
  return os.str();
}

SpinePtr Heap::new_spine(EndRef end) {
  ++stats_.spines_allocated;
  ++stats_.live_spines;
  SpinePtr s(new Spine{}, SpineDeleter{this});
  s->start = end;
  s->end = end;
  return s;
}

BinderId Heap::new_binder(std::string name, BinderId next) {
  BinderId id;
  if (!free_.empty()) {
    id.value = free_.back();
    free_.pop_back();
  } else {
    id.value = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  }
  Binder& b = slots_[id.value];
  b.name = std::move(name);
  b.next = next;
  b.refcount = 0;
  b.guard = false;
  b.live = true;
  ++stats_.contexts_allocated;
  ++stats_.live_contexts;
  if (sampling_) {
    if (stats_.live_contexts > stats_.hw_contexts) stats_.hw_contexts = stats_.live_contexts;
    if (stats_.live_spines > stats_.hw_spines) stats_.hw_spines = stats_.live_spines;
    if (observer_) observer_(stats_);
  }
  return id;
}

void Heap::free_binder(BinderId id) {
  if (!is_live(id)) throw InternalRefcount("free of dead binder " + std::to_string(id.value));
  Binder& b = slots_[id.value];
  if (b.refcount != 0) {
    throw InternalRefcount("free of binder " + b.name + " with " + std::to_string(b.refcount) +
                           " live references");
  }
  b.annot.reset();
  b.rhs.reset();
  b.name.clear();
  b.live = false;
  free_.push_back(id.value);
  --stats_.live_contexts;
}

std::uint32_t Heap::incref(BinderId id) {
  if (!is_live(id)) throw InternalRefcount("incref of dead binder");
  return ++slots_[id.value].refcount;
}

std::uint32_t Heap::decref(BinderId id) {
  if (!is_live(id)) throw InternalRefcount("decref of dead binder");
  Binder& b = slots_[id.value];
  if (b.refcount == 0) throw InternalRefcount("refcount underflow on binder " + b.name);
  return --b.refcount;
}

void Heap::reset_high_water() {
  stats_.hw_contexts = stats_.live_contexts;
  stats_.hw_spines = stats_.live_spines;
}

std::uint64_t footprint_bytes(std::uint64_t contexts, std::uint64_t spines, RecordSizes sizes) {
  return contexts * sizes.context_bytes + spines * sizes.spine_bytes;
}

std::vector<BinderId> segment(const Heap& heap, const Spine& s) {
  std::vector<BinderId> out;
  for (BinderId c = s.start; c != s.end; c = heap.binder(c).next) out.push_back(c);
  return out;
}

void retarget_ends(Heap& heap, Spine& s, BinderId from, BinderId to) {
  for_each_child(heap, s, [&](Spine& c) {
    if (c.end != from) return;
    if (c.start == from) {
      c.start = to;
    } else {
      BinderId last = c.start;
      while (heap.binder(last).next != from) last = heap.binder(last).next;
      heap.binder(last).next = to;
    }
    c.end = to;
    retarget_ends(heap, c, from, to);
  });
}

namespace {

void shape_of(const Heap& heap, const Spine& s, Shape& acc) {
  ++acc.spines;
  for (BinderId c = s.start; c != s.end; c = heap.binder(c).next) ++acc.contexts;
  for_each_child(heap, s, [&](const Spine& child) { shape_of(heap, child, acc); });
}

void count_refs(const Heap& heap, const Spine& s, std::vector<std::uint32_t>& counts,
                std::vector<BinderId>& owned) {
  if (auto t = head_target(s.head); t && t->value < counts.size()) ++counts[t->value];
  for (BinderId c = s.start; c != s.end; c = heap.binder(c).next) owned.push_back(c);
  for_each_child(heap, s, [&](const Spine& child) { count_refs(heap, child, counts, owned); });
}

}  // namespace

Shape count_shape(const Heap& heap, const Spine& s) {
  Shape acc;
  shape_of(heap, s, acc);
  return acc;
}

std::optional<RefcountMismatch> check_refcounts(const Heap& heap, const Spine& s) {
  std::vector<std::uint32_t> counts(heap.capacity(), 0);
  std::vector<BinderId> owned;
  count_refs(heap, s, counts, owned);
  for (BinderId b : owned) {
    if (heap.binder(b).refcount != counts[b.value]) {
      return RefcountMismatch{b, heap.binder(b).refcount, counts[b.value]};
    }
  }
  return std::nullopt;
}

std::string Violation::message() const {
  std::ostringstream os;
  os << "property " << property << " violated at " << locus << ": " << detail;
  return os.str();
}

}  // namespace spinevm
