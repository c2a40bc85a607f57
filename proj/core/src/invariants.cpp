// Executable form of the seven structural properties of a valid spine.

#include <limits>
#include <string>
#include <vector>

#include "spinevm/spine.hpp"

namespace spinevm {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

enum class Edge : std::uint8_t { Root, Payload, Annot, Rhs, Pending };

struct Node {
  const Spine* spine;
  std::uint32_t parent;
  Edge edge;
  std::uint32_t label;  // binder id or pending index
  std::vector<BinderId> seg;
};

class Checker {
 public:
  explicit Checker(const Heap& heap) : heap_(heap) {}

  std::optional<Violation> run(const Spine& root) {
    const std::size_t cap = heap_.capacity();
    owner_.assign(cap, kNone);
    pos_.assign(cap, 0);

    if (auto v = collect(root)) return v;
    if (auto v = build_tour()) return v;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      if (auto v = check_node(i)) return v;
    }
    return std::nullopt;
  }

 private:
  const Heap& heap_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> owner_;
  std::vector<std::uint32_t> pos_;
  // Euler tour of the binder forest (parent = next); index cap is the global root.
  std::vector<std::uint32_t> tin_, tout_;

  std::string locus(std::uint32_t i) const {
    std::string out;
    while (i != kNone) {
      const Node& n = nodes_[i];
      std::string part;
      switch (n.edge) {
        case Edge::Root: part = "root"; break;
        case Edge::Payload: part = "head"; break;
        case Edge::Annot: part = "b" + std::to_string(n.label) + ".annot"; break;
        case Edge::Rhs: part = "b" + std::to_string(n.label) + ".rhs"; break;
        case Edge::Pending: part = "pending[" + std::to_string(n.label) + "]"; break;
      }
      out = out.empty() ? part : part + "/" + out;
      i = n.parent;
    }
    return out;
  }

  Violation fail(int prop, std::uint32_t at, std::string detail) const {
    return Violation{prop, locus(at), std::move(detail)};
  }

  std::optional<Violation> collect(const Spine& root) {
    nodes_.push_back(Node{&root, kNone, Edge::Root, 0, {}});
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      const Spine& s = *nodes_[i].spine;
      if (std::holds_alternative<head::Unset>(s.head)) return fail(0, i, "head value unset");
      std::vector<BinderId> seg;
      BinderId c = s.start;
      while (c != s.end) {
        if (c.is_global()) return fail(1, i, "context chain does not reach the spine's end");
        if (!heap_.is_live(c)) return fail(0, i, "dead binder b" + std::to_string(c.value) + " in context");
        if (owner_[c.value] != kNone) return fail(0, i, "binder b" + std::to_string(c.value) + " owned twice");
        owner_[c.value] = i;
        pos_[c.value] = static_cast<std::uint32_t>(seg.size());
        seg.push_back(c);
        c = heap_.binder(c).next;
      }
      for (BinderId b : seg) {
        const Binder& bd = heap_.binder(b);
        if (!bd.annot) return fail(0, i, "binder b" + std::to_string(b.value) + " lacks an annotation");
        nodes_.push_back(Node{bd.annot.get(), i, Edge::Annot, b.value, {}});
        if (bd.rhs) nodes_.push_back(Node{bd.rhs.get(), i, Edge::Rhs, b.value, {}});
      }
      if (const Spine* p = head_payload(s.head)) nodes_.push_back(Node{p, i, Edge::Payload, 0, {}});
      for (std::uint32_t k = 0; k < s.pending.size(); ++k) {
        if (!s.pending[k]) return fail(0, i, "null pending application");
        nodes_.push_back(Node{s.pending[k].get(), i, Edge::Pending, k, {}});
      }
      nodes_[i].seg = std::move(seg);
    }
    return std::nullopt;
  }

  // Builds the Euler tour over every binder on any chain reachable from the tree.
  std::optional<Violation> build_tour() {
    const std::uint32_t cap = static_cast<std::uint32_t>(heap_.capacity());
    std::vector<std::uint32_t> parent(cap, kNone), first(cap + 1, kNone), sibling(cap, kNone);
    std::vector<char> seen(cap, 0);
    auto add_chain = [&](BinderId c) -> bool {
      while (!c.is_global() && !seen[c.value]) {
        if (!heap_.is_live(c)) return false;
        seen[c.value] = 1;
        BinderId nx = heap_.binder(c).next;
        std::uint32_t p = nx.is_global() ? cap : nx.value;
        parent[c.value] = p;
        sibling[c.value] = first[p];
        first[p] = c.value;
        c = nx;
      }
      return true;
    };
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      const Spine& s = *nodes_[i].spine;
      if (!add_chain(s.start) || !add_chain(s.end)) {
        return fail(2, i, "chain passes through a dead binder");
      }
    }
    tin_.assign(cap + 1, 0);
    tout_.assign(cap + 1, 0);
    std::uint32_t clock = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{cap, first[cap]}};
    tin_[cap] = clock++;
    while (!stack.empty()) {
      auto& [n, child] = stack.back();
      if (child == kNone) {
        tout_[n] = clock++;
        stack.pop_back();
        continue;
      }
      std::uint32_t c = child;
      child = sibling[c];
      tin_[c] = clock++;
      stack.emplace_back(c, first[c]);
    }
    // Binders on a cycle never reach the global root.
    for (std::uint32_t b = 0; b < cap; ++b) {
      if (seen[b] && tout_[b] == 0) return fail(0, 0, "cyclic binder chain at b" + std::to_string(b));
    }
    return std::nullopt;
  }

  bool on_chain(BinderId target, BinderId from) const {
    if (from.is_global() || target.is_global()) return false;
    if (target.value >= tin_.size() || tout_[target.value] == 0) return false;
    return tin_[target.value] <= tin_[from.value] && tout_[from.value] <= tout_[target.value];
  }

  // Position of an end reference within node i's segment; seg.size() for the
  // spine's own end; kNone if it is neither.
  std::uint32_t end_pos(std::uint32_t i, BinderId e) const {
    const Node& n = nodes_[i];
    if (e == n.spine->end) return static_cast<std::uint32_t>(n.seg.size());
    if (!e.is_global() && e.value < owner_.size() && owner_[e.value] == i) return pos_[e.value];
    return kNone;
  }

  std::optional<Violation> check_node(std::uint32_t i) {
    const Node& n = nodes_[i];
    const Spine& s = *n.spine;
    const auto& seg = n.seg;

    if (auto t = head_target(s.head)) {
      if (!heap_.is_live(*t)) return fail(2, i, "head references a dead binder");
      if (!on_chain(*t, s.start)) {
        return fail(2, i, "head references b" + std::to_string(t->value) + " not reachable from the context");
      }
    }
    if (const Spine* p = head_payload(s.head); p && p->end != s.start) {
      return fail(3, i, "head sub-spine does not end at the start of the context");
    }

    // Property 1: every direct sub-spine ends within the segment or at its end.
    std::vector<std::uint32_t> rhs_end(seg.size(), kNone);
    for (std::size_t k = 0; k < seg.size(); ++k) {
      const Binder& b = heap_.binder(seg[k]);
      if (b.annot->end != b.next) {
        return fail(1, i, "annotation of b" + std::to_string(seg[k].value) + " does not end at its binder's successor");
      }
      if (b.rhs) {
        std::uint32_t p = b.rhs->end == seg[k] ? static_cast<std::uint32_t>(k) : end_pos(i, b.rhs->end);
        if (p == kNone) return fail(1, i, "rhs of b" + std::to_string(seg[k].value) + " ends outside the spine");
        rhs_end[k] = p;
      }
    }
    std::vector<std::uint32_t> app_end(s.pending.size());
    for (std::size_t k = 0; k < s.pending.size(); ++k) {
      std::uint32_t p = end_pos(i, s.pending[k]->end);
      if (p == kNone) return fail(1, i, "pending application " + std::to_string(k) + " ends outside the spine");
      app_end[k] = p;
    }

    // Property 4: nesting of bound right-hand sides.
    for (std::size_t k = 0; k < seg.size(); ++k) {
      if (rhs_end[k] == kNone || rhs_end[k] == k) continue;  // open or letrec
      if (rhs_end[k] < k) {
        return fail(4, i, "rhs of b" + std::to_string(seg[k].value) + " ends before its binder");
      }
      for (std::size_t j = k + 1; j < rhs_end[k]; ++j) {
        if (rhs_end[j] == kNone) {
          return fail(4, i, "open binder b" + std::to_string(seg[j].value) + " inside the pair of b" +
                                std::to_string(seg[k].value));
        }
        if (rhs_end[j] > rhs_end[k]) {
          return fail(4, i, "rhs of b" + std::to_string(seg[j].value) + " crosses the pair of b" +
                                std::to_string(seg[k].value));
        }
      }
    }

    // Property 5: innermost application has the largest context.
    for (std::size_t k = 1; k < app_end.size(); ++k) {
      if (app_end[k] > app_end[k - 1]) {
        return fail(5, i, "pending applications " + std::to_string(k - 1) + " and " + std::to_string(k) +
                              " are out of order");
      }
    }

    // Property 6: no pending application ends strictly inside a pair.
    for (std::size_t a = 0; a < app_end.size(); ++a) {
      for (std::size_t k = 0; k < seg.size(); ++k) {
        if (rhs_end[k] == kNone || rhs_end[k] == k) continue;
        if (k < app_end[a] && app_end[a] < rhs_end[k]) {
          return fail(6, i, "pending application " + std::to_string(a) + " ends inside the pair of b" +
                                std::to_string(seg[k].value));
        }
      }
    }

    // Property 7: open binders are reachable from every pending application.
    for (std::size_t a = 0; a < app_end.size(); ++a) {
      for (std::size_t k = 0; k < seg.size(); ++k) {
        if (rhs_end[k] == kNone && k < app_end[a]) {
          return fail(7, i, "open binder b" + std::to_string(seg[k].value) +
                                " is not reachable from pending application " + std::to_string(a));
        }
      }
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<Violation> check_invariants(const Heap& heap, const Spine& s) { return Checker(heap).run(s); }

}  // namespace spinevm
