#include "cmt/clopen.hpp"

#include <algorithm>
#include <memory>

namespace cmt {

namespace {

// Canonicalization trie: a full node absorbs its subtree; when both
// children become full the parent becomes full and the children drop.
struct Node {
  bool full = false;
  std::unique_ptr<Node> kid[2];
};

void insert(Node* n, const BinWord& w, size_t i) {
  if (n->full) return;
  if (i == w.size()) {
    n->full = true;
    n->kid[0].reset();
    n->kid[1].reset();
    return;
  }
  int b = w.bit(i);
  if (!n->kid[b]) n->kid[b] = std::make_unique<Node>();
  insert(n->kid[b].get(), w, i + 1);
  if (n->kid[0] && n->kid[0]->full && n->kid[1] && n->kid[1]->full) {
    n->full = true;
    n->kid[0].reset();
    n->kid[1].reset();
  }
}

void emit(const Node* n, BinWord& path, std::vector<BinWord>& out) {
  if (n->full) {
    out.push_back(path);
    return;
  }
  for (int b = 0; b < 2; ++b) {
    if (n->kid[b]) {
      path.push_back(b);
      emit(n->kid[b].get(), path, out);
      path.pop_back();
    }
  }
}

void emit_complement(const Node* n, BinWord& path, std::vector<BinWord>& out) {
  if (n->full) return;
  if (!n->kid[0] && !n->kid[1]) {
    out.push_back(path);
    return;
  }
  for (int b = 0; b < 2; ++b) {
    path.push_back(b);
    if (n->kid[b])
      emit_complement(n->kid[b].get(), path, out);
    else
      out.push_back(path);
    path.pop_back();
  }
}

std::vector<BinWord> canonical(const std::vector<BinWord>& gens,
                               bool complement = false) {
  Node root;
  for (const auto& g : gens) insert(&root, g, 0);
  std::vector<BinWord> out;
  BinWord path;
  if (complement)
    emit_complement(&root, path, out);
  else
    emit(&root, path, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ClopenSet ClopenSet::whole() { return cylinder(BinWord()); }

ClopenSet ClopenSet::cylinder(const BinWord& w) {
  ClopenSet c;
  c.gens_ = {w};
  return c;
}

ClopenSet ClopenSet::from_generators(std::vector<BinWord> gens) {
  ClopenSet c;
  c.gens_ = canonical(gens);
  return c;
}

bool ClopenSet::is_whole() const {
  return gens_.size() == 1 && gens_[0].empty();
}

size_t ClopenSet::horizon() const {
  size_t h = 0;
  for (const auto& g : gens_) h = std::max(h, g.size());
  return h;
}

ClopenSet ClopenSet::unite(const ClopenSet& o) const {
  std::vector<BinWord> all = gens_;
  all.insert(all.end(), o.gens_.begin(), o.gens_.end());
  return from_generators(std::move(all));
}

ClopenSet ClopenSet::intersect(const ClopenSet& o) const {
  std::vector<BinWord> out;
  for (const auto& a : gens_)
    for (const auto& b : o.gens_)
      if (a.compatible(b)) out.push_back(a.size() >= b.size() ? a : b);
  return from_generators(std::move(out));
}

ClopenSet ClopenSet::complement() const {
  ClopenSet c;
  c.gens_ = canonical(gens_, /*complement=*/true);
  return c;
}

bool ClopenSet::subset_of(const ClopenSet& o) const {
  return intersect(o.complement()).empty();
}

ClopenSet ClopenSet::intersect_cylinder(const BinWord& w) const {
  return intersect(cylinder(w));
}

int ClopenSet::cylinder_side(const BinWord& w) const {
  bool any = false;
  for (const auto& g : gens_) {
    if (g.is_prefix_of(w)) return +1;
    if (w.is_prefix_of(g)) any = true;
  }
  return any ? 0 : -1;
}

Rat ClopenSet::fair_mass() const {
  Rat m = 0;
  for (const auto& g : gens_) m += rat_pow2(-static_cast<long>(g.size()));
  return m;
}

ClosedSetApprox::ClosedSetApprox(std::string label,
                                 std::function<ClopenSet(size_t)> level)
    : label_(std::move(label)), level_(std::move(level)) {}

ClosedSetApprox ClosedSetApprox::clopen(const ClopenSet& c) {
  ClosedSetApprox a("clopen", [c](size_t) { return c; });
  a.stable_from_ = 0;
  return a;
}

ClosedSetApprox ClosedSetApprox::with_stable_from(size_t k) const {
  ClosedSetApprox a = *this;
  a.stable_from_ = k;
  return a;
}

bool ClosedSetApprox::check_antitone(size_t depth) const {
  for (size_t k = 0; k + 1 <= depth; ++k)
    if (!level_(k + 1).subset_of(level_(k))) return false;
  return true;
}

}  // namespace cmt
