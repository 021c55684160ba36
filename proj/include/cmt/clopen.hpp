#pragma once

#include <optional>
#include <vector>

#include "cmt/word.hpp"

namespace cmt {

// A clopen subset of Cantor space: a finite union of cylinders kept in
// canonical form. Canonical means the generator list is a prefix-free
// antichain, sorted, with every full sibling pair {w0, w1} merged to w.
class ClopenSet {
 public:
  ClopenSet() = default;  // the empty set
  static ClopenSet whole();
  static ClopenSet cylinder(const BinWord& w);
  static ClopenSet from_generators(std::vector<BinWord> gens);

  const std::vector<BinWord>& generators() const { return gens_; }
  bool empty() const { return gens_.empty(); }
  bool is_whole() const;

  // Longest generator length; membership of a point is decided by any
  // prefix of that length.
  size_t horizon() const;

  ClopenSet unite(const ClopenSet& o) const;
  ClopenSet intersect(const ClopenSet& o) const;
  ClopenSet complement() const;
  bool subset_of(const ClopenSet& o) const;
  ClopenSet intersect_cylinder(const BinWord& w) const;

  // Membership of [w] as a whole: +1 contained, -1 disjoint, 0 mixed.
  int cylinder_side(const BinWord& w) const;

  // Exact fair-coin mass, sum of 2^-|g| over generators.
  Rat fair_mass() const;

  friend bool operator==(const ClopenSet&, const ClopenSet&) = default;

 private:
  std::vector<BinWord> gens_;  // canonical
};

// Outer clopen approximations of an effectively closed set: level(k) is the
// depth-k approximation and level(k+1) is contained in level(k). Only outer
// information is carried. A family may declare that it is stable from some
// level onward, in which case values derived from it are exact.
class ClosedSetApprox {
 public:
  ClosedSetApprox() = default;
  ClosedSetApprox(std::string label, std::function<ClopenSet(size_t)> level);

  // Constant family: the closed set is the clopen set itself.
  static ClosedSetApprox clopen(const ClopenSet& c);

  ClopenSet level(size_t k) const { return level_(k); }
  const std::string& label() const { return label_; }

  std::optional<size_t> stable_from() const { return stable_from_; }
  ClosedSetApprox with_stable_from(size_t k) const;

  // Checks level(k+1) subset of level(k) for k < depth.
  bool check_antitone(size_t depth) const;

 private:
  std::string label_;
  std::function<ClopenSet(size_t)> level_;
  std::optional<size_t> stable_from_;
};

}  // namespace cmt
