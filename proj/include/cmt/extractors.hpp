#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "cmt/clopen.hpp"
#include "cmt/machine.hpp"

namespace cmt {

// The von Neumann debiasing extractor: input is read in 2-bit blocks,
// block 01 emits 0, block 10 emits 1, equal blocks emit nothing.
MonotoneMachine von_neumann();

// A nonmonotonic selection strategy: after observing the selected bits
// y|s it names the next input index to read. Indices must be fresh (never
// repeated along a history) and bounded by fuel(s), which makes totality
// a syntactic property.
struct SelectionStrategy {
  std::string label;
  std::function<uint64_t(const BinWord& history)> next_index;
  std::function<uint64_t(size_t)> fuel;  // index for output bit s is < fuel(s)
};

SelectionStrategy monotone_selection();                  // i_s = s
SelectionStrategy arithmetic_selection(uint64_t stride); // i_s = stride*s

// Builds the induced machine. The strategy is audited exhaustively over
// all histories up to audit_depth; freshness or fuel violations throw
// BadInput.
MonotoneMachine selection_machine(const SelectionStrategy& s,
                                  size_t audit_depth = 10);

// A finite family of clopen sets C_0..C_{k-1}, each of fair mass 1/2 and
// mutually independent; the induced map's bit n reports membership in C_n.
struct SequenceSetFamily {
  std::vector<ClopenSet> sets;
  size_t horizon() const;
};

struct HalfMassViolation {
  size_t index = 0;
  Rat mass;
};
struct IndependenceWitness {
  std::vector<size_t> subfamily;
  Rat intersection_mass, product_mass;
};
using SeqSetError = std::variant<HalfMassViolation, IndependenceWitness>;

// Exact check of all subfamilies of size <= k.
std::optional<IndependenceWitness> check_independence(
    const SequenceSetFamily& fam, size_t k);

// Verifies half-mass and full mutual independence, then builds the map.
std::variant<MonotoneMachine, SeqSetError> seqset_machine(
    const SequenceSetFamily& fam);

// Pushforward fairness: the enclosure at input depth depth_in must contain
// 2^-|tau| for every |tau| <= depth_out. When exact_required is set the
// enclosures must be singletons (selection and sequence-set machines).
struct FairnessReport {
  bool pass = true;
  std::optional<BinWord> failed_at;
  RatInterval interval;
};
FairnessReport pushforward_is_fair(const MonotoneMachine& m, size_t depth_in,
                                   size_t depth_out,
                                   bool exact_required = false);

struct SllnTrace {
  std::vector<Rat> means;  // running means of the first k output bits
  size_t produced = 0;     // output bits actually obtained
  bool stalled = false;    // fewer than n bits within the fuel bound
};
SllnTrace slln_trace(const MonotoneMachine& m, const PointOracle& x, size_t n,
                     size_t fuel);

}  // namespace cmt
