#include "cmt/extractors.hpp"

#include <set>

namespace cmt {

namespace {

struct VonNeumannImpl : MachineImpl {
  std::string label() const override { return "vn"; }
  BinWord step(const BinWord& w) const override {
    BinWord out;
    for (size_t i = 0; i + 1 < w.size(); i += 2)
      if (w.bit(i) != w.bit(i + 1)) out.push_back(w.bit(i));
    return out;
  }
  bool incremental() const override { return true; }
  std::string initial_state() const override { return ""; }
  std::pair<std::string, BinWord> advance(const std::string& s,
                                          int bit) const override {
    if (s.empty()) return {std::string(1, char('0' + bit)), BinWord()};
    int first = s[0] - '0';
    BinWord e;
    if (first != bit) e.push_back(first);
    return {"", e};
  }
};

struct SelectionImpl : MachineImpl {
  SelectionStrategy strat;
  explicit SelectionImpl(SelectionStrategy s) : strat(std::move(s)) {}
  std::string label() const override { return "select(" + strat.label + ")"; }
  BinWord step(const BinWord& w) const override {
    BinWord out;
    std::set<uint64_t> used;
    // At most |w| distinct indices fit below |w|.
    for (size_t s = 0; s <= w.size(); ++s) {
      uint64_t i = strat.next_index(out);
      if (i >= w.size()) break;
      if (!used.insert(i).second)
        throw BadInput("selection strategy repeats index " +
                       std::to_string(i));
      out.push_back(w.bit(i));
    }
    return out;
  }
};

struct SeqSetImpl : MachineImpl {
  SequenceSetFamily fam;
  explicit SeqSetImpl(SequenceSetFamily f) : fam(std::move(f)) {}
  std::string label() const override {
    return "seqset[" + std::to_string(fam.sets.size()) + "]";
  }
  BinWord step(const BinWord& w) const override {
    BinWord out;
    for (const auto& c : fam.sets) {
      int side = c.cylinder_side(w);
      if (side == 0) break;  // bit undecided; later bits must wait
      out.push_back(side > 0 ? 1 : 0);
    }
    return out;
  }
};

}  // namespace

MonotoneMachine von_neumann() {
  return MonotoneMachine(std::make_shared<VonNeumannImpl>());
}

SelectionStrategy monotone_selection() {
  return {"monotone", [](const BinWord& h) { return (uint64_t)h.size(); },
          [](size_t s) { return (uint64_t)s + 1; }};
}

SelectionStrategy arithmetic_selection(uint64_t stride) {
  if (stride == 0) throw BadInput("selection stride must be positive");
  return {"stride" + std::to_string(stride),
          [stride](const BinWord& h) { return stride * h.size(); },
          [stride](size_t s) { return stride * s + 1; }};
}

MonotoneMachine selection_machine(const SelectionStrategy& s,
                                  size_t audit_depth) {
  // Exhaustive audit over observable histories: indices stay fresh along
  // every history and respect the declared fuel bound.
  BinWord h;
  std::vector<uint64_t> path;
  std::function<void(BinWord&)> audit = [&](BinWord& hist) {
    if (hist.size() > audit_depth) return;
    uint64_t i = s.next_index(hist);
    if (i == UINT64_MAX) return;  // strategy undefined past this history
    if (i >= s.fuel(hist.size()))
      throw BadInput("selection index " + std::to_string(i) +
                     " exceeds fuel at step " + std::to_string(hist.size()));
    for (uint64_t prev : path)
      if (prev == i)
        throw BadInput("selection strategy repeats index " +
                       std::to_string(i));
    path.push_back(i);
    for (int b = 0; b < 2; ++b) {
      hist.push_back(b);
      audit(hist);
      hist.pop_back();
    }
    path.pop_back();
  };
  audit(h);
  return MonotoneMachine(std::make_shared<SelectionImpl>(s));
}

size_t SequenceSetFamily::horizon() const {
  size_t h = 0;
  for (const auto& c : sets) h = std::max(h, c.horizon());
  return h;
}

std::optional<IndependenceWitness> check_independence(
    const SequenceSetFamily& fam, size_t k) {
  size_t n = fam.sets.size();
  if (k > n) throw BadInput("subfamily size exceeds family size");
  // All nonempty subfamilies of size <= k, checked exactly on antichains.
  for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask) {
    size_t bits = static_cast<size_t>(__builtin_popcountll(mask));
    if (bits > k) continue;
    ClopenSet inter = ClopenSet::whole();
    Rat prod = 1;
    std::vector<size_t> members;
    for (size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      inter = inter.intersect(fam.sets[i]);
      prod *= fam.sets[i].fair_mass();
      members.push_back(i);
    }
    Rat actual = inter.fair_mass();
    if (actual != prod) return IndependenceWitness{members, actual, prod};
  }
  return std::nullopt;
}

std::variant<MonotoneMachine, SeqSetError> seqset_machine(
    const SequenceSetFamily& fam) {
  for (size_t i = 0; i < fam.sets.size(); ++i) {
    Rat m = fam.sets[i].fair_mass();
    if (m != Rat(1, 2)) return SeqSetError{HalfMassViolation{i, m}};
  }
  if (auto w = check_independence(fam, fam.sets.size()))
    return SeqSetError{*w};
  return MonotoneMachine(std::make_shared<SeqSetImpl>(fam));
}

FairnessReport pushforward_is_fair(const MonotoneMachine& m, size_t depth_in,
                                   size_t depth_out, bool exact_required) {
  FairnessReport rep;
  CylinderMeasure lambda = fair_coin();
  BinWord tau;
  std::function<bool(BinWord&)> walk = [&](BinWord& t) -> bool {
    RatInterval iv = pushforward_bounds(m, lambda, t, depth_in);
    bool ok = iv.contains(rat_pow2(-(long)t.size()));
    if (ok && exact_required) ok = iv.is_point();
    if (!ok) {
      rep.pass = false;
      rep.failed_at = t;
      rep.interval = iv;
      return false;
    }
    if (t.size() >= depth_out) return true;
    for (int b = 0; b < 2; ++b) {
      t.push_back(b);
      if (!walk(t)) return false;
      t.pop_back();
    }
    return true;
  };
  walk(tau);
  return rep;
}

SllnTrace slln_trace(const MonotoneMachine& m, const PointOracle& x, size_t n,
                     size_t fuel) {
  SllnTrace t;
  BinWord out = m.step(x.prefix(fuel));
  t.produced = std::min(n, out.size());
  t.stalled = t.produced < n;
  Rat sum = 0;
  for (size_t k = 0; k < t.produced; ++k) {
    sum += out.bit(k);
    t.means.push_back(sum / Rat((unsigned long)(k + 1)));
  }
  return t;
}

}  // namespace cmt
