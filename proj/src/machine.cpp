#include "cmt/machine.hpp"

#include <functional>
#include <map>

namespace cmt {

namespace {

std::string lp(const std::string& s) {
  return std::to_string(s.size()) + ":" + s;
}

std::string_view take_lp(std::string_view& rest) {
  size_t colon = rest.find(':');
  if (colon == std::string_view::npos) throw Error("bad state encoding");
  size_t len = std::stoul(std::string(rest.substr(0, colon)));
  std::string_view out = rest.substr(colon + 1, len);
  rest.remove_prefix(colon + 1 + len);
  return out;
}

}  // namespace

// Default incremental evaluation recomputes through step(); the state
// carries the input word and the output emitted so far.
std::string MachineImpl::initial_state() const {
  return lp(step(BinWord()).str()) + lp("");
}

std::pair<std::string, BinWord> MachineImpl::advance(const std::string& state,
                                                     int bit) const {
  std::string_view rest = state;
  BinWord out(take_lp(rest));
  BinWord in(take_lp(rest));
  in.push_back(bit);
  BinWord next = step(in);
  if (!out.is_prefix_of(next))
    throw MonotoneViolation(label() + " retracts output at " + in.display());
  return {lp(next.str()) + lp(in.str()), next.suffix(out.size())};
}

namespace {

struct IdentityImpl : MachineImpl {
  std::string label() const override { return "id"; }
  BinWord step(const BinWord& w) const override { return w; }
  bool incremental() const override { return true; }
  std::string initial_state() const override { return ""; }
  std::pair<std::string, BinWord> advance(const std::string&,
                                          int bit) const override {
    BinWord e;
    e.push_back(bit);
    return {"", e};
  }
};

struct TailImpl : MachineImpl {
  std::string label() const override { return "tail"; }
  BinWord step(const BinWord& w) const override {
    for (size_t i = 0; i < w.size(); ++i)
      if (w.bit(i) == 1) return w.suffix(i + 1);
    return BinWord();
  }
  bool incremental() const override { return true; }
  std::string initial_state() const override { return "Z"; }
  std::pair<std::string, BinWord> advance(const std::string& s,
                                          int bit) const override {
    if (s == "Z") {
      if (bit == 0) return {"Z", BinWord()};
      return {"C", BinWord()};
    }
    BinWord e;
    e.push_back(bit);
    return {"C", e};
  }
};

struct ComposeImpl : MachineImpl {
  MonotoneMachine outer, inner;
  bool inc;
  ComposeImpl(MonotoneMachine m2, MonotoneMachine m1, bool incremental)
      : outer(std::move(m2)), inner(std::move(m1)), inc(incremental) {}
  std::string label() const override {
    return "compose(" + outer.label() + "," + inner.label() + ")";
  }
  BinWord step(const BinWord& w) const override {
    return outer.step(inner.step(w));
  }
  bool incremental() const override { return inc; }
  std::string initial_state() const override {
    if (!inc) return MachineImpl::initial_state();
    return lp(inner.initial_state()) + lp(outer.initial_state());
  }
  std::pair<std::string, BinWord> advance(const std::string& state,
                                          int bit) const override {
    if (!inc) return MachineImpl::advance(state, bit);
    std::string_view rest = state;
    std::string s1(take_lp(rest)), s2(take_lp(rest));
    auto [s1n, d1] = inner.advance(s1, bit);
    BinWord emitted;
    for (size_t i = 0; i < d1.size(); ++i) {
      auto [s2n, d2] = outer.advance(s2, d1.bit(i));
      s2 = s2n;
      emitted.append(d2);
    }
    return {lp(s1n) + lp(s2), emitted};
  }
};

struct GraphImpl : MachineImpl {
  MonotoneMachine t;  // only constructed over incremental machines
  explicit GraphImpl(MonotoneMachine t_) : t(std::move(t_)) {}
  std::string label() const override { return "graph(" + t.label() + ")"; }
  BinWord step(const BinWord& w) const override {
    return interleave(w, t.step(w));
  }
  std::string initial_state() const override {
    return std::string("0") + lp(t.initial_state()) + lp("") + lp("");
  }
  bool incremental() const override { return true; }
  std::pair<std::string, BinWord> advance(const std::string& state,
                                          int bit) const override {
    std::string_view rest = state;
    char parity = rest[0];
    rest.remove_prefix(1);
    std::string ts(take_lp(rest));
    std::string xq(take_lp(rest)), yq(take_lp(rest));
    xq.push_back(char('0' + bit));
    auto [tsn, d] = t.advance(ts, bit);
    yq += d.str();
    BinWord emitted;
    for (;;) {
      if (parity == '0') {
        if (xq.empty()) break;
        emitted.push_back(xq.front() - '0');
        xq.erase(xq.begin());
        parity = '1';
      } else {
        if (yq.empty()) break;
        emitted.push_back(yq.front() - '0');
        yq.erase(yq.begin());
        parity = '0';
      }
    }
    return {std::string(1, parity) + lp(tsn) + lp(xq) + lp(yq), emitted};
  }
};

struct ProjectImpl : MachineImpl {
  int keep;  // 0 = even positions, 1 = odd positions
  explicit ProjectImpl(int k) : keep(k) {}
  std::string label() const override {
    return keep == 0 ? "proj_even" : "proj_odd";
  }
  BinWord step(const BinWord& w) const override {
    return keep == 0 ? even_subword(w) : odd_subword(w);
  }
  bool incremental() const override { return true; }
  std::string initial_state() const override { return "0"; }
  std::pair<std::string, BinWord> advance(const std::string& s,
                                          int bit) const override {
    int pos = s[0] - '0';
    BinWord e;
    if (pos == keep) e.push_back(bit);
    return {std::string(1, char('0' + (1 - pos))), e};
  }
};

// CDF inversion. The input prefix pins an interval [a, a + 2^-n) of binary
// values; the target word grows while that interval sits inside a child's
// CDF interval. Ties straddle and simply fail to emit.
struct CdfInvImpl : MachineImpl {
  CylinderMeasure nu;
  explicit CdfInvImpl(CylinderMeasure nu_) : nu(std::move(nu_)) {}
  std::string label() const override { return "cdfinv(" + nu.label() + ")"; }

  std::string encode(size_t n, const Rat& a, const Rat& left, const Rat& vt,
                     const BinWord& t) const {
    return std::to_string(n) + "|" + rat_str(a) + "|" + rat_str(left) + "|" +
           rat_str(vt) + "|" + t.str();
  }

  bool incremental() const override { return true; }
  std::string initial_state() const override {
    return encode(0, Rat(0), Rat(0), nu(BinWord()), BinWord());
  }

  std::pair<std::string, BinWord> advance(const std::string& state,
                                          int bit) const override {
    std::string_view rest = state;
    auto field = [&rest]() {
      size_t bar = rest.find('|');
      std::string out(rest.substr(0, bar));
      rest.remove_prefix(bar == std::string_view::npos ? rest.size() : bar + 1);
      return out;
    };
    size_t n = std::stoul(field());
    Rat a = rat_parse(field());
    Rat left = rat_parse(field());
    Rat vt = rat_parse(field());
    BinWord t{std::string_view(rest)};

    n += 1;
    if (bit) a += rat_pow2(-(long)n);
    Rat b = a + rat_pow2(-(long)n);
    BinWord emitted;
    for (;;) {
      Rat c0 = nu(t.child(0));
      if (a >= left && b <= left + c0) {
        t.push_back(0);
        vt = c0;
        emitted.push_back(0);
      } else if (a >= left + c0 && b <= left + vt) {
        left += c0;
        vt = vt - c0;
        t.push_back(1);
        emitted.push_back(1);
      } else {
        break;
      }
    }
    return {encode(n, a, left, vt, t), emitted};
  }

  BinWord step(const BinWord& w) const override {
    std::string s = initial_state();
    BinWord out;
    for (size_t i = 0; i < w.size(); ++i) {
      auto [sn, d] = advance(s, w.bit(i));
      s = sn;
      out.append(d);
    }
    return out;
  }
};

struct LambdaImpl : MachineImpl {
  std::string name;
  std::function<BinWord(const BinWord&)> fn;
  LambdaImpl(std::string n, std::function<BinWord(const BinWord&)> f)
      : name(std::move(n)), fn(std::move(f)) {}
  std::string label() const override { return name; }
  BinWord step(const BinWord& w) const override { return fn(w); }
};

}  // namespace

MonotoneMachine identity_machine() {
  return MonotoneMachine(std::make_shared<IdentityImpl>());
}

MonotoneMachine tail_map() {
  return MonotoneMachine(std::make_shared<TailImpl>());
}

MonotoneMachine compose(const MonotoneMachine& m2, const MonotoneMachine& m1) {
  // The pair is incremental only when both parts are; otherwise fall back
  // to recomputation through step().
  bool inc = m2.is_incremental() && m1.is_incremental();
  return MonotoneMachine(std::make_shared<ComposeImpl>(m2, m1, inc));
}

MonotoneMachine graph_machine(const MonotoneMachine& t) {
  if (t.is_incremental())
    return MonotoneMachine(std::make_shared<GraphImpl>(t));
  // Wrap a recomputing step; the default advance handles the rest.
  MonotoneMachine copy = t;
  return machine_from_step("graph(" + t.label() + ")",
                           [copy](const BinWord& w) {
                             return interleave(w, copy.step(w));
                           });
}

MonotoneMachine project_even() {
  return MonotoneMachine(std::make_shared<ProjectImpl>(0));
}

MonotoneMachine project_odd() {
  return MonotoneMachine(std::make_shared<ProjectImpl>(1));
}

MonotoneMachine cdf_inversion_map(const CylinderMeasure& nu) {
  if (!nu.is_probability())
    throw BadInput("cdf inversion needs a probability measure");
  return MonotoneMachine(std::make_shared<CdfInvImpl>(nu));
}

MonotoneMachine machine_from_step(
    std::string label, std::function<BinWord(const BinWord&)> step) {
  return MonotoneMachine(
      std::make_shared<LambdaImpl>(std::move(label), std::move(step)));
}

MonotoneReport check_monotone(const MonotoneMachine& m, size_t depth) {
  MonotoneReport rep;
  BinWord w;
  std::function<bool(BinWord&, const BinWord&)> walk =
      [&](BinWord& node, const BinWord& out) -> bool {
    if (node.size() >= depth) return true;
    for (int b = 0; b < 2; ++b) {
      node.push_back(b);
      BinWord next = m.step(node);
      if (!out.is_prefix_of(next)) {
        node.pop_back();
        rep.pass = false;
        rep.counterexample = {node, node.child(b)};
        return false;
      }
      bool ok = walk(node, next);
      node.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  walk(w, m.step(w));
  return rep;
}

LimitResult limit_prefix(const MonotoneMachine& m, const PointOracle& x,
                         size_t want, size_t fuel) {
  if (fuel < want) throw BadInput("limit_prefix: fuel must be at least want");
  BinWord out = m.step(x.prefix(fuel));
  if (out.size() >= want) return out.prefix(want);
  return Stalled{out};
}

namespace {

// Relation of the emitted output to tau: -1 incompatible, otherwise the
// number of matched tau bits (== |tau| means the output covers tau).
int consume_rel(int rel, const BinWord& emitted, const BinWord& tau) {
  if (rel < 0) return rel;
  size_t m = static_cast<size_t>(rel);
  for (size_t i = 0; i < emitted.size() && m < tau.size(); ++i) {
    if (emitted.bit(i) != tau.bit(m)) return -1;
    ++m;
  }
  return static_cast<int>(m);
}

}  // namespace

RatInterval pushforward_bounds(const MonotoneMachine& m,
                               const CylinderMeasure& mu, const BinWord& tau,
                               size_t depth) {
  Rat total = mu(BinWord());
  int rel0 = consume_rel(0, m.step(BinWord()), tau);
  const int REL_IN = static_cast<int>(tau.size());
  if (rel0 == REL_IN) return RatInterval(total, total);
  if (rel0 < 0) return RatInterval(Rat(0), Rat(0));

  Rat in_acc = 0, out_acc = 0;
  if (auto iid = mu.iid_bit_weights()) {
    // Node sets with equal machine state and tau relation have identical
    // futures under an iid measure; fold them and walk level by level.
    std::map<std::pair<std::string, int>, Rat> cur;
    cur[{m.initial_state(), rel0}] = total;
    for (size_t d = 0; d < depth && !cur.empty(); ++d) {
      std::map<std::pair<std::string, int>, Rat> next;
      for (const auto& [key, mass] : cur) {
        for (int b = 0; b < 2; ++b) {
          Rat mb = mass * (b ? iid->second : iid->first);
          if (mb == 0) continue;
          auto [sn, emitted] = m.advance(key.first, b);
          int rel = consume_rel(key.second, emitted, tau);
          if (rel == REL_IN)
            in_acc += mb;
          else if (rel < 0)
            out_acc += mb;
          else
            next[{sn, rel}] += mb;
        }
      }
      cur = std::move(next);
    }
    return RatInterval(in_acc, total - out_acc);
  }

  BinWord node;
  std::function<void(BinWord&, const std::string&, int)> descend =
      [&](BinWord& w, const std::string& state, int rel) {
        if (w.size() >= depth) return;
        for (int b = 0; b < 2; ++b) {
          w.push_back(b);
          Rat mass = mu(w);
          if (mass != 0) {
            auto [sn, emitted] = m.advance(state, b);
            int r = consume_rel(rel, emitted, tau);
            if (r == REL_IN)
              in_acc += mass;
            else if (r < 0)
              out_acc += mass;
            else
              descend(w, sn, r);
          }
          w.pop_back();
        }
      };
  descend(node, m.initial_state(), rel0);
  return RatInterval(in_acc, total - out_acc);
}

PreimageReport preimage_search(const MonotoneMachine& m,
                               const CylinderMeasure& mu, const BinWord& tau,
                               size_t depth) {
  PreimageReport rep;
  rep.depth = depth;
  rep.in_mass = rep.out_mass = rep.undecided_mass = 0;
  const int REL_IN = static_cast<int>(tau.size());

  BinWord node;
  std::function<void(BinWord&, int)> descend = [&](BinWord& w, int rel) {
    if (rel == REL_IN) {
      rep.decided_in.push_back(w);
      rep.in_mass += mu(w);
      return;
    }
    if (rel < 0) {
      rep.decided_out.push_back(w);
      rep.out_mass += mu(w);
      return;
    }
    if (w.size() >= depth) {
      rep.undecided_mass += mu(w);
      return;
    }
    BinWord out = m.step(w);
    for (int b = 0; b < 2; ++b) {
      w.push_back(b);
      BinWord next = m.step(w);
      int r = consume_rel(rel, next.suffix(out.size()), tau);
      descend(w, r);
      w.pop_back();
    }
  };
  descend(node, consume_rel(0, m.step(BinWord()), tau));
  return rep;
}

}  // namespace cmt
