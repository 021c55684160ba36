#include "cmt/transport.hpp"

#include <algorithm>
#include <functional>

namespace cmt {

WitnessInstance make_instance(const CylinderMeasure& mu,
                              const CylinderMeasure& nu_prime,
                              const PointOracle& x0, size_t check_depth) {
  if (!mu.is_probability() || mu(BinWord()) != 1)
    throw BadInput("make_instance: mu must be a probability measure");
  if (!nu_prime.is_probability() || nu_prime(BinWord()) != 1)
    throw BadInput("make_instance: nu' must be a probability measure");
  WitnessInstance inst{mu, nu_prime,
                       mix({Rat(1, 2), Rat(1, 4), Rat(1, 4)},
                           {mu, fair_coin(), nu_prime}),
                       x0};
  // The fair component keeps every cylinder strictly positive.
  BinWord w;
  std::function<void(BinWord&)> walk = [&](BinWord& node) {
    Rat floor = rat_pow2(-(long)node.size()) / 4;
    if (inst.nu(node) < floor)
      throw Error("witness mix lost positivity at " + node.display());
    if (node.size() >= check_depth) return;
    for (int b = 0; b < 2; ++b) {
      node.push_back(b);
      walk(node);
      node.pop_back();
    }
  };
  walk(w);
  return inst;
}

DensityStep::DensityStep(const WitnessInstance& inst, size_t n) : n_(n) {
  values_.reserve(size_t(1) << n);
  BinWord w;
  std::function<void(BinWord&)> walk = [&](BinWord& node) {
    if (node.size() == n_) {
      values_.push_back(inst.mu(node) / inst.nu(node));
      return;
    }
    for (int b = 0; b < 2; ++b) {
      node.push_back(b);
      walk(node);
      node.pop_back();
    }
  };
  walk(w);
}

const Rat& DensityStep::value(const BinWord& w) const {
  if (w.size() != n_) throw BadInput("density queried at the wrong depth");
  size_t idx = 0;
  for (size_t i = 0; i < w.size(); ++i) idx = (idx << 1) | w.bit(i);
  return values_[idx];
}

TransportStage build_stage(const WitnessInstance& inst, size_t n) {
  TransportStage stage;
  stage.index = n + 1;
  BinWord w;
  std::function<void(BinWord&)> walk = [&](BinWord& node) {
    if (node.size() == n) {
      Rat fn = inst.mu(node) / inst.nu(node);
      BinWord c0 = node.child(0), c1 = node.child(1);
      Rat f0 = inst.mu(c0) / inst.nu(c0);
      Rat f1 = inst.mu(c1) / inst.nu(c1);
      if (f0 == fn && f1 == fn) return;
      // Exactly one child dips below the parent density; mass in the gap
      // band moves sideways to the sibling, upward.
      const BinWord& src = f0 < fn ? c0 : c1;
      const BinWord& dst = f0 < fn ? c1 : c0;
      const Rat& fsrc = f0 < fn ? f0 : f1;
      const Rat& fdst = f0 < fn ? f1 : f0;
      TransportMove mv;
      mv.source = Rect{src, fsrc, fn};
      mv.target = Rect{dst, fn, fdst};
      mv.mass = inst.nu(src) * mv.source.length();
      Rat target_mass = inst.nu(dst) * mv.target.length();
      if (mv.mass != target_mass)
        throw Error("stage move is not mass balanced at " + node.display());
      stage.moves.push_back(std::move(mv));
      return;
    }
    for (int b = 0; b < 2; ++b) {
      node.push_back(b);
      walk(node);
      node.pop_back();
    }
  };
  walk(w);
  return stage;
}

TransportPlan::TransportPlan(WitnessInstance inst, size_t depth)
    : inst_(std::move(inst)) {
  densities_.emplace_back(inst_, 0);
  ensure_depth(depth);
}

void TransportPlan::ensure_depth(size_t depth) {
  while (stages_.size() < depth) {
    size_t n = stages_.size();
    densities_.emplace_back(inst_, n + 1);
    stages_.push_back(build_stage(inst_, n));
    const TransportStage& st = stages_.back();
    for (size_t i = 0; i < st.moves.size(); ++i)
      source_index_[{st.index, st.moves[i].source.column.str()}] = i;
  }
}

const TransportStage& TransportPlan::stage(size_t index) const {
  if (index == 0 || index > stages_.size())
    throw BadInput("stage index out of range");
  return stages_[index - 1];
}

const DensityStep& TransportPlan::density(size_t n) const {
  if (n >= densities_.size()) throw BadInput("density depth out of range");
  return densities_[n];
}

const TransportMove* TransportPlan::move_from(size_t index,
                                              const BinWord& w) const {
  auto it = source_index_.find({index, w.str()});
  if (it == source_index_.end()) return nullptr;
  return &stages_[index - 1].moves[it->second];
}

ProductPoint ProductPoint::sample(const PointOracle& x, const Rat& y0) {
  ProductPoint p;
  p.x_bits = [x](size_t fuel) { return x.prefix(fuel); };
  p.y_enc = [y0](size_t) { return RatInterval::point(y0); };
  return p;
}

BinWord TracedPoint::final_column() const {
  return history.empty() ? BinWord() : history.back().column;
}

RatInterval TracedPoint::final_y() const {
  return history.empty() ? RatInterval() : history.back().y;
}

ProductPoint base_map_point(const TransportPlan& plan,
                            const PointOracle& omega) {
  MonotoneMachine inv = cdf_inversion_map(plan.instance().nu);
  ProductPoint p;
  p.x_bits = [inv, omega](size_t fuel) {
    return inv.step(even_subword(omega.prefix(fuel)));
  };
  p.y_enc = [omega](size_t fuel) {
    size_t m = fuel / 2;
    Rat lo = 0;
    for (size_t i = 0; i < m; ++i)
      if (omega.bit(2 * i + 1)) lo += rat_pow2(-(long)(i + 1));
    return RatInterval(lo, lo + rat_pow2(-(long)m));
  };
  return p;
}

RatInterval below_mass_enclosure(const CylinderMeasure& nu, const BinWord& col,
                                 const BinWord& xk) {
  if (!col.is_prefix_of(xk))
    throw BadInput("point does not lie in the column");
  Rat off = 0;
  for (size_t j = col.size(); j < xk.size(); ++j)
    if (xk.bit(j) == 1) off += nu(xk.prefix(j).child(0));
  return RatInterval(off, off + nu(xk));
}

BinWord cdf_segment_descend(const CylinderMeasure& nu, const BinWord& target_col,
                            const Rat& s_lo, const Rat& s_hi, size_t max_bits) {
  BinWord t = target_col;
  Rat left = 0;
  Rat vt = nu(t);
  size_t emitted = 0;
  while (emitted < max_bits) {
    Rat c0 = nu(t.child(0));
    // Closed enclosure against half-open child intervals; exact hits at a
    // right endpoint stay undecided (the stall set of the scheme).
    if (s_lo >= left && s_hi < left + c0) {
      t.push_back(0);
      vt = c0;
    } else if (s_lo >= left + c0 && s_hi < left + vt) {
      left += c0;
      vt -= c0;
      t.push_back(1);
    } else {
      break;
    }
    ++emitted;
  }
  return t;
}

ProductPoint rect_transport_apply(const CylinderMeasure& nu, const Rect& source,
                                  const Rect& target, const ProductPoint& p) {
  Rat a = nu(source.column), b = nu(target.column);
  if (a <= 0 || b <= 0) throw BadInput("transport between null columns");
  Rat ratio = b / a;
  Rat y_scale = target.length() / source.length();
  ProductPoint q;
  BinWord src_col = source.column, dst_col = target.column;
  auto xb = p.x_bits;
  q.x_bits = [nu, src_col, dst_col, ratio, xb](size_t fuel) {
    BinWord xw = xb(fuel);
    if (xw.size() < src_col.size() || !src_col.is_prefix_of(xw))
      return dst_col;  // nothing beyond the column is decidable yet
    RatInterval below = below_mass_enclosure(nu, src_col, xw);
    return cdf_segment_descend(nu, dst_col, below.lo() * ratio,
                               below.hi() * ratio, fuel);
  };
  Rat s_lo = source.y_lo, t_lo = target.y_lo;
  auto ye = p.y_enc;
  q.y_enc = [ye, s_lo, t_lo, y_scale](size_t fuel) {
    RatInterval y = ye(fuel);
    return RatInterval(t_lo + (y.lo() - s_lo) * y_scale,
                       t_lo + (y.hi() - s_lo) * y_scale);
  };
  return q;
}

namespace {

enum class YSide { Inside, Outside, Undecided };

YSide y_side(const RatInterval& y, const Rat& lo, const Rat& hi) {
  if (y.lo() > lo && y.hi() < hi) return YSide::Inside;
  if (y.hi() < lo || y.lo() > hi) return YSide::Outside;
  return YSide::Undecided;
}

}  // namespace

TracedPoint trace_stages(const TransportPlan& plan, const ProductPoint& p,
                         size_t stages, size_t fuel) {
  if (stages > plan.built_depth())
    throw BadInput("plan not built deep enough for the requested trace");
  TracedPoint out;
  ProductPoint cur = p;
  out.history.push_back(
      {0, StageOutcome::Fixed, cur.x_bits(fuel), cur.y_enc(fuel)});
  for (size_t s = 1; s <= stages; ++s) {
    BinWord x = cur.x_bits(fuel);
    if (x.size() < s) {
      out.stalled = true;
      out.stalled_at = s;
      break;
    }
    const TransportMove* mv = plan.move_from(s, x.prefix(s));
    StageRecord rec;
    rec.stage = s;
    if (mv == nullptr) {
      rec.outcome = StageOutcome::Fixed;
      rec.column = x;
      rec.y = cur.y_enc(fuel);
    } else {
      RatInterval y = cur.y_enc(fuel);
      switch (y_side(y, mv->source.y_lo, mv->source.y_hi)) {
        case YSide::Outside:
          rec.outcome = StageOutcome::Fixed;
          rec.column = x;
          rec.y = y;
          break;
        case YSide::Inside:
          cur = rect_transport_apply(plan.instance().nu, mv->source,
                                     mv->target, cur);
          rec.outcome = StageOutcome::Moved;
          rec.column = cur.x_bits(fuel);
          rec.y = cur.y_enc(fuel);
          break;
        case YSide::Undecided:
          out.stalled = true;
          out.stalled_at = s;
          break;
      }
      if (out.stalled) break;
    }
    out.history.push_back(std::move(rec));
  }
  return out;
}

TracedPoint trace_point(const TransportPlan& plan, const PointOracle& omega,
                        size_t stages, size_t fuel) {
  return trace_stages(plan, base_map_point(plan, omega), stages, fuel);
}

PushforwardReport verify_pushforward(const TransportPlan& plan, size_t depth) {
  if (depth > plan.built_depth())
    throw BadInput("plan not built deep enough to verify");
  const CylinderMeasure& nu = plan.instance().nu;
  const CylinderMeasure& mu = plan.instance().mu;
  PushforwardReport rep;
  // Column masses are rebuilt from the recorded rectangles alone, then
  // compared against mu; the density tables are never consulted.
  std::function<void(const BinWord&, const Rat&)> walk =
      [&](const BinWord& node, const Rat& ledger) {
        PushforwardRow row{node, ledger, mu(node), false};
        row.ok = row.ledger == row.mu;
        rep.pass = rep.pass && row.ok;
        rep.rows.push_back(row);
        if (node.size() >= depth) return;
        size_t stage_index = node.size() + 1;
        Rat parent_height = ledger / nu(node);
        for (int b = 0; b < 2; ++b) {
          BinWord child = node.child(b);
          Rat mass = nu(child) * parent_height;
          const TransportStage& st = plan.stage(stage_index);
          for (const auto& mv : st.moves) {
            if (mv.source.column == child)
              mass -= nu(mv.source.column) * mv.source.length();
            if (mv.target.column == child)
              mass += nu(mv.target.column) * mv.target.length();
          }
          walk(child, mass);
        }
      };
  walk(BinWord(), nu(BinWord()));
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const PushforwardRow& a, const PushforwardRow& b) {
                     if (a.sigma.size() != b.sigma.size())
                       return a.sigma.size() < b.sigma.size();
                     return a.sigma < b.sigma;
                   });
  return rep;
}

std::optional<AvoidanceCertificate> avoidance_certificate(
    const WitnessInstance& inst, const Rat& y0, size_t max_depth) {
  if (y0 <= 0) throw BadInput("avoidance threshold must be positive");
  for (size_t n = 0; n <= max_depth; ++n) {
    BinWord p = inst.x0.prefix(n);
    Rat f = inst.mu(p) / inst.nu(p);
    if (f < y0) return AvoidanceCertificate{n, f};
  }
  return std::nullopt;
}

AvoidanceRunReport check_avoidance_empirical(
    TransportPlan& plan, const std::vector<AvoidanceSample>& samples,
    size_t cert_depth, size_t fuel) {
  plan.ensure_depth(cert_depth);
  BinWord avoid = plan.instance().x0.prefix(cert_depth);
  AvoidanceRunReport rep;
  for (const auto& s : samples) {
    TracedPoint t =
        trace_stages(plan, ProductPoint::sample(s.x, s.y0), cert_depth, fuel);
    if (t.stalled) {
      rep.stalled.push_back(s.name);
      continue;
    }
    if (t.final_column().prefix(cert_depth) != avoid) {
      ++rep.deviated;
    } else {
      rep.pass = false;
      rep.failed.push_back(s.name);
    }
  }
  return rep;
}

namespace {

struct TransportMachineImpl : MachineImpl {
  std::shared_ptr<TransportPlan> plan;
  explicit TransportMachineImpl(std::shared_ptr<TransportPlan> p)
      : plan(std::move(p)) {}
  std::string label() const override {
    return "transport(" + plan->instance().mu.label() + ")";
  }
  BinWord step(const BinWord& w) const override {
    // Feed the finite input through the base map and the built stages;
    // output bit k is stable once stage k+1 has acted.
    MonotoneMachine inv = cdf_inversion_map(plan->instance().nu);
    ProductPoint p;
    p.x_bits = [&inv, &w](size_t) { return inv.step(even_subword(w)); };
    p.y_enc = [&w](size_t) {
      size_t m = w.size() / 2;
      Rat lo = 0;
      for (size_t i = 0; i < m; ++i)
        if (w.bit(2 * i + 1)) lo += rat_pow2(-(long)(i + 1));
      return RatInterval(lo, lo + rat_pow2(-(long)m));
    };
    TracedPoint t =
        trace_stages(*plan, p, plan->built_depth(), /*fuel=*/w.size());
    size_t stable = t.stalled ? t.stalled_at - 1 : plan->built_depth();
    BinWord col = t.final_column();
    return col.prefix(std::min(stable, col.size()));
  }
};

}  // namespace

MonotoneMachine transport_machine(std::shared_ptr<TransportPlan> plan) {
  return MonotoneMachine(std::make_shared<TransportMachineImpl>(std::move(plan)));
}

}  // namespace cmt
