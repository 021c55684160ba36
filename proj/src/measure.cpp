#include "cmt/measure.hpp"

#include <algorithm>
#include <map>

namespace cmt {

CylinderMeasure::CylinderMeasure(std::string label, Evaluator eval,
                                 bool probability) {
  auto impl = std::make_shared<Impl>();
  impl->label = std::move(label);
  impl->eval = std::move(eval);
  impl->probability = probability;
  impl_ = std::move(impl);
}

CylinderMeasure CylinderMeasure::with_iid_hint(Rat w0, Rat w1) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->iid = std::make_pair(std::move(w0), std::move(w1));
  CylinderMeasure m;
  m.impl_ = std::move(impl);
  return m;
}

CylinderMeasure fair_coin() {
  CylinderMeasure m(
      "fair", [](const BinWord& w) { return rat_pow2(-(long)w.size()); },
      /*probability=*/true);
  return m.with_iid_hint(Rat(1, 2), Rat(1, 2));
}

CylinderMeasure bernoulli(const Rat& p) {
  if (p <= 0 || p >= 1) throw BadInput("bernoulli weight must be in (0,1)");
  Rat q = 1 - p;
  CylinderMeasure m(
      "bernoulli(" + rat_str(p) + ")",
      [p, q](const BinWord& w) {
        Rat v = 1;
        for (size_t i = 0; i < w.size(); ++i) v *= w.bit(i) ? p : q;
        return v;
      },
      /*probability=*/true);
  return m.with_iid_hint(q, p);
}

CylinderMeasure dirac(const PointOracle& x) {
  return CylinderMeasure(
      "dirac(" + x.label() + ")",
      [x](const BinWord& w) {
        for (size_t i = 0; i < w.size(); ++i)
          if (w.bit(i) != x.bit(i)) return Rat(0);
        return Rat(1);
      },
      /*probability=*/true);
}

CylinderMeasure mix(const std::vector<Rat>& weights,
                    const std::vector<CylinderMeasure>& measures) {
  if (weights.size() != measures.size() || weights.empty())
    throw BadInput("mix: weights and measures must pair up");
  Rat sum = 0;
  for (const auto& w : weights) {
    if (w <= 0) throw BadInput("mix: weights must be positive");
    sum += w;
  }
  if (sum != 1) throw BadInput("mix: weights must sum to 1, got " + rat_str(sum));
  bool prob = true;
  std::string label = "mix(";
  for (size_t i = 0; i < weights.size(); ++i) {
    prob = prob && measures[i].is_probability();
    label += (i ? "," : "") + rat_str(weights[i]) + "*" + measures[i].label();
  }
  label += ")";
  return CylinderMeasure(
      label,
      [weights, measures](const BinWord& w) {
        Rat v = 0;
        for (size_t i = 0; i < weights.size(); ++i)
          v += weights[i] * measures[i](w);
        return v;
      },
      prob);
}

CylinderMeasure scale(const Rat& c, const CylinderMeasure& m) {
  if (c < 0) throw BadInput("scale: factor must be nonnegative");
  return CylinderMeasure(
      rat_str(c) + "*" + m.label(),
      [c, m](const BinWord& w) { return c * m(w); },
      /*probability=*/c == 1 && m.is_probability());
}

namespace {

// Shared disjoint-sum evaluator. Any word is either all zeros (spine) or
// 0^n 1 rest, landing in component n.
Rat dsum_eval(const BinWord& w,
              const std::function<CylinderMeasure(size_t)>& component,
              const std::function<Rat(size_t)>& tail) {
  for (size_t n = 0; n < w.size(); ++n)
    if (w.bit(n) == 1) return component(n)(w.suffix(n + 1));
  return tail(w.size());
}

}  // namespace

CylinderMeasure disjoint_sum(const std::vector<CylinderMeasure>& components) {
  std::vector<Rat> totals;
  totals.reserve(components.size());
  for (const auto& c : components) totals.push_back(c(BinWord()));
  // tail(n) = sum of component totals from n on; exact for finite families.
  auto tail = [totals](size_t n) {
    Rat t = 0;
    for (size_t m = n; m < totals.size(); ++m) t += totals[m];
    return t;
  };
  auto comp = [components](size_t n) {
    if (n >= components.size())
      return CylinderMeasure(
          "zero", [](const BinWord&) { return Rat(0); }, false);
    return components[n];
  };
  Rat total = tail(0);
  return CylinderMeasure(
      "dsum[" + std::to_string(components.size()) + "]",
      [comp, tail](const BinWord& w) { return dsum_eval(w, comp, tail); },
      total == 1);
}

CylinderMeasure disjoint_sum(std::function<CylinderMeasure(size_t)> component,
                             std::function<Rat(size_t)> exact_tail,
                             std::string label) {
  Rat total = exact_tail(0);
  return CylinderMeasure(
      std::move(label),
      [component, exact_tail](const BinWord& w) {
        return dsum_eval(w, component, exact_tail);
      },
      total == 1);
}

RatInterval disjoint_sum_spine_enclosure(
    const std::function<CylinderMeasure(size_t)>& component,
    const std::function<Rat(size_t)>& tail_bound, size_t n, size_t terms) {
  Rat partial = 0;
  for (size_t m = n; m < n + terms; ++m) partial += component(m)(BinWord());
  Rat bound = tail_bound(n + terms);
  if (bound < 0 || bound > tail_bound(n))
    throw BadInput("tail bound is not decreasing");
  return RatInterval(partial, partial + bound);
}

CylinderMeasure restrict_to_clopen(const CylinderMeasure& m,
                                   const ClopenSet& c) {
  return CylinderMeasure(
      "restrict(" + m.label() + ")",
      [m, c](const BinWord& w) { return clopen_mass(m, c.intersect_cylinder(w)); },
      /*probability=*/false);
}

Rat clopen_mass(const CylinderMeasure& m, const ClopenSet& c) {
  Rat v = 0;
  for (const auto& g : c.generators()) v += m(g);
  return v;
}

AdditivityReport check_additivity(const CylinderMeasure& m, size_t depth,
                                  size_t max_violations) {
  AdditivityReport rep;
  BinWord w;
  // Depth-first over all words shorter than depth.
  std::function<void(BinWord&)> walk = [&](BinWord& node) {
    if (node.size() >= depth) return;
    if (rep.violations.size() >= max_violations) return;
    if (m(node.child(0)) + m(node.child(1)) != m(node)) {
      rep.pass = false;
      rep.violations.push_back(node);
    }
    for (int b = 0; b < 2; ++b) {
      node.push_back(b);
      walk(node);
      node.pop_back();
    }
  };
  walk(w);
  return rep;
}

DominationReport dominates(const CylinderMeasure& mu, const CylinderMeasure& nu,
                           size_t depth) {
  DominationReport rep;
  BinWord w;
  std::function<bool(BinWord&)> walk = [&](BinWord& node) -> bool {
    if (mu(node) > nu(node)) {
      rep.pass = false;
      rep.failed_at = node;
      return false;
    }
    if (node.size() >= depth) return true;
    for (int b = 0; b < 2; ++b) {
      node.push_back(b);
      bool ok = walk(node);
      node.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  walk(w);
  return rep;
}

ProductCylinderMeasure::ProductCylinderMeasure(std::string label,
                                               Evaluator eval) {
  auto impl = std::make_shared<Impl>();
  impl->label = std::move(label);
  impl->eval = std::move(eval);
  impl_ = std::move(impl);
}

ProductCylinderMeasure product(const CylinderMeasure& m1,
                               const CylinderMeasure& m2) {
  return ProductCylinderMeasure(
      m1.label() + "(x)" + m2.label(),
      [m1, m2](const BinWord& s, const BinWord& t) { return m1(s) * m2(t); });
}

CylinderMeasure marginal1(const ProductCylinderMeasure& m) {
  return CylinderMeasure(
      m.label() + ".m1",
      [m](const BinWord& s) { return m(s, BinWord()); },
      /*probability=*/m(BinWord(), BinWord()) == 1);
}

CylinderMeasure marginal2(const ProductCylinderMeasure& m) {
  return CylinderMeasure(
      m.label() + ".m2",
      [m](const BinWord& t) { return m(BinWord(), t); },
      /*probability=*/m(BinWord(), BinWord()) == 1);
}

CylinderMeasure join_transfer(const ProductCylinderMeasure& m) {
  return CylinderMeasure(
      "join(" + m.label() + ")",
      [m](const BinWord& w) { return m(even_subword(w), odd_subword(w)); },
      /*probability=*/m(BinWord(), BinWord()) == 1);
}

ProductCylinderMeasure split_transfer(const CylinderMeasure& m) {
  return ProductCylinderMeasure(
      "split(" + m.label() + ")",
      [m](const BinWord& s, const BinWord& t) {
        // Mass of all interleavings consistent with (s, t): fix the
        // constrained positions, sum over the free ones.
        size_t len = std::max(s.size() * 2, t.size() * 2 + (t.empty() ? 0 : 1));
        if (s.size() > t.size()) len = s.size() * 2 - 1;
        std::vector<int> fixed(len, -1);
        for (size_t i = 0; i < s.size(); ++i) fixed[2 * i] = s.bit(i);
        for (size_t i = 0; i < t.size(); ++i) fixed[2 * i + 1] = t.bit(i);
        Rat total = 0;
        BinWord w;
        std::function<void(size_t)> fill = [&](size_t i) {
          if (i == len) {
            total += m(w);
            return;
          }
          if (fixed[i] >= 0) {
            w.push_back(fixed[i]);
            fill(i + 1);
            w.pop_back();
            return;
          }
          for (int b = 0; b < 2; ++b) {
            w.push_back(b);
            fill(i + 1);
            w.pop_back();
          }
        };
        fill(0);
        return total;
      });
}

StepFunction StepFunction::constant(const Rat& v) {
  return from_pieces({{BinWord(), v}});
}

StepFunction StepFunction::from_pieces(
    std::vector<std::pair<BinWord, Rat>> pieces, bool pad_zero) {
  std::vector<BinWord> domain;
  for (const auto& [w, v] : pieces) {
    if (v < 0) throw BadInput("step function values must be nonnegative");
    domain.push_back(w);
  }
  ClopenSet cover = ClopenSet::from_generators(domain);
  if (cover.generators().size() != domain.size())
    throw BadInput("step function pieces must form an antichain");
  if (!cover.is_whole()) {
    if (!pad_zero) throw BadInput("step function pieces must cover the space");
    for (const auto& g : cover.complement().generators())
      pieces.emplace_back(g, Rat(0));
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  StepFunction f;
  f.pieces_ = std::move(pieces);
  return f;
}

bool StepFunction::pointwise_leq(const StepFunction& f, const StepFunction& g) {
  for (const auto& [wf, vf] : f.pieces_)
    for (const auto& [wg, vg] : g.pieces_)
      if (wf.compatible(wg) && vf > vg) return false;
  return true;
}

Rat integrate_step(const StepFunction& f, const CylinderMeasure& m,
                   const BinWord& sigma) {
  Rat total = 0;
  for (const auto& [w, v] : f.pieces()) {
    if (v == 0) continue;
    if (!w.compatible(sigma)) continue;
    total += v * m(w.size() >= sigma.size() ? w : sigma);
  }
  return total;
}

TestPairReport check_test_pair(const std::vector<StepFunction>& t_stages,
                               const CylinderMeasure& nu,
                               const CylinderMeasure& mu, size_t depth) {
  for (size_t k = 0; k + 1 < t_stages.size(); ++k)
    if (!StepFunction::pointwise_leq(t_stages[k], t_stages[k + 1]))
      throw BadInput("test stages must be pointwise nondecreasing");
  TestPairReport rep;
  for (size_t k = 0; k < t_stages.size(); ++k) {
    BinWord w;
    std::function<bool(BinWord&)> walk = [&](BinWord& node) -> bool {
      Rat integral = integrate_step(t_stages[k], mu, node);
      Rat bound = nu(node);
      if (integral > bound) {
        rep.pass = false;
        rep.failed_stage = k;
        rep.failed_at = node;
        rep.integral = integral;
        rep.bound = bound;
        return false;
      }
      if (node.size() >= depth) return true;
      for (int b = 0; b < 2; ++b) {
        node.push_back(b);
        bool ok = walk(node);
        node.pop_back();
        if (!ok) return false;
      }
      return true;
    };
    if (!walk(w)) return rep;
  }
  return rep;
}

std::vector<DensityTraceEntry> lebesgue_density_trace(
    const CylinderMeasure& m, const ClosedSetApprox& c, const PointOracle& x,
    size_t n, size_t working_depth) {
  if (working_depth < n) throw BadInput("working depth must be at least n");
  bool exact = c.stable_from() && *c.stable_from() <= working_depth;
  ClopenSet outer = c.level(working_depth);
  std::vector<DensityTraceEntry> out;
  for (size_t k = 0; k <= n; ++k) {
    BinWord p = x.prefix(k);
    Rat denom = m(p);
    if (denom == 0) throw ZeroDenominator(p.display());
    Rat hi = clopen_mass(m, outer.intersect_cylinder(p)) / denom;
    Rat lo = exact ? hi : Rat(0);
    out.push_back({k, RatInterval(lo, hi), exact});
  }
  return out;
}

}  // namespace cmt
