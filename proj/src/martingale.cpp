#include "cmt/martingale.hpp"

#include <algorithm>

namespace cmt {

Rat ratio(const Martingale& m, const BinWord& sigma) {
  Rat denom = m.denominator(sigma);
  if (denom == 0) throw ZeroDenominator(sigma.display());
  return m.numerator(sigma) / denom;
}

CapitalTrace capital_trace(const Martingale& m, const PointOracle& x,
                           size_t n) {
  CapitalTrace t;
  for (size_t k = 0; k <= n; ++k) {
    BinWord p = x.prefix(k);
    Rat denom = m.denominator(p);
    if (denom == 0) {
      t.zero_denominator_at = k;
      break;
    }
    t.values.push_back(m.numerator(p) / denom);
  }
  return t;
}

std::optional<size_t> divergence_witness(const Martingale& m,
                                         const PointOracle& x,
                                         const Rat& threshold,
                                         size_t max_depth) {
  if (threshold <= 0) throw BadInput("divergence threshold must be positive");
  for (size_t n = 0; n <= max_depth; ++n) {
    if (ratio(m, x.prefix(n)) >= threshold) return n;
  }
  return std::nullopt;
}

DoobReport doob_report(const std::vector<Rat>& trace, size_t window) {
  if (window < 2) throw BadInput("doob window must be at least 2");
  if (trace.size() < window) throw BadInput("trace shorter than window");
  auto first = trace.end() - static_cast<long>(window);
  DoobReport rep;
  rep.window_max = *std::max_element(first, trace.end());
  rep.window_min = *std::min_element(first, trace.end());
  rep.oscillation = rep.window_max - rep.window_min;
  return rep;
}

Rat conditional_value(const ConditionalApprox& c, const BinWord& sigma) {
  Rat denom = c.base(BinWord(), c.cond_prefix);
  if (denom == 0) throw ZeroDenominator(c.cond_prefix.display());
  return c.base(sigma, c.cond_prefix) / denom;
}

Rat conditional_integral_step(const StepFunction& f,
                              const ProductCylinderMeasure& m,
                              const BinWord& cond_prefix) {
  Rat denom = m(BinWord(), cond_prefix);
  if (denom == 0) throw ZeroDenominator(cond_prefix.display());
  Rat total = 0;
  for (const auto& [w, v] : f.pieces()) {
    if (v == 0) continue;
    total += v * m(w, cond_prefix);
  }
  return total / denom;
}

}  // namespace cmt
