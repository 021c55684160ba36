#pragma once

#include <optional>
#include <vector>

#include "cmt/measure.hpp"
#include "cmt/word.hpp"

namespace cmt {

// The ratio nu(x|n)/mu(x|n) along prefixes: a fair betting capital process
// with respect to mu. Defined only where the denominator is positive.
struct Martingale {
  CylinderMeasure numerator;    // nu
  CylinderMeasure denominator;  // mu
};

// Exact quotient; throws ZeroDenominator when mu(sigma) = 0.
Rat ratio(const Martingale& m, const BinWord& sigma);

struct CapitalTrace {
  std::vector<Rat> values;  // entry k = ratio at x|k
  // Set when mu(x|k) = 0 was hit; values is truncated just before it.
  std::optional<size_t> zero_denominator_at;
};
CapitalTrace capital_trace(const Martingale& m, const PointOracle& x,
                           size_t n);

// Least n <= max_depth with ratio(x|n) >= threshold, or nullopt.
std::optional<size_t> divergence_witness(const Martingale& m,
                                         const PointOracle& x,
                                         const Rat& threshold,
                                         size_t max_depth);

struct DoobReport {
  Rat window_max, window_min, oscillation;
};
// Oscillation of the trailing window of a capital trace. Emits observed
// data only; no convergence verdict is implied.
DoobReport doob_report(const std::vector<Rat>& trace, size_t window);

// Stage-n conditional measure on the first coordinate of a product-space
// measure, conditioned on a finite prefix of the second coordinate.
struct ConditionalApprox {
  ProductCylinderMeasure base;
  BinWord cond_prefix;  // y|n
};

// mu(sigma x y|n) / mu2(y|n), exact. Throws ZeroDenominator.
Rat conditional_value(const ConditionalApprox& c, const BinWord& sigma);

// Stage-n term of the conditional integral for a step function constant in
// the second coordinate.
Rat conditional_integral_step(const StepFunction& f,
                              const ProductCylinderMeasure& m,
                              const BinWord& cond_prefix);

}  // namespace cmt
