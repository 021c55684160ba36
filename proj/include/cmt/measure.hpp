#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cmt/clopen.hpp"
#include "cmt/rational.hpp"
#include "cmt/word.hpp"

namespace cmt {

// A measure on Cantor space presented by its exact cylinder valuation
// sigma -> mu([sigma]). Values are exact rationals and evaluators must be
// pure; additivity mu(s0) + mu(s1) = mu(s) is the defining axiom and is
// checkable to any depth with check_additivity.
class CylinderMeasure {
 public:
  using Evaluator = std::function<Rat(const BinWord&)>;

  CylinderMeasure() = default;
  CylinderMeasure(std::string label, Evaluator eval, bool probability);

  Rat operator()(const BinWord& w) const { return impl_->eval(w); }
  const std::string& label() const { return impl_->label; }
  bool is_probability() const { return impl_->probability; }
  bool valid() const { return static_cast<bool>(impl_); }

  // Set when the measure is a product of identical per-bit weights
  // (w0, w1): eval(w) is the product of the bit weights. Enables the
  // merged-state pushforward evaluation; purely an evaluation hint.
  std::optional<std::pair<Rat, Rat>> iid_bit_weights() const {
    return impl_->iid;
  }
  CylinderMeasure with_iid_hint(Rat w0, Rat w1) const;

 private:
  struct Impl {
    std::string label;
    Evaluator eval;
    bool probability = false;
    std::optional<std::pair<Rat, Rat>> iid;
  };
  std::shared_ptr<const Impl> impl_;
};

// Builtin measures.
CylinderMeasure fair_coin();
CylinderMeasure bernoulli(const Rat& p);  // P(bit = 1) = p, 0 < p < 1
CylinderMeasure dirac(const PointOracle& x);

// Weighted sum; weights must be positive and sum to 1 exactly.
CylinderMeasure mix(const std::vector<Rat>& weights,
                    const std::vector<CylinderMeasure>& measures);

// Pointwise scaling by a nonnegative rational.
CylinderMeasure scale(const Rat& c, const CylinderMeasure& m);

// Disjoint sum: component n lives on the cylinder [0^n 1]. The finite form
// is exact everywhere. The infinite form needs the exact tail mass
// tail(n) = sum of mu_m(eps) over m >= n in closed form; without one, spine
// values are only available as enclosures via disjoint_sum_spine_enclosure.
CylinderMeasure disjoint_sum(const std::vector<CylinderMeasure>& components);
CylinderMeasure disjoint_sum(std::function<CylinderMeasure(size_t)> component,
                             std::function<Rat(size_t)> exact_tail,
                             std::string label);
RatInterval disjoint_sum_spine_enclosure(
    const std::function<CylinderMeasure(size_t)>& component,
    const std::function<Rat(size_t)>& tail_bound, size_t n, size_t terms);

// nu(sigma) = mu(C intersect [sigma]).
CylinderMeasure restrict_to_clopen(const CylinderMeasure& m,
                                   const ClopenSet& c);

// Exact mass of a clopen set (generators are disjoint cylinders).
Rat clopen_mass(const CylinderMeasure& m, const ClopenSet& c);

struct AdditivityReport {
  bool pass = true;
  std::vector<BinWord> violations;  // nodes where eval(s0)+eval(s1) != eval(s)
};
AdditivityReport check_additivity(const CylinderMeasure& m, size_t depth,
                                  size_t max_violations = 32);

struct DominationReport {
  bool pass = true;
  std::optional<BinWord> failed_at;
};
DominationReport dominates(const CylinderMeasure& mu,
                           const CylinderMeasure& nu, size_t depth);

// A measure on the product space presented by its rectangle valuation
// (sigma, tau) -> mu([sigma] x [tau]).
class ProductCylinderMeasure {
 public:
  using Evaluator = std::function<Rat(const BinWord&, const BinWord&)>;

  ProductCylinderMeasure() = default;
  ProductCylinderMeasure(std::string label, Evaluator eval);

  Rat operator()(const BinWord& s, const BinWord& t) const {
    return impl_->eval(s, t);
  }
  const std::string& label() const { return impl_->label; }
  bool valid() const { return static_cast<bool>(impl_); }

 private:
  struct Impl {
    std::string label;
    Evaluator eval;
  };
  std::shared_ptr<const Impl> impl_;
};

ProductCylinderMeasure product(const CylinderMeasure& m1,
                               const CylinderMeasure& m2);
CylinderMeasure marginal1(const ProductCylinderMeasure& m);
CylinderMeasure marginal2(const ProductCylinderMeasure& m);

// Transfer along the interleaving identification of 2^N x 2^N with 2^N.
CylinderMeasure join_transfer(const ProductCylinderMeasure& m);
ProductCylinderMeasure split_transfer(const CylinderMeasure& m);

// A step function with pieces on a finite antichain that partitions the
// space. Construction validates the partition; from_pieces can pad the
// uncovered remainder with value 0.
class StepFunction {
 public:
  static StepFunction constant(const Rat& v);
  static StepFunction from_pieces(std::vector<std::pair<BinWord, Rat>> pieces,
                                  bool pad_zero = false);

  const std::vector<std::pair<BinWord, Rat>>& pieces() const {
    return pieces_;
  }

  // f <= g pointwise, decided exactly on the common refinement.
  static bool pointwise_leq(const StepFunction& f, const StepFunction& g);

 private:
  StepFunction() = default;
  std::vector<std::pair<BinWord, Rat>> pieces_;  // sorted antichain
};

// Exact integral of f over [sigma] with respect to m.
Rat integrate_step(const StepFunction& f, const CylinderMeasure& m,
                   const BinWord& sigma);

struct TestPairReport {
  bool pass = true;
  std::optional<size_t> failed_stage;
  std::optional<BinWord> failed_at;
  Rat integral, bound;  // at the failure, when any
};
// Checks the finite stages of an integral test against its bound measure:
// integral of t_k over [sigma] d mu <= nu(sigma) for every stage and every
// word up to depth. Stages must be pointwise nondecreasing.
TestPairReport check_test_pair(const std::vector<StepFunction>& t_stages,
                               const CylinderMeasure& nu,
                               const CylinderMeasure& mu, size_t depth);

struct DensityTraceEntry {
  size_t depth = 0;
  RatInterval ratio;   // enclosure of mu(C and [x|k]) / mu(x|k)
  bool exact = false;  // true when the approximation is declared stable
};
// Finite-stage Lebesgue density data of a closed set along a point.
// working_depth selects the outer approximation level used; must be >= n.
std::vector<DensityTraceEntry> lebesgue_density_trace(
    const CylinderMeasure& m, const ClosedSetApprox& c, const PointOracle& x,
    size_t n, size_t working_depth);

}  // namespace cmt
