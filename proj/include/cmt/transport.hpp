#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cmt/machine.hpp"
#include "cmt/measure.hpp"

namespace cmt {

// The staged mass-transport construction: given a probability measure mu
// and a witness pair (nu', x0) whose martingale against mu diverges along
// x0, build stagewise maps realizing a measure-preserving map
// T : (2^N, fair) -> (2^N, mu) whose image avoids x0 entirely.

struct WitnessInstance {
  CylinderMeasure mu;
  CylinderMeasure nu_prime;
  CylinderMeasure nu;  // mix [1/2, 1/4, 1/4] of mu, fair, nu'
  PointOracle x0;
};

// Builds nu and verifies its positivity (nu(s) >= 2^-|s|/4) and the mix
// identity to check_depth. Does not verify divergence along x0.
WitnessInstance make_instance(const CylinderMeasure& mu,
                              const CylinderMeasure& nu_prime,
                              const PointOracle& x0, size_t check_depth = 12);

// The stage-n density f_n(s) = mu(s)/nu(s) tabulated over all words of
// length n. Satisfies 0 <= f_n <= 2 and the nu-average identity
// nu(s0) f_{n+1}(s0) + nu(s1) f_{n+1}(s1) = nu(s) f_n(s).
class DensityStep {
 public:
  DensityStep(const WitnessInstance& inst, size_t n);
  size_t depth() const { return n_; }
  const Rat& value(const BinWord& w) const;  // |w| must equal depth()
  const std::vector<Rat>& table() const { return values_; }

 private:
  size_t n_;
  std::vector<Rat> values_;  // indexed by the word read as a binary number
};

// A column rectangle [column] x (y_lo, y_hi]. Intervals are half-open so
// the stage sources and targets tile without overlap.
struct Rect {
  BinWord column;
  Rat y_lo, y_hi;
  Rat length() const { return y_hi - y_lo; }
};

struct TransportMove {
  Rect source, target;
  Rat mass;  // nu(source.column) * source length == the target mass
};

// Stage n+1 moves, one per length-n parent whose child densities split
// around f_n. Everything outside the listed sources is left fixed.
struct TransportStage {
  size_t index = 0;  // stage n+1 has index n+1; columns have length index
  std::vector<TransportMove> moves;
};

TransportStage build_stage(const WitnessInstance& inst, size_t n);

// Memoized stages 1..depth plus the density tables they were built from.
class TransportPlan {
 public:
  TransportPlan(WitnessInstance inst, size_t depth);

  const WitnessInstance& instance() const { return inst_; }
  size_t built_depth() const { return stages_.size(); }
  void ensure_depth(size_t depth);

  const TransportStage& stage(size_t index) const;  // 1-based
  const DensityStep& density(size_t n) const;

  // The stage move whose source column is w (|w| = stage index), if any.
  const TransportMove* move_from(size_t index, const BinWord& w) const;

 private:
  WitnessInstance inst_;
  std::vector<DensityStep> densities_;   // densities_[n] = f_n
  std::vector<TransportStage> stages_;   // stages_[k] = stage k+1
  std::map<std::pair<size_t, std::string>, size_t> source_index_;
};

// A point of the product space traced through the stages. The x part is a
// refinable prefix source (more fuel, more bits, possibly stalled), the y
// part an exact rational or a shrinking dyadic enclosure.
struct ProductPoint {
  std::function<BinWord(size_t fuel)> x_bits;
  std::function<RatInterval(size_t fuel)> y_enc;
  static ProductPoint sample(const PointOracle& x, const Rat& y0);
};

enum class StageOutcome { Fixed, Moved, Stalled };

struct StageRecord {
  size_t stage = 0;
  StageOutcome outcome = StageOutcome::Fixed;
  BinWord column;    // known output prefix after the stage
  RatInterval y;     // y enclosure after the stage
};

struct TracedPoint {
  std::vector<StageRecord> history;
  bool stalled = false;
  size_t stalled_at = 0;  // stage index when stalled
  BinWord final_column() const;
  RatInterval final_y() const;
};

// Applies the base map to an input point omega: even bits drive the
// nu-CDF inversion for the x coordinate, odd bits give the binary
// expansion of y in [0, 1].
ProductPoint base_map_point(const TransportPlan& plan, const PointOracle& omega);

// Traces a product-space point through stages 1..stages at the given fuel.
TracedPoint trace_stages(const TransportPlan& plan, const ProductPoint& p,
                         size_t stages, size_t fuel);

// Full pipeline: base map then stages.
TracedPoint trace_point(const TransportPlan& plan, const PointOracle& omega,
                        size_t stages, size_t fuel);

// Measure-preserving map between the interiors of two equal-mass column
// rectangles: the x part moves by nu-CDF transport between the columns,
// the y part by the affine bijection between the intervals. Boundary and
// atom points stall.
ProductPoint rect_transport_apply(const CylinderMeasure& nu, const Rect& source,
                                  const Rect& target, const ProductPoint& p);

// Enclosure [off, off + nu(x|k)] of the nu-mass sitting strictly below x
// inside the column, from the length-k oracle prefix.
RatInterval below_mass_enclosure(const CylinderMeasure& nu, const BinWord& col,
                                 const BinWord& xk);
// Longest word below [target_col] whose cumulative-mass interval contains
// [s_lo, s_hi]; emits at most max_bits bits beyond the column.
BinWord cdf_segment_descend(const CylinderMeasure& nu, const BinWord& target_col,
                            const Rat& s_lo, const Rat& s_hi, size_t max_bits);

struct PushforwardRow {
  BinWord sigma;
  Rat ledger;  // column mass reconstructed from the stage rectangles
  Rat mu;      // the target value
  bool ok = false;
};
struct PushforwardReport {
  bool pass = true;
  std::vector<PushforwardRow> rows;
};
// Reconstructs the post-stage column masses from the recorded rectangles
// alone (never from the density definition) and compares them with mu.
PushforwardReport verify_pushforward(const TransportPlan& plan, size_t depth);

struct AvoidanceCertificate {
  size_t depth = 0;  // least n with f_n(x0|n) < y0
  Rat bound;         // the density value at that depth
};
// Any traced point whose initial y lower bound is >= y0 must leave the
// column of x0 by stage `depth`; otherwise its nondecreasing y would
// exceed the density ceiling f_n(x0|n).
std::optional<AvoidanceCertificate> avoidance_certificate(
    const WitnessInstance& inst, const Rat& y0, size_t max_depth);

struct AvoidanceSample {
  PointOracle x;
  Rat y0;
  std::string name;
};
struct AvoidanceRunReport {
  bool pass = true;
  size_t deviated = 0;
  std::vector<std::string> stalled;  // reported, not failed
  std::vector<std::string> failed;
};
// Traces each sample through `cert_depth` stages and checks its column
// prefix leaves x0 | cert_depth. Samples must satisfy y0 >= the threshold
// the certificate was issued for.
AvoidanceRunReport check_avoidance_empirical(
    TransportPlan& plan, const std::vector<AvoidanceSample>& samples,
    size_t cert_depth, size_t fuel = 96);

// The composite map as a monotone machine on the base-map inputs: emits
// the stable output prefix (bit k needs stage k+1 to have acted). Built to
// the plan's depth; no output-rate guarantee.
MonotoneMachine transport_machine(std::shared_ptr<TransportPlan> plan);

}  // namespace cmt
