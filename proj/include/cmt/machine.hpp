#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmt/measure.hpp"
#include "cmt/rational.hpp"
#include "cmt/word.hpp"

namespace cmt {

// A monotone machine: a total map step: 2* -> 2* with
// step(s) a prefix of step(s') whenever s is a prefix of s'. The induced
// partial map on Cantor space is T(x) = lim step(x|n) when that limit is
// infinite. Partiality shows up as output starvation, never as an error.
//
// Implementations may additionally support incremental evaluation through
// opaque string-encoded states; the default derives it from step(). States
// are only meaningful to the machine that produced them.
class MachineImpl {
 public:
  virtual ~MachineImpl() = default;
  virtual std::string label() const = 0;
  virtual BinWord step(const BinWord& input) const = 0;

  virtual bool incremental() const { return false; }
  virtual std::string initial_state() const;
  // Returns the successor state and the newly emitted output bits.
  virtual std::pair<std::string, BinWord> advance(const std::string& state,
                                                  int bit) const;
};

class MonotoneMachine {
 public:
  MonotoneMachine() = default;
  explicit MonotoneMachine(std::shared_ptr<const MachineImpl> impl)
      : impl_(std::move(impl)) {}

  BinWord step(const BinWord& w) const { return impl_->step(w); }
  std::string label() const { return impl_->label(); }
  std::string initial_state() const { return impl_->initial_state(); }
  std::pair<std::string, BinWord> advance(const std::string& s, int b) const {
    return impl_->advance(s, b);
  }
  bool is_incremental() const { return impl_->incremental(); }
  bool valid() const { return static_cast<bool>(impl_); }

 private:
  std::shared_ptr<const MachineImpl> impl_;
};

// Builtins and combinators.
MonotoneMachine identity_machine();
MonotoneMachine tail_map();  // 0^n 1 x -> x
MonotoneMachine compose(const MonotoneMachine& m2, const MonotoneMachine& m1);
MonotoneMachine graph_machine(const MonotoneMachine& t);  // x -> x (+) T(x)
MonotoneMachine project_even();
MonotoneMachine project_odd();
// CDF inversion: an a.e. computable measure-preserving map from the fair
// coin onto nu. Inputs whose binary value straddles a CDF breakpoint
// forever stall; that set is a lambda-null set.
MonotoneMachine cdf_inversion_map(const CylinderMeasure& nu);
// Wraps an arbitrary step function (used by tests and fixtures).
MonotoneMachine machine_from_step(std::string label,
                                  std::function<BinWord(const BinWord&)> step);

struct MonotoneReport {
  bool pass = true;
  std::optional<std::pair<BinWord, BinWord>> counterexample;
};
MonotoneReport check_monotone(const MonotoneMachine& m, size_t depth);

struct Stalled {
  BinWord progress;  // longest output obtained
};
using LimitResult = std::variant<BinWord, Stalled>;
// First `want` output bits of M on x, reading at most `fuel` input bits.
LimitResult limit_prefix(const MonotoneMachine& m, const PointOracle& x,
                         size_t want, size_t fuel);

// Finite-stage enclosure of the pushforward mass mu_T([tau]). The lower
// bound is the mass of inputs already committed to [tau]; the upper bound
// discounts only inputs whose emitted output is incompatible with tau.
// Enclosures are nested in depth and contain mu_T(tau) whenever T is
// defined mu-almost everywhere.
RatInterval pushforward_bounds(const MonotoneMachine& m,
                               const CylinderMeasure& mu, const BinWord& tau,
                               size_t depth);

struct PreimageReport {
  size_t depth = 0;
  std::vector<BinWord> decided_in;   // maximal words with tau below step(s)
  std::vector<BinWord> decided_out;  // maximal words incompatible with tau
  Rat in_mass, out_mass, undecided_mass;
};
PreimageReport preimage_search(const MonotoneMachine& m,
                               const CylinderMeasure& mu, const BinWord& tau,
                               size_t depth);

}  // namespace cmt
