#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmt {

// All arithmetic in this library is exact. Rat is an arbitrary-precision
// rational kept in canonical form (gcd 1, positive denominator).
using Rat = mpq_class;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed references, rejected preconditions, bad CLI input.
struct BadInput : Error {
  using Error::Error;
};

// A ratio was requested at a word of zero denominator mass.
struct ZeroDenominator : Error {
  explicit ZeroDenominator(const std::string& where)
      : Error("zero denominator at " + where) {}
};

// A machine's step function failed the prefix-monotonicity contract while
// being evaluated incrementally.
struct MonotoneViolation : Error {
  using Error::Error;
};

// Parses "p/q" or "p"; q must be nonzero. Throws BadInput.
Rat rat_parse(std::string_view text);

// Canonical rendering: "p" when the denominator is 1, else "p/q".
std::string rat_str(const Rat& r);

// 2^e for any (possibly negative) exponent.
Rat rat_pow2(long e);

// Closed rational interval [lo, hi], lo <= hi. Used as the enclosure type
// for quantities that are only computable in the limit.
class RatInterval {
 public:
  RatInterval() : lo_(0), hi_(0) {}
  RatInterval(Rat lo, Rat hi);
  static RatInterval point(Rat v) { return RatInterval(v, v); }

  const Rat& lo() const { return lo_; }
  const Rat& hi() const { return hi_; }
  Rat width() const { return hi_ - lo_; }
  bool is_point() const { return lo_ == hi_; }
  bool contains(const Rat& v) const { return lo_ <= v && v <= hi_; }
  bool contains(const RatInterval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }

  std::string str() const;

 private:
  Rat lo_, hi_;
};

}  // namespace cmt
