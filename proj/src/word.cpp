#include "cmt/word.hpp"

#include <algorithm>

namespace cmt {

Rat rat_parse(std::string_view text) {
  if (text.empty()) throw BadInput("empty rational");
  std::string s(text);
  for (char c : s) {
    if (!(c == '-' || c == '/' || (c >= '0' && c <= '9')))
      throw BadInput("bad rational: " + s);
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw BadInput("bad rational: " + s);
  if (q.get_den() == 0) throw BadInput("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

Rat rat_pow2(long e) {
  Rat r;
  if (e >= 0) {
    mpz_class n = 1;
    n <<= static_cast<unsigned long>(e);
    r = n;
  } else {
    mpz_class d = 1;
    d <<= static_cast<unsigned long>(-e);
    r = Rat(1, d);
  }
  r.canonicalize();
  return r;
}

RatInterval::RatInterval(Rat lo, Rat hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ > hi_) throw BadInput("interval with lo > hi");
}

std::string RatInterval::str() const {
  return "[" + rat_str(lo_) + "," + rat_str(hi_) + "]";
}

BinWord::BinWord(std::string_view bits) {
  if (bits == "e") return;
  for (char c : bits) {
    if (c != '0' && c != '1') throw BadInput("bad word: " + std::string(bits));
  }
  b_.assign(bits);
}

BinWord BinWord::child(int b) const {
  BinWord w = *this;
  w.push_back(b);
  return w;
}

BinWord BinWord::parent() const {
  BinWord w = *this;
  w.pop_back();
  return w;
}

BinWord BinWord::sibling() const {
  BinWord w = *this;
  w.b_.back() = w.b_.back() == '0' ? '1' : '0';
  return w;
}

BinWord BinWord::prefix(size_t n) const {
  BinWord w;
  w.b_ = b_.substr(0, n);
  return w;
}

BinWord BinWord::suffix(size_t from) const {
  BinWord w;
  if (from < b_.size()) w.b_ = b_.substr(from);
  return w;
}

bool BinWord::is_prefix_of(const BinWord& w) const {
  return b_.size() <= w.b_.size() &&
         std::equal(b_.begin(), b_.end(), w.b_.begin());
}

bool BinWord::compatible(const BinWord& w) const {
  return is_prefix_of(w) || w.is_prefix_of(*this);
}

BinWord interleave(const BinWord& x, const BinWord& y) {
  BinWord z;
  size_t m = std::min(x.size(), y.size());
  for (size_t i = 0; i < m; ++i) {
    z.push_back(x.bit(i));
    z.push_back(y.bit(i));
  }
  if (x.size() > m) z.push_back(x.bit(m));
  return z;
}

BinWord even_subword(const BinWord& w) {
  BinWord s;
  for (size_t i = 0; i < w.size(); i += 2) s.push_back(w.bit(i));
  return s;
}

BinWord odd_subword(const BinWord& w) {
  BinWord s;
  for (size_t i = 1; i < w.size(); i += 2) s.push_back(w.bit(i));
  return s;
}

PointOracle::PointOracle(std::string label, std::function<int(uint64_t)> bit)
    : label_(std::move(label)), bit_(std::move(bit)) {}

PointOracle PointOracle::periodic(const BinWord& pattern) {
  if (pattern.empty()) throw BadInput("periodic point needs a nonempty pattern");
  return PointOracle(pattern.str() + "^inf", [pattern](uint64_t i) {
    return pattern.bit(i % pattern.size());
  });
}

PointOracle PointOracle::dyadic(const BinWord& head) {
  return PointOracle(head.display() + "0^inf", [head](uint64_t i) {
    return i < head.size() ? head.bit(i) : 0;
  });
}

BinWord PointOracle::prefix(size_t n) const {
  BinWord w;
  for (size_t i = 0; i < n; ++i) w.push_back(bit_(i));
  return w;
}

}  // namespace cmt
