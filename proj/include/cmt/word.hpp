#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "cmt/rational.hpp"

namespace cmt {

// A finite binary word, an element of 2*. The empty word is written "e" in
// all textual formats.
class BinWord {
 public:
  BinWord() = default;
  // Accepts a string of '0'/'1' characters; "e" and "" denote the empty word.
  explicit BinWord(std::string_view bits);

  size_t size() const { return b_.size(); }
  bool empty() const { return b_.empty(); }
  int bit(size_t i) const { return b_[i] - '0'; }
  int last() const { return b_.back() - '0'; }

  BinWord child(int b) const;
  BinWord parent() const;
  BinWord sibling() const;  // flips the last bit
  BinWord prefix(size_t n) const;
  BinWord suffix(size_t from) const;

  void push_back(int b) { b_.push_back(char('0' + (b & 1))); }
  void pop_back() { b_.pop_back(); }
  void append(const BinWord& w) { b_ += w.b_; }

  bool is_prefix_of(const BinWord& w) const;
  // True when one of the two is a prefix of the other.
  bool compatible(const BinWord& w) const;

  // Raw '0'/'1' characters. display() shows the empty word as "e".
  const std::string& str() const { return b_; }
  std::string display() const { return b_.empty() ? "e" : b_; }

  friend bool operator==(const BinWord&, const BinWord&) = default;
  friend auto operator<=>(const BinWord& a, const BinWord& b) {
    return a.b_ <=> b.b_;
  }

 private:
  std::string b_;
};

// Interleaves x and y: z(2n) = x(n), z(2n+1) = y(n), as far as both sides
// reach; when x is one bit longer its final bit is still emitted.
BinWord interleave(const BinWord& x, const BinWord& y);
BinWord even_subword(const BinWord& w);
BinWord odd_subword(const BinWord& w);

// A point of Cantor space presented as an oracle for its prefixes. The
// per-index bit function makes prefix coherence hold by construction.
class PointOracle {
 public:
  PointOracle() = default;
  PointOracle(std::string label, std::function<int(uint64_t)> bit);

  // pattern repeated forever; pattern must be nonempty.
  static PointOracle periodic(const BinWord& pattern);
  // head then all zeros (a dyadic point).
  static PointOracle dyadic(const BinWord& head);

  int bit(uint64_t i) const { return bit_(i); }
  BinWord prefix(size_t n) const;
  const std::string& label() const { return label_; }
  bool valid() const { return static_cast<bool>(bit_); }

 private:
  std::string label_;
  std::function<int(uint64_t)> bit_;
};

}  // namespace cmt
