#pragma once

// Difference-bound matrices over clocks x_1..x_n with reference clock x_0 = 0.
// Entry (i, j) bounds x_i − x_j. All constants are integers, so every bound a
// zone operation produces is an integer or +∞.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tfilter/core.hpp"
#include "tfilter/errors.hpp"

namespace tfilter {

// Upper bound `value` (strict: <, otherwise <=). (+∞, strict) is the only
// representation of "unbounded".
struct Bound {
  std::int64_t value = 0;
  bool strict = false;

  static constexpr Bound infinity() { return {std::numeric_limits<std::int64_t>::max(), true}; }
  static constexpr Bound le(std::int64_t v) { return {v, false}; }
  static constexpr Bound lt(std::int64_t v) { return {v, true}; }

  constexpr bool is_infinite() const { return value == std::numeric_limits<std::int64_t>::max(); }

  friend constexpr bool operator==(const Bound&, const Bound&) = default;

  // Tighter bounds are smaller; at equal values a strict bound is tighter.
  friend constexpr std::strong_ordering operator<=>(const Bound& a, const Bound& b) {
    if (auto c = a.value <=> b.value; c != 0) return c;
    if (a.strict == b.strict) return std::strong_ordering::equal;
    return a.strict ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  friend constexpr Bound operator+(const Bound& a, const Bound& b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return {a.value + b.value, a.strict || b.strict};
  }

  // Does `diff` satisfy this bound?
  bool admits(double diff) const {
    if (is_infinite()) return true;
    const auto c = static_cast<double>(value);
    return strict ? diff < c : diff <= c;
  }
};

// A single interval of clock values: lower = (c, strict) means y > c (strict)
// or y >= c; upper is a Bound as above.
struct Interval {
  Bound lower = Bound::le(0);
  Bound upper = Bound::infinity();

  static Interval all() { return {}; }
  static Interval point(std::int64_t c) { return {Bound::le(c), Bound::le(c)}; }

  bool empty() const {
    if (upper.is_infinite()) return false;
    if (lower.value != upper.value) return lower.value > upper.value;
    return lower.strict || upper.strict;
  }

  bool contains(double u) const {
    const auto lo = static_cast<double>(lower.value);
    if (lower.strict ? !(u > lo) : !(u >= lo)) return false;
    return upper.admits(u);
  }

  bool subset_of(const Interval& o) const {
    if (empty()) return true;
    // lower >= o.lower, treating strictness as "just above"
    const bool lower_ok = lower.value > o.lower.value ||
                          (lower.value == o.lower.value && (lower.strict || !o.lower.strict));
    return lower_ok && upper <= o.upper;
  }

  std::string to_string() const {
    std::string s = lower.strict ? "(" : "[";
    s += std::to_string(lower.value) + ",";
    if (upper.is_infinite()) return s + "inf)";
    return s + std::to_string(upper.value) + (upper.strict ? ")" : "]");
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

class Dbm {
 public:
  // All clocks >= 0, otherwise unconstrained.
  static Dbm universe(std::size_t clocks) {
    Dbm z(clocks);
    for (std::size_t i = 0; i < z.dim_; ++i) {
      for (std::size_t j = 0; j < z.dim_; ++j) {
        if (i == j || i == 0) z.at(i, j) = Bound::le(0);
        else z.at(i, j) = Bound::infinity();
      }
    }
    return z;
  }

  // The single valuation with every clock at 0.
  static Dbm zero(std::size_t clocks) {
    Dbm z(clocks);
    std::fill(z.m_.begin(), z.m_.end(), Bound::le(0));
    return z;
  }

  // {0 + t | t >= 0}: all clocks equal and nonnegative.
  static Dbm zero_elapsed(std::size_t clocks) {
    Dbm z = zero(clocks);
    z.elapse();
    return z;
  }

  std::size_t clocks() const { return dim_ - 1; }
  std::size_t dimension() const { return dim_; }
  const Bound& operator()(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }

  // Tighten x_i − x_j ≺ b without re-canonicalizing.
  void constrain_raw(std::size_t i, std::size_t j, Bound b) {
    check_index(i);
    check_index(j);
    if (empty_) return;
    if (b < at(i, j)) at(i, j) = b;
  }

  // All-pairs shortest-path closure; detects emptiness.
  Dbm& canonicalize() {
    if (empty_) return *this;
    for (std::size_t k = 0; k < dim_; ++k)
      for (std::size_t i = 0; i < dim_; ++i) {
        const Bound ik = at(i, k);
        if (ik.is_infinite()) continue;
        for (std::size_t j = 0; j < dim_; ++j) {
          const Bound via = ik + at(k, j);
          if (via < at(i, j)) at(i, j) = via;
        }
      }
    for (std::size_t i = 0; i < dim_; ++i)
      if (at(i, i) < Bound::le(0)) {
        mark_empty();
        return *this;
      }
    return *this;
  }

  bool is_empty() const { return empty_; }

  // Adds x ⋈ c for every atom; clock ids are 0-based TA clocks, mapped to x_{id+1}.
  Dbm& intersect_guard(const ClockConstraint& g) {
    if (empty_) return *this;
    for (const auto& a : g.atoms) {
      const std::size_t x = a.clock + 1;
      check_index(x);
      switch (a.relation) {
        case Relation::Less: constrain_raw(x, 0, Bound::lt(a.constant)); break;
        case Relation::LessEq: constrain_raw(x, 0, Bound::le(a.constant)); break;
        case Relation::Greater: constrain_raw(0, x, Bound::lt(-a.constant)); break;
        case Relation::GreaterEq: constrain_raw(0, x, Bound::le(-a.constant)); break;
      }
    }
    return canonicalize();
  }

  // Exact range of x_i (1-based DBM index) over the zone.
  Interval project(std::size_t i) const {
    check_index(i);
    if (i == 0) throw ContractError("cannot project the reference clock");
    if (empty_) throw ContractError("projection of an empty zone");
    const Bound lo = at(0, i);
    return Interval{Bound{-lo.value, lo.strict}, at(i, 0)};
  }

  // Resets the given DBM indices to 0 and lets time elapse arbitrarily.
  Dbm& reset_and_elapse(std::span<const std::size_t> resets) {
    if (empty_) return *this;
    for (std::size_t r : resets) reset(r);
    elapse();
    return canonicalize();
  }

  // k-extrapolation with per-index maxima (k[0] is ignored and taken as 0).
  Dbm& normalize_k(std::span<const std::int64_t> k) {
    if (empty_) return *this;
    if (k.size() != dim_) throw ContractError("normalization constants do not cover all clocks");
    auto kk = [&](std::size_t i) { return i == 0 ? std::int64_t{0} : k[i]; };
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        if (i == j) continue;
        Bound& b = at(i, j);
        if (b.is_infinite()) continue;
        if (b > Bound::le(kk(i))) b = Bound::infinity();
        else if (b < Bound::lt(-kk(j))) b = Bound::lt(-kk(j));
      }
    return canonicalize();
  }

  // Does the valuation (x_1..x_n) lie in the zone?
  bool contains(std::span<const double> valuation) const {
    if (valuation.size() != clocks()) throw ContractError("valuation size mismatch");
    if (empty_) return false;
    auto val = [&](std::size_t i) { return i == 0 ? 0.0 : valuation[i - 1]; };
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        if (i != j && !at(i, j).admits(val(i) - val(j))) return false;
    return true;
  }

  // Set inclusion, assuming both are canonical.
  bool subset_of(const Dbm& o) const {
    if (dim_ != o.dim_) throw InputError("zones over different clock sets");
    if (empty_) return true;
    if (o.empty_) return false;
    for (std::size_t i = 0; i < m_.size(); ++i)
      if (m_[i] > o.m_[i]) return false;
    return true;
  }

  std::size_t hash() const {
    std::size_t h = std::hash<std::size_t>{}(dim_) ^ (empty_ ? 0x9e3779b97f4a7c15ULL : 0);
    for (const auto& b : m_) {
      h ^= std::hash<std::int64_t>{}(b.value) + (b.strict ? 0x51ULL : 0x17ULL) + (h << 6) + (h >> 2);
    }
    return h;
  }

  friend bool operator==(const Dbm& a, const Dbm& b) {
    return a.dim_ == b.dim_ && a.empty_ == b.empty_ && a.m_ == b.m_;
  }

  std::string to_string() const {
    if (empty_) return "{empty}";
    std::string s;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        const Bound& b = at(i, j);
        s += b.is_infinite() ? "inf" : (b.strict ? "<" : "<=") + std::to_string(b.value);
        s += j + 1 < dim_ ? " " : "";
      }
      s += "\n";
    }
    return s;
  }

 private:
  explicit Dbm(std::size_t clocks) : dim_(clocks + 1), m_(dim_ * dim_) {}

  Bound& at(std::size_t i, std::size_t j) { return m_[i * dim_ + j]; }
  const Bound& at(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }

  void check_index(std::size_t i) const {
    if (i >= dim_) throw ContractError("clock index outside the zone's clock set");
  }

  void reset(std::size_t r) {
    check_index(r);
    if (r == 0) return;
    for (std::size_t j = 0; j < dim_; ++j) {
      at(r, j) = at(0, j);
      at(j, r) = at(j, 0);
    }
    at(r, r) = Bound::le(0);
  }

  void elapse() {
    for (std::size_t i = 1; i < dim_; ++i) at(i, 0) = Bound::infinity();
  }

  void mark_empty() {
    empty_ = true;
    std::fill(m_.begin(), m_.end(), Bound::lt(-1));
  }

  std::size_t dim_;
  std::vector<Bound> m_;
  bool empty_ = false;
};

// Free-function spellings of the zone operations.

inline Dbm canonicalize(Dbm z) { return std::move(z.canonicalize()); }
inline Dbm intersect_guard(Dbm z, const ClockConstraint& g) { return std::move(z.intersect_guard(g)); }
inline bool is_empty(const Dbm& z) { return z.is_empty(); }
inline Dbm reset_and_elapse(Dbm z, std::span<const std::size_t> resets) {
  return std::move(z.reset_and_elapse(resets));
}
inline Dbm normalize_k(Dbm z, std::span<const std::int64_t> k) { return std::move(z.normalize_k(k)); }

// The fresh clock y is the last DBM index.
inline Interval project_to_y(const Dbm& z) { return z.project(z.clocks()); }

inline bool dbm_equal(const Dbm& a, const Dbm& b) {
  if (a.dimension() != b.dimension()) throw InputError("zones over different clock sets");
  return a == b;
}

struct DbmHash {
  std::size_t operator()(const Dbm& z) const { return z.hash(); }
};

}  // namespace tfilter
