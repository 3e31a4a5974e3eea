#pragma once

// Finite unions of closed rational intervals whose interiors are disjoint.

#include <iosfwd>
#include <optional>
#include <vector>

#include "nwint/rational.hpp"

namespace nwint {

struct Interval {
  Rational left, right;
  Rational length() const { return right - left; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Location {
  enum Kind { Inside, InGap, Outside } kind;
  std::size_t index = 0;  // valid for Inside
};

class IntervalSet {
 public:
  IntervalSet() = default;
  /// Sorts and merges overlapping input. Touching intervals are merged
  /// unless keep_split is set; zero-length input is dropped.
  explicit IntervalSet(std::vector<Interval> parts, bool keep_split = false);
  /// Trusted constructor for already sorted, interior-disjoint parts.
  static IntervalSet from_sorted(std::vector<Interval> parts, bool keep_split = true);

  const std::vector<Interval>& intervals() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  bool keeps_split() const { return keep_split_; }

  Rational measure() const;
  /// True when [lo, hi] lies inside a single interval of the set (after
  /// merging touching neighbours).
  bool contains_interval(const Rational& lo, const Rational& hi) const;
  /// First interval containing x (closed), else gap or outside the hull.
  Location locate(const Rational& x) const;

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.parts_ == b.parts_; }

 private:
  std::vector<Interval> parts_;
  bool keep_split_ = false;
};

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
/// Closure of a minus b.
IntervalSet subtract(const IntervalSet& a, const IntervalSet& b);
IntervalSet unite(const IntervalSet& a, const IntervalSet& b);
/// Image under x -> (b - a) x + a. Throws DegenerateTarget when b <= a.
IntervalSet affine_map(const IntervalSet& s, const Rational& a, const Rational& b);

std::ostream& operator<<(std::ostream& os, const IntervalSet& s);

}  // namespace nwint
