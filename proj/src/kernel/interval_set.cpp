#include "nwint/interval_set.hpp"

#include <algorithm>
#include <ostream>

#include "nwint/error.hpp"

namespace nwint {

IntervalSet::IntervalSet(std::vector<Interval> parts, bool keep_split) : keep_split_(keep_split) {
  for (const auto& p : parts)
    if (p.right < p.left) throw Error(ErrorCode::InvalidArgument, "interval with right < left");
  std::erase_if(parts, [](const Interval& p) { return p.left == p.right; });
  std::sort(parts.begin(), parts.end(), [](const Interval& x, const Interval& y) { return x.left < y.left; });
  for (auto& p : parts) {
    if (!parts_.empty()) {
      Interval& last = parts_.back();
      bool overlap = p.left < last.right || (p.left == last.right && !keep_split);
      if (overlap) {
        last.right = max(last.right, p.right);
        continue;
      }
    }
    parts_.push_back(std::move(p));
  }
}

IntervalSet IntervalSet::from_sorted(std::vector<Interval> parts, bool keep_split) {
  IntervalSet s;
  s.parts_ = std::move(parts);
  s.keep_split_ = keep_split;
  return s;
}

Rational IntervalSet::measure() const {
  Rational m = 0;
  for (const auto& p : parts_) m += p.length();
  return m;
}

bool IntervalSet::contains_interval(const Rational& lo, const Rational& hi) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), lo,
                             [](const Rational& x, const Interval& p) { return x < p.left; });
  if (it == parts_.begin()) return false;
  --it;
  if (lo < it->left) return false;
  Rational reach = it->right;
  for (++it; reach < hi && it != parts_.end() && it->left == reach; ++it) reach = it->right;
  return hi <= reach;
}

Location IntervalSet::locate(const Rational& x) const {
  if (parts_.empty() || x < parts_.front().left || parts_.back().right < x) return {Location::Outside};
  auto it = std::lower_bound(parts_.begin(), parts_.end(), x,
                             [](const Interval& p, const Rational& v) { return p.right < v; });
  if (it != parts_.end() && it->left <= x) return {Location::Inside, static_cast<std::size_t>(it - parts_.begin())};
  return {Location::InGap};
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> out;
  const auto& x = a.intervals();
  const auto& y = b.intervals();
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const Rational& lo = max(x[i].left, y[j].left);
    const Rational& hi = min(x[i].right, y[j].right);
    if (lo < hi) out.push_back({lo, hi});
    if (x[i].right < y[j].right) ++i; else ++j;
  }
  return IntervalSet::from_sorted(std::move(out), a.keeps_split() || b.keeps_split());
}

IntervalSet subtract(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> out;
  const auto& y = b.intervals();
  std::size_t j = 0;
  for (const auto& p : a.intervals()) {
    Rational cur = p.left;
    while (j < y.size() && y[j].right <= cur) ++j;
    std::size_t k = j;
    while (k < y.size() && y[k].left < p.right) {
      if (cur < y[k].left) out.push_back({cur, y[k].left});
      cur = max(cur, y[k].right);
      if (p.right <= cur) break;
      ++k;
    }
    if (cur < p.right) out.push_back({cur, p.right});
  }
  return IntervalSet::from_sorted(std::move(out), a.keeps_split());
}

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> all = a.intervals();
  all.insert(all.end(), b.intervals().begin(), b.intervals().end());
  return IntervalSet(std::move(all), a.keeps_split() && b.keeps_split());
}

IntervalSet affine_map(const IntervalSet& s, const Rational& a, const Rational& b) {
  if (b <= a) throw Error(ErrorCode::DegenerateTarget, "affine target with b <= a");
  Rational scale = b - a;
  std::vector<Interval> out;
  out.reserve(s.size());
  for (const auto& p : s.intervals()) out.push_back({scale * p.left + a, scale * p.right + a});
  return IntervalSet::from_sorted(std::move(out), s.keeps_split());
}

std::ostream& operator<<(std::ostream& os, const IntervalSet& s) {
  os << '{';
  bool first = true;
  for (const auto& p : s.intervals()) {
    os << (first ? "" : ", ") << '[' << p.left << ", " << p.right << ']';
    first = false;
  }
  return os << '}';
}

}  // namespace nwint
