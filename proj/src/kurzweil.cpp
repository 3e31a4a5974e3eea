#include "nwint/kurzweil.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "nwint/error.hpp"

namespace nwint {

namespace {

const Rational kHalf(1, 2);

// Distance to the nearer end of (0,1) and the branch sign.
struct Branch {
  Rational s;  // t on the left half, 1 - t on the right half
  int sign;
};

Branch branch(const Rational& t) { return t <= kHalf ? Branch{t, 1} : Branch{Rational(1) - t, -1}; }

// 4s^2 sin(pi/(4s^2)) over s in [lo, hi] within [0, 1/2].
Enclosure half_range(const Rational& lo, const Rational& hi, long precision) {
  Rational amp_hi = Rational(4) * hi * hi;
  if (lo.sign() <= 0) return Enclosure(-amp_hi, amp_hi);
  Rational amp_lo = Rational(4) * lo * lo;
  Enclosure s = sinpi_range(Rational(1) / amp_hi, Rational(1) / amp_lo, precision);
  return Enclosure(amp_lo, amp_hi) * s;
}

}  // namespace

Enclosure Phi(const Rational& t, long precision) {
  if (t.sign() <= 0 || t >= Rational(1)) return Enclosure(0);
  Branch b = branch(t);
  Rational amp = Rational(4) * b.s * b.s;
  Enclosure v = Enclosure(amp) * sinpi(Rational(1) / amp, precision + 4);
  return (b.sign > 0 ? v : -v).rounded(precision + 4);
}

Enclosure phi(const Rational& t, long precision) {
  if (t.sign() <= 0 || t >= Rational(1)) return Enclosure(0);
  // Both halves give 8s sin(u) - (2 pi / s) cos(u) with u = pi/(4s^2).
  Rational s = branch(t).s;
  Rational rho = Rational(1) / (Rational(4) * s * s);
  long w = precision + 8 + std::max(0L, ilog2(Rational(1) / s) + 4);
  Enclosure v = Enclosure(Rational(8) * s) * sinpi(rho, w) -
                Enclosure(Rational(2) / s) * pi_enclosure(w) * cospi(rho, w);
  return v.rounded(precision + 4);
}

Enclosure Phi_range(const Rational& lo, const Rational& hi, long precision) {
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "range with lo > hi");
  Rational l = max(lo, Rational(0)), h = min(hi, Rational(1));
  if (h <= l) return Phi(l, precision);
  std::optional<Enclosure> out;
  auto add = [&](const Enclosure& e) { out = out ? hull(*out, e) : e; };
  if (lo.sign() < 0 || hi > Rational(1)) add(Enclosure(0));
  if (l < kHalf) add(half_range(l, min(h, kHalf), precision));
  if (h > kHalf) add(-half_range(Rational(1) - h, Rational(1) - max(l, kHalf), precision));
  return *out;
}

Interval dyadic_interval(long k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "dyadic intervals are indexed from 1");
  return {Rational::pow2(-(k + 1)), Rational::pow2(-k)};
}

void Oscillator::validate() const {
  if (I.left.sign() < 0 || !(I.left < I.right) || I.right > Rational(1))
    throw Error(ErrorCode::InvalidArgument, "oscillator interval must satisfy 0 <= a < b <= 1");
}

Enclosure osc_eval(const Oscillator& o, const Rational& x, long precision) {
  o.validate();
  if (x < o.I.left || x > o.I.right) return Enclosure(0);
  Rational t = o.to_unit(x);
  if (o.kind == Oscillator::Primitive) return Phi(t, precision);
  return (phi(t, precision + 4) / Enclosure(o.I.length())).rounded(precision + 4);
}

Enclosure osc_primitive_range(const Oscillator& o, const Rational& lo, const Rational& hi, long precision) {
  o.validate();
  return Phi_range(o.to_unit(lo), o.to_unit(hi), precision);
}

void OscCombination::validate() const {
  for (const auto& [k, a] : alphas)
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "combination indices start at 1");
}

bool OscCombination::is_zero() const {
  return std::all_of(alphas.begin(), alphas.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

Enclosure OscCombination::F(const Rational& x, long precision) const {
  Enclosure sum(0);
  for (const auto& [k, a] : alphas)
    if (!a.is_zero()) sum += Enclosure(a) * osc_eval({dyadic_interval(k), Oscillator::Primitive}, x, precision);
  return sum;
}

Enclosure OscCombination::f(const Rational& x, long precision) const {
  Enclosure sum(0);
  for (const auto& [k, a] : alphas)
    if (!a.is_zero()) sum += Enclosure(a) * osc_eval({dyadic_interval(k), Oscillator::Derivative}, x, precision);
  return sum;
}

Enclosure OscCombination::F_range(const Rational& lo, const Rational& hi, long precision) const {
  // The supports have disjoint interiors, so F agrees with a single term on
  // each support and vanishes off them.
  std::optional<Enclosure> out;
  auto add = [&](const Enclosure& e) { out = out ? hull(*out, e) : e; };
  Rational covered = 0;
  for (const auto& [k, a] : alphas) {
    if (a.is_zero()) continue;
    Interval I = dyadic_interval(k);
    Rational l = max(lo, I.left), h = min(hi, I.right);
    if (h < l) continue;
    covered += h - l;
    add(Enclosure(a) * osc_primitive_range({I, Oscillator::Primitive}, l, h, precision));
  }
  if (!out || covered < hi - lo) add(Enclosure(0));
  return *out;
}

Enclosure extremum_point(long k, long precision) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "extremum index starts at 1");
  return (Enclosure(1) / sqrt(Enclosure(Rational(2 + 4 * k)), precision + 4)).rounded(precision + 2);
}

Rational extremum_value(long k) {
  Rational v(mpz_class(2), mpz_class(2 * k + 1));
  return k % 2 == 0 ? v : -v;
}

namespace {

Enclosure primitive_at(const Oscillator& o, const Enclosure& x, long precision) {
  if (x.is_point()) return osc_eval({o.I, Oscillator::Primitive}, x.lo(), precision);
  return osc_primitive_range(o, x.lo(), x.hi(), precision);
}

void check_bounds(const Enclosure& c, const Enclosure& d) {
  if (c.lo().sign() < 0 || d.hi() > Rational(1) || c.lo() > d.hi())
    throw Error(ErrorCode::InvalidArgument, "integration bounds must satisfy 0 <= c <= d <= 1");
}

}  // namespace

Enclosure kurzweil_integral(const Oscillator& o, const Enclosure& c, const Enclosure& d, long precision) {
  o.validate();
  check_bounds(c, d);
  return primitive_at(o, d, precision) - primitive_at(o, c, precision);
}

Enclosure kurzweil_integral(const OscCombination& comb, const Enclosure& from, const Enclosure& to, long precision) {
  comb.validate();
  check_bounds(from, to);
  Enclosure sum(0);
  for (const auto& [k, a] : comb.alphas)
    if (!a.is_zero())
      sum += Enclosure(a) * kurzweil_integral(Oscillator{dyadic_interval(k), Oscillator::Derivative}, from, to,
                                              precision);
  return sum;
}

std::vector<HakeRow> hake_table(const Oscillator& o, const std::vector<Enclosure>& eps, long precision) {
  std::vector<HakeRow> rows;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i].lo().sign() <= 0 || eps[i].hi() > Rational(1))
      throw Error(ErrorCode::InvalidArgument, "Hake table points must lie in (0,1]");
    if (i > 0 && !(eps[i].hi() < eps[i - 1].lo()))
      throw Error(ErrorCode::InvalidArgument, "Hake table points must decrease");
    rows.push_back({eps[i], kurzweil_integral(o, eps[i], Enclosure(1), precision)});
  }
  return rows;
}

NonLebesgueWitness nonlebesgue_witness(const Oscillator& o, const Rational& M, long precision) {
  o.validate();
  if (M.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "bound M must be positive");
  // |Phi(a_k) - Phi(a_{k+1})| = 2/(2k+1) + 2/(2k+3): consecutive extrema alternate in sign.
  Rational sum = 0, before = 0;
  long K = 0;
  while (sum < M) {
    ++K;
    before = sum;
    sum += Rational(mpz_class(2), mpz_class(2 * K + 1)) + Rational(mpz_class(2), mpz_class(2 * K + 3));
  }
  Enclosure a(o.I.left), w(o.I.length());
  return {K, sum, before, Rational(1), o.I, a + w * extremum_point(K + 1, precision),
          a + w * extremum_point(1, precision)};
}

NonLebesgueWitness restriction_witness(const OscCombination& c, const Rational& M, long precision) {
  c.validate();
  if (c.is_zero()) throw Error(ErrorCode::ZeroCombination, "combination has no nonzero coefficient");
  long best = 0;
  Rational mag = 0;
  for (const auto& [k, a] : c.alphas)
    if (abs(a) > mag) {
      mag = abs(a);
      best = k;
    }
  NonLebesgueWitness w =
      nonlebesgue_witness(Oscillator{dyadic_interval(best), Oscillator::Derivative}, M / mag, precision);
  w.sum *= mag;
  w.sum_before *= mag;
  w.scale = mag;
  return w;
}

// ---- Alexiewicz norm ----------------------------------------------------------

Enclosure alexiewicz_norm(const OscCombination& c, const Rational& tol, const NormParams& params) {
  c.validate();
  if (tol.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (c.is_zero()) return Enclosure(0);
  long precision = params.precision > 0 ? params.precision : std::max(32L, ilog2(Rational(1) / tol) + 24);

  struct Box {
    Rational lo, hi, upper;
  };
  auto wider = [](const Box& a, const Box& b) { return a.hi - a.lo < b.hi - b.lo; };
  std::priority_queue<Box, std::vector<Box>, decltype(wider)> queue(wider);
  std::multiset<Rational> uppers;
  Rational lower = 0;

  auto push = [&](const Rational& lo, const Rational& hi) {
    Rational mid = (lo + hi) / Rational(2);
    lower = max(lower, c.F(mid, precision).mig());
    Rational up = c.F_range(lo, hi, precision).mag();
    if (up < lower) return;
    queue.push({lo, hi, up});
    uppers.insert(up);
  };

  // Start from the supports so that no box straddles two of them.
  for (const auto& [k, a] : c.alphas)
    if (!a.is_zero()) {
      Interval I = dyadic_interval(k);
      push(I.left, I.right);
    }

  long processed = 0;
  while (!queue.empty()) {
    Rational top = *uppers.rbegin();
    if (top - lower <= tol) return Enclosure(lower, max(lower, top));
    if (++processed > params.max_boxes)
      throw Error(ErrorCode::NonterminationBudget, "branch and bound exceeded its box budget");
    Box b = queue.top();
    queue.pop();
    uppers.erase(uppers.find(b.upper));
    if (b.upper < lower) continue;
    Rational mid = (b.lo + b.hi) / Rational(2);
    push(b.lo, mid);
    push(mid, b.hi);
  }
  return Enclosure(lower);
}

// ---- finite differences -------------------------------------------------------

DerivativeCheck derivative_check(const Oscillator& o, const Rational& x, const Rational& h, long precision) {
  o.validate();
  if (h.sign() <= 0 || !(o.I.left < x) || !(x + h < o.I.right))
    throw Error(ErrorCode::InvalidArgument, "derivative check needs a < x < x + h < b");
  Oscillator prim{o.I, Oscillator::Primitive}, der{o.I, Oscillator::Derivative};
  Enclosure q = (osc_eval(prim, x + h, precision) - osc_eval(prim, x, precision)) / Enclosure(h);
  Enclosure d = osc_eval(der, x, precision);
  // |Phi''(t)| <= 8 + 2 pi / s^2 + pi^2 / s^4 with s the distance to {0, 1}.
  Rational t0 = o.to_unit(x), t1 = o.to_unit(x + h);
  Rational s = min(t0, Rational(1) - t1);
  Rational pi_hi = pi_enclosure(32).hi();
  Rational s2 = s * s;
  Rational bound = Rational(8) + Rational(2) * pi_hi / s2 + pi_hi * pi_hi / (s2 * s2);
  Rational slack = h / Rational(2) * bound / (o.I.length() * o.I.length());
  Enclosure widened(d.lo() - slack, d.hi() + slack);
  return {q, d, slack, q.overlaps(widened)};
}

}  // namespace nwint
