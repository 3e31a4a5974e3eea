#pragma once

// Closed rational intervals guaranteed to contain a real value, with sound
// arithmetic and enclosures of sin, cos, exp, sqrt and pi.

#include <iosfwd>

#include "nwint/rational.hpp"

namespace nwint {

class Enclosure {
 public:
  Enclosure() = default;
  Enclosure(const Rational& point) : lo_(point), hi_(point) {}
  Enclosure(int point) : lo_(point), hi_(point) {}
  /// Throws InvalidArgument when lo > hi.
  Enclosure(Rational lo, Rational hi);

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational width() const { return hi_ - lo_; }
  Rational mid() const { return (lo_ + hi_) / 2; }
  bool is_point() const { return lo_ == hi_; }

  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Enclosure& e) const { return lo_ <= e.lo_ && e.hi_ <= hi_; }
  bool overlaps(const Enclosure& e) const { return lo_ <= e.hi_ && e.lo_ <= hi_; }
  bool excludes_zero() const { return lo_.sign() > 0 || hi_.sign() < 0; }
  /// Largest |x| over the enclosure.
  Rational mag() const { return max(abs(lo_), abs(hi_)); }
  /// Smallest |x| over the enclosure.
  Rational mig() const;

  /// Outward rounding of both ends to `bits` significant bits.
  Enclosure rounded(long bits) const;

  Enclosure operator-() const { return Enclosure(-hi_, -lo_); }
  Enclosure& operator+=(const Enclosure& o);
  Enclosure& operator-=(const Enclosure& o);
  Enclosure& operator*=(const Enclosure& o);
  /// Throws DivisorContainsZero when o contains 0.
  Enclosure& operator/=(const Enclosure& o);

  friend Enclosure operator+(Enclosure a, const Enclosure& b) { return a += b; }
  friend Enclosure operator-(Enclosure a, const Enclosure& b) { return a -= b; }
  friend Enclosure operator*(Enclosure a, const Enclosure& b) { return a *= b; }
  friend Enclosure operator/(Enclosure a, const Enclosure& b) { return a /= b; }
  friend bool operator==(const Enclosure& a, const Enclosure& b) = default;

 private:
  Rational lo_, hi_;
};

Enclosure hull(const Enclosure& a, const Enclosure& b);
Enclosure abs(const Enclosure& e);
/// Exact integer power with sign-aware handling of even exponents.
Enclosure pow(const Enclosure& e, long n);

std::ostream& operator<<(std::ostream& os, const Enclosure& e);

enum class ArithOp { Add, Sub, Mul, Div };
Enclosure enc_arith(ArithOp op, const Enclosure& a, const Enclosure& b);

// Transcendentals. `precision` is p: for a point rational input the result
// has width <= 2^-p, and raising p never widens the result. Inputs that are
// not points are mapped to a sound enclosure of the range.
Enclosure pi_enclosure(long precision);
Enclosure exp(const Enclosure& x, long precision);
Enclosure sin(const Enclosure& x, long precision);
Enclosure cos(const Enclosure& x, long precision);
/// Throws NegativeSqrtDomain when x.lo() < 0.
Enclosure sqrt(const Enclosure& x, long precision);
/// sin(pi * t) and cos(pi * t) for exact rational t; exact at multiples of 1/2.
Enclosure sinpi(const Rational& t, long precision);
Enclosure cospi(const Rational& t, long precision);
/// Range of sin(pi * t) over t in [lo, hi].
Enclosure sinpi_range(const Rational& lo, const Rational& hi, long precision);

enum class Transcendental { Sin, Cos, Exp, Sqrt, Pi };
/// Dispatcher; `x` is ignored for Pi.
Enclosure enc_transcendental(Transcendental fn, const Enclosure& x, long precision);

}  // namespace nwint
