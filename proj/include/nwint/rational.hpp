#pragma once

// Exact rationals over GMP. Always canonical; nothing rounds implicitly.
// The directed rounding helpers at the bottom keep operand sizes bounded.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace nwint {

class Rational {
 public:
  Rational() = default;
  Rational(int v) : v_(v) {}
  Rational(long v) : v_(v) {}
  Rational(long long v) : v_(static_cast<long>(v)) {}
  Rational(unsigned long v) : v_(v) {}
  explicit Rational(const mpz_class& n) : v_(n) {}
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Accepts "p", "p/q", decimals "-1.25" and scientific "1e-3".
  static Rational parse(std::string_view text);
  /// 2^e for any integer e.
  static Rational pow2(long e);

  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  double to_double() const { return v_.get_d(); }
  /// Always "p/q", including "n/1" for integers.
  std::string to_string() const;

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class v_;
};

Rational abs(const Rational& q);
Rational pow(const Rational& q, long n);
mpz_class floor(const Rational& q);
mpz_class ceil(const Rational& q);
const Rational& min(const Rational& a, const Rational& b);
const Rational& max(const Rational& a, const Rational& b);

/// floor(log2 |q|) for q != 0.
long ilog2(const Rational& q);

/// Largest dyadic with `bits` significant bits that is <= q (resp. >= q).
Rational round_down(const Rational& q, long bits);
Rational round_up(const Rational& q, long bits);
/// Directed rounding onto the absolute grid 2^-bits.
Rational floor_to_grid(const Rational& q, long bits);
Rational ceil_to_grid(const Rational& q, long bits);

std::ostream& operator<<(std::ostream& os, const Rational& q);

}  // namespace nwint
