#include "nwint/rational.hpp"

#include <cctype>
#include <ostream>

#include "nwint/error.hpp"

namespace nwint {

Rational::Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) {
  if (den == 0) throw Error(ErrorCode::DivisorContainsZero, "rational with zero denominator");
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error(ErrorCode::DivisorContainsZero, "division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::pow2(long e) {
  mpz_class p = 1;
  if (e >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  return Rational(mpz_class(1), p);
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class parse_integer(std::string_view s) {
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (!all_digits(body))
    throw Error(ErrorCode::InvalidArgument, "not a rational: '" + std::string(s) + "'");
  std::string t(s);
  if (t.front() == '+') t.erase(0, 1);
  return mpz_class(t, 10);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::InvalidArgument, "empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class n = parse_integer(text.substr(0, slash));
    mpz_class d = parse_integer(text.substr(slash + 1));
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
    return Rational(n, d);
  }

  // Decimal with optional exponent.
  std::string_view mant = text;
  long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mant = text.substr(0, e);
    exp10 = parse_integer(text.substr(e + 1)).get_si();
  }
  bool neg = false;
  if (!mant.empty() && (mant.front() == '-' || mant.front() == '+')) {
    neg = mant.front() == '-';
    mant.remove_prefix(1);
  }
  std::string digits;
  if (auto dot = mant.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mant.substr(0, dot), fp = mant.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw Error(ErrorCode::InvalidArgument, "not a rational: '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    exp10 -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(mant)) throw Error(ErrorCode::InvalidArgument, "not a rational: '" + std::string(text) + "'");
    digits = std::string(mant);
  }
  mpz_class n(digits, 10);
  if (neg) n = -n;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  return exp10 >= 0 ? Rational(mpz_class(n * scale)) : Rational(n, scale);
}

std::string Rational::to_string() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational abs(const Rational& q) { return q.sign() < 0 ? -q : q; }

Rational pow(const Rational& q, long n) {
  if (n < 0) return Rational(1) / pow(q, -n);
  mpz_class a, b;
  mpz_pow_ui(a.get_mpz_t(), q.num().get_mpz_t(), static_cast<unsigned long>(n));
  mpz_pow_ui(b.get_mpz_t(), q.den().get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(mpq_class(a, b));
}

mpz_class floor(const Rational& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.num().get_mpz_t(), q.den().get_mpz_t());
  return r;
}

mpz_class ceil(const Rational& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.num().get_mpz_t(), q.den().get_mpz_t());
  return r;
}

const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

long ilog2(const Rational& q) {
  mpz_class n = q.num();
  if (n < 0) n = -n;
  long e = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.den().get_mpz_t(), 2));
  // 2^(e-1) < |q| < 2^(e+1); settle which side of 2^e we are on.
  return abs(q) >= Rational::pow2(e) ? e : e - 1;
}

namespace {

// floor or ceil of q * 2^s, returned divided by 2^s.
Rational scaled_round(const Rational& q, long s, bool up) {
  mpz_class n = q.num(), d = q.den();
  if (s >= 0)
    mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
  else
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<mp_bitcnt_t>(-s));
  mpz_class r;
  if (up)
    mpz_cdiv_q(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  else
    mpz_fdiv_q(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return Rational(r) * Rational::pow2(-s);
}

bool is_dyadic_with(const Rational& q, long s) {
  // q * 2^s is an integer.
  long twos = static_cast<long>(mpz_scan1(q.den().get_mpz_t(), 0));
  bool power_of_two = mpz_popcount(q.den().get_mpz_t()) == 1;
  return power_of_two && twos <= s;
}

}  // namespace

Rational round_down(const Rational& q, long bits) {
  if (q.is_zero()) return q;
  long s = bits - ilog2(q);
  if (is_dyadic_with(q, s)) return q;
  return scaled_round(q, s, false);
}

Rational round_up(const Rational& q, long bits) {
  if (q.is_zero()) return q;
  long s = bits - ilog2(q);
  if (is_dyadic_with(q, s)) return q;
  return scaled_round(q, s, true);
}

Rational floor_to_grid(const Rational& q, long bits) {
  if (is_dyadic_with(q, bits)) return q;
  return scaled_round(q, bits, false);
}

Rational ceil_to_grid(const Rational& q, long bits) {
  if (is_dyadic_with(q, bits)) return q;
  return scaled_round(q, bits, true);
}

std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.to_string(); }

}  // namespace nwint
