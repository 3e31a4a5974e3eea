#include "nwint/enclosure.hpp"

#include <ostream>

#include "nwint/error.hpp"

namespace nwint {

Enclosure::Enclosure(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (hi_ < lo_) throw Error(ErrorCode::InvalidArgument, "enclosure with lo > hi");
}

Rational Enclosure::mig() const {
  if (lo_.sign() > 0) return lo_;
  if (hi_.sign() < 0) return -hi_;
  return Rational(0);
}

Enclosure Enclosure::rounded(long bits) const {
  return Enclosure(round_down(lo_, bits), round_up(hi_, bits));
}

Enclosure& Enclosure::operator+=(const Enclosure& o) {
  lo_ += o.lo_;
  hi_ += o.hi_;
  return *this;
}

Enclosure& Enclosure::operator-=(const Enclosure& o) {
  Rational nlo = lo_ - o.hi_;
  hi_ -= o.lo_;
  lo_ = std::move(nlo);
  return *this;
}

Enclosure& Enclosure::operator*=(const Enclosure& o) {
  if (is_point() && o.is_point()) {
    lo_ *= o.lo_;
    hi_ = lo_;
    return *this;
  }
  // Sign-case analysis keeps the common all-positive case to two products.
  if (lo_.sign() >= 0 && o.lo_.sign() >= 0) {
    lo_ *= o.lo_;
    hi_ *= o.hi_;
    return *this;
  }
  Rational a = lo_ * o.lo_, b = lo_ * o.hi_, c = hi_ * o.lo_, d = hi_ * o.hi_;
  lo_ = min(min(a, b), min(c, d));
  hi_ = max(max(a, b), max(c, d));
  return *this;
}

Enclosure& Enclosure::operator/=(const Enclosure& o) {
  if (!o.excludes_zero()) throw Error(ErrorCode::DivisorContainsZero, "divisor enclosure contains zero");
  Enclosure inv(Rational(1) / o.hi_, Rational(1) / o.lo_);
  return *this *= inv;
}

Enclosure hull(const Enclosure& a, const Enclosure& b) {
  return Enclosure(min(a.lo(), b.lo()), max(a.hi(), b.hi()));
}

Enclosure abs(const Enclosure& e) {
  if (e.lo().sign() >= 0) return e;
  if (e.hi().sign() <= 0) return -e;
  return Enclosure(Rational(0), e.mag());
}

Enclosure pow(const Enclosure& e, long n) {
  if (n < 0) return Enclosure(1) / pow(e, -n);
  if (n == 0) return Enclosure(1);
  if (n % 2 == 0) {
    Enclosure a = abs(e);
    return Enclosure(pow(a.lo(), n), pow(a.hi(), n));
  }
  return Enclosure(pow(e.lo(), n), pow(e.hi(), n));
}

std::ostream& operator<<(std::ostream& os, const Enclosure& e) {
  return os << '[' << e.lo() << ", " << e.hi() << ']';
}

Enclosure enc_arith(ArithOp op, const Enclosure& a, const Enclosure& b) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown arithmetic op");
}

}  // namespace nwint
