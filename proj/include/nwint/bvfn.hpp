#pragma once

// The jump series f = sum_i 2^-i chi_(q_i,1], its shifts f_v, and
// polynomials sum_j G_j f^j with exponential-polynomial coefficients.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nwint/enclosure.hpp"

namespace nwint {

/// Bijection between positive integers and the rationals in (0,1).
class RationalEnum {
 public:
  /// Denominator: 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ... (default).
  /// CalkinWilf: the Calkin-Wilf sequence filtered to (0,1), q(i) = cw(2i).
  enum class Order { Denominator, CalkinWilf };

  RationalEnum() : order_(Order::Denominator) {}
  explicit RationalEnum(Order order) : order_(order) {}
  Order order() const { return order_; }

  /// Throws OutOfRange for i < 1 or i too large to handle.
  Rational q(long i) const;
  /// Throws OutOfRange for q outside (0,1) or an index beyond long range.
  long index(const Rational& q) const;
  /// Calls visit(i, q_i) for every q_i in [a, b] with i <= max_index, in
  /// increasing i, until visit returns true. Returns whether it stopped.
  bool for_each_in(const Rational& a, const Rational& b, long max_index,
                   const std::function<bool(long, const Rational&)>& visit) const;

 private:
  Order order_;
};

/// v_k = frac(k sqrt 2) as an enclosure of width <= 2^-precision; v_0 = 0.
Enclosure shift_point(long k, long precision);

/// f (k = 0) or f_v with v = v_k.
struct JumpSeries {
  RationalEnum order;
  long shift = 0;
};

/// sum_{i<=N, q_i<x} 2^-i plus the tail [0, 2^-N]; for shifts, evaluated at
/// x - v (mod 1) through monotonicity of f.
Enclosure eval_f(const JumpSeries& s, const Rational& x, long terms, long precision = 128);
Enclosure eval_f(const JumpSeries& s, const Enclosure& x, long terms, long precision = 128);

/// Finite sum of c exp(rate . e x), where the rate basis is (1, sqrt 2,
/// sqrt 3, sqrt 5, ...): index 0 is the rate 1, index l >= 1 is the square
/// root of the l-th prime. These rates are linearly independent over Q, so
/// an ExpPoly is zero iff all merged coefficients vanish.
class ExpPoly {
 public:
  using Exponent = std::vector<long>;

  ExpPoly() = default;
  static ExpPoly constant(const Rational& c);
  /// c e^{(e . rates) x}
  static ExpPoly term(const Rational& c, Exponent e);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Exponent, Rational>& terms() const { return terms_; }

  ExpPoly& operator+=(const ExpPoly& o);
  ExpPoly& operator-=(const ExpPoly& o);
  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
  friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a -= b; }
  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b);
  friend bool operator==(const ExpPoly&, const ExpPoly&) = default;

  Enclosure evaluate(const Rational& x, long precision) const;
  /// Upper bound for sup_{[0,1]} |G|.
  Rational sup_bound() const;

 private:
  std::map<Exponent, Rational> terms_;  // trailing zeros trimmed, no zero coefficients
  void add(Exponent e, const Rational& c);
};

/// Square root of the l-th prime (l >= 1), or 1 for l = 0, as an enclosure.
Enclosure basis_rate(long l, long precision);

/// g = sum_{j=1..k} G_j f^j.
class JumpPolynomial {
 public:
  /// Trailing zero coefficients are dropped; throws ZeroPolynomial when all
  /// are zero.
  JumpPolynomial(std::vector<ExpPoly> G, JumpSeries series = {});

  long degree() const { return static_cast<long>(G_.size()); }
  const std::vector<ExpPoly>& coefficients() const { return G_; }
  const JumpSeries& series() const { return series_; }
  /// M >= sup |G_j| over [0,1] and j.
  const Rational& bound_M() const { return M_; }
  /// N = M max_m sum_{j=m..k} C(j,m): bound for |P_m| with |y| <= 1.
  const Rational& bound_N() const { return N_; }

 private:
  std::vector<ExpPoly> G_;
  JumpSeries series_;
  Rational M_, N_;
};

struct OneSided {
  Enclosure left, right;
};

OneSided one_sided_limits(const JumpPolynomial& g, const Rational& q, long terms, long precision);

struct JumpResult {
  long index;
  Rational q;
  Enclosure y;     // f(q_i)
  Enclosure p1;    // P_1 = sum_j j G_j(q) y^(j-1)
  Enclosure jump;  // sum_m 2^(-i m) P_m
  bool certified;  // jump excludes 0
};

/// Jump of g at q via the binomial P_m form; tries 64 bits before `precision`.
JumpResult jump_enclosure(const JumpPolynomial& g, const Rational& q, long terms, long precision);

struct JumpSearchParams {
  Rational epsilon = Rational(1, 1000);
  long max_index = 100000;
  long terms = 64;
  long precision = 128;
};

struct JumpFound {
  JumpResult jump;
  bool epsilon_route;     // |P_1| >= eps certified and eps - N/(2^i - 1) > 0
  Rational epsilon_margin;  // eps - N/(2^i - 1)
  long candidates_tried;
};

struct JumpInconclusive {
  long candidates_tried;
  std::string reason;
};

std::variant<JumpFound, JumpInconclusive> jump_search(const JumpPolynomial& g, const Rational& a,
                                                      const Rational& b, const JumpSearchParams& params = {});

/// beta f_{v_k}
struct ShiftTerm {
  Rational beta;
  long k;
};

struct ProbeJump {
  std::string where;  // "v_k" or "q_i"
  long k_or_i;
  Enclosure point;
  Enclosure jump;
};

struct VariationBounds {
  Rational lower;                // certified V(h) >= lower
  std::optional<Rational> upper;  // certified ||h||_BV <= upper (V <= upper), when available
  std::string upper_kind;         // "monotone", "3*sum|beta|" or "none"
  std::vector<ProbeJump> probes;
};

/// Shift combination: probes are the shift points (jump -beta_i at v_{k_i},
/// every other term continuous there since (k_i - k_j) sqrt 2 is irrational)
/// and, for a k = 0 term, q_1..q_terms. Throws InvalidArgument on repeated k.
VariationBounds variation_bounds(const std::vector<ShiftTerm>& h, long terms = 64);
/// JumpPolynomial: sum of certified |jump| lower ends at the probes; no upper bound.
VariationBounds variation_bounds(const JumpPolynomial& g, const std::vector<Rational>& probes, long terms,
                                 long precision);

/// Polynomial in generators F_l = e^{r_{alpha_l} x} f.
struct GeneratorPolynomial {
  struct Monomial {
    Rational lambda;
    std::vector<long> gamma;
  };
  std::vector<Monomial> monomials;
  std::vector<long> alphas;  // basis index of each generator (default 1, 2, ...)
};

/// Groups by total degree: G_j = sum_{|gamma|=j} lambda_gamma e^{(sum gamma_l r_{alpha_l}) x}.
/// Throws ConstantTermPresent or ZeroPolynomial.
JumpPolynomial expand_generator_polynomial(const GeneratorPolynomial& p, JumpSeries series = {});

struct Densified {
  JumpPolynomial jump_part;  // G f
  ExpPoly continuous_part;   // G
};

/// (f + 1) G. Throws ZeroInput for G = 0.
Densified densify(const ExpPoly& G, JumpSeries series = {});

}  // namespace nwint
