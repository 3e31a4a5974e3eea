#pragma once

// The oscillator Phi(t) = 4t^2 sin(pi/(4t^2)) on (0,1/2], mirrored with a
// sign change on (1/2,1), its derivative phi, and the rescaled copies on
// subintervals I = [a,b].

#include <map>
#include <vector>

#include "nwint/enclosure.hpp"
#include "nwint/interval_set.hpp"

namespace nwint {

/// Base oscillator on [0,1]; 0 outside (0,1).
Enclosure Phi(const Rational& t, long precision);
Enclosure phi(const Rational& t, long precision);
/// Enclosure of the range of Phi over [lo, hi] (any reals, clipped to [0,1]).
Enclosure Phi_range(const Rational& lo, const Rational& hi, long precision);

/// I_k = [2^-(k+1), 2^-k], k >= 1.
Interval dyadic_interval(long k);

struct Oscillator {
  enum Kind { Primitive, Derivative };
  Interval I{0, 1};
  Kind kind = Derivative;

  /// Throws InvalidArgument unless 0 <= a < b <= 1.
  void validate() const;
  Rational to_unit(const Rational& x) const { return (x - I.left) / I.length(); }
};

/// Phi_I(x) or phi_I(x).
Enclosure osc_eval(const Oscillator& o, const Rational& x, long precision);
/// Phi_I over [lo, hi].
Enclosure osc_primitive_range(const Oscillator& o, const Rational& lo, const Rational& hi, long precision);

/// f = sum_k alpha_k phi_{I_k}, F = sum_k alpha_k Phi_{I_k}.
struct OscCombination {
  std::map<long, Rational> alphas;  // k >= 1

  void validate() const;
  bool is_zero() const;
  Enclosure F(const Rational& x, long precision) const;
  Enclosure f(const Rational& x, long precision) const;
  Enclosure F_range(const Rational& lo, const Rational& hi, long precision) const;
};

/// a_k = 1/sqrt(2 + 4k), the k-th alternating extremum of Phi on (0,1/2];
/// Phi(a_k) = (-1)^k 2/(2k+1).
Enclosure extremum_point(long k, long precision);
Rational extremum_value(long k);

/// Integral of phi_I over [c,d] as Phi_I(d) - Phi_I(c). Endpoints may be
/// enclosures; throws InvalidArgument unless 0 <= c <= d <= 1.
Enclosure kurzweil_integral(const Oscillator& o, const Enclosure& c, const Enclosure& d, long precision);
Enclosure kurzweil_integral(const OscCombination& c, const Enclosure& from, const Enclosure& to, long precision);

struct HakeRow {
  Enclosure eps;
  Enclosure value;  // integral over [eps, 1]
};

/// Throws InvalidArgument unless eps is decreasing inside (0,1].
std::vector<HakeRow> hake_table(const Oscillator& o, const std::vector<Enclosure>& eps, long precision);

struct NonLebesgueWitness {
  long K;
  Rational sum;         // sum_{k=1..K} (2/(2k+1) + 2/(2k+3)), scaled by `scale`
  Rational sum_before;  // the same at K - 1
  Rational scale;       // |alpha|, 1 for a bare oscillator
  Interval I;
  Enclosure left, right;  // a_{K+1} and a_1 mapped into I
};

/// Least K whose partial sum reaches M; throws InvalidArgument for M <= 0.
NonLebesgueWitness nonlebesgue_witness(const Oscillator& o, const Rational& M, long precision = 64);

/// Witness on the I_k with largest |alpha_k| (smallest k on ties) for the
/// target M. Throws ZeroCombination.
NonLebesgueWitness restriction_witness(const OscCombination& c, const Rational& M, long precision = 64);

struct NormParams {
  long max_boxes = 2000000;
  long precision = 0;  // 0: derived from tol
};

/// sup |F| over [0,1] with width <= tol, by branch and bound. Throws
/// NonterminationBudget when the box budget is exhausted.
Enclosure alexiewicz_norm(const OscCombination& c, const Rational& tol, const NormParams& params = {});

struct DerivativeCheck {
  Enclosure quotient;  // (Phi_I(x+h) - Phi_I(x)) / h
  Enclosure phi;       // phi_I(x)
  Rational slack;      // (h/2) sup |Phi_I''| on [x, x+h]
  bool consistent;     // quotient overlaps phi widened by slack
};

/// Throws InvalidArgument unless a < x < x + h < b and h > 0.
DerivativeCheck derivative_check(const Oscillator& o, const Rational& x, const Rational& h, long precision);

}  // namespace nwint
