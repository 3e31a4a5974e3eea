// Taylor/Maclaurin evaluation with explicit Lagrange remainder bounds.
//
// Internal routines work at a working precision `w` and return tight
// enclosures. Public entry points pass results through publish(), which adds
// a margin of 2^-(p+2) (relative for values below 1) and snaps outward to a
// grid; that margin dominates the width of any later, more precise result,
// which is what makes refinement monotone.

#include <algorithm>
#include <map>
#include <mutex>

#include "nwint/enclosure.hpp"
#include "nwint/error.hpp"

namespace nwint {
namespace {

Enclosure grid_out(const Enclosure& e, long bits) {
  return Enclosure(floor_to_grid(e.lo(), bits), ceil_to_grid(e.hi(), bits));
}

Enclosure publish(const Enclosure& e, long p) {
  if (e.is_point()) return e;
  long scale = 0;
  if (e.excludes_zero()) scale = std::min(0L, ilog2(e.mig()));
  Rational margin = Rational::pow2(scale - p - 2);
  long grid = p + 3 - scale;
  return Enclosure(floor_to_grid(e.lo() - margin, grid), ceil_to_grid(e.hi() + margin, grid));
}

Enclosure clip_unit(const Enclosure& e) {
  return Enclosure(max(e.lo(), Rational(-1)), min(e.hi(), Rational(1)));
}

// ---- pi -------------------------------------------------------------------

// Bailey-Borwein-Plouffe series. Every bracket is positive and below
// 4/(8k+1), so the tail after K terms lies in [0, 4*16^-K/(8K+1) * 16/15].
Enclosure pi_bbp(long w) {
  long K = w / 4 + 2;
  Rational sum = 0;
  Rational scale = 1;
  for (long k = 0; k < K; ++k) {
    Rational bracket = Rational(4) / Rational(8 * k + 1) - Rational(2) / Rational(8 * k + 4) -
                       Rational(1) / Rational(8 * k + 5) - Rational(1) / Rational(8 * k + 6);
    sum += scale * bracket;
    scale /= 16;
  }
  Rational tail = Rational(4) * scale / Rational(8 * K + 1) * Rational(16) / Rational(15);
  return Enclosure(round_down(sum, w + 8), round_up(sum + tail, w + 8));
}

std::mutex pi_mutex;
std::map<long, Enclosure>& pi_cache() {
  static std::map<long, Enclosure> cache;
  return cache;
}

// Tight pi enclosure with at least w correct bits.
Enclosure pi_raw(long w) {
  long bucket = ((std::max(w, 64L) + 127) / 128) * 128;
  Enclosure full;
  {
    std::lock_guard<std::mutex> lock(pi_mutex);
    auto& cache = pi_cache();
    auto it = cache.find(bucket);
    if (it == cache.end()) it = cache.emplace(bucket, pi_bbp(bucket)).first;
    full = it->second;
  }
  return full.rounded(w + 4);
}

// ---- exp ------------------------------------------------------------------

// exp(x) for rational x >= 0, relative precision about 2^-w.
Enclosure exp_nonneg(const Rational& x, long w) {
  if (x.is_zero()) return Enclosure(1);
  long s = std::max(0L, ilog2(x) + 2);  // x / 2^s < 1/2
  long wp = w + s + 8;
  Enclosure y = Enclosure(x * Rational::pow2(-s)).rounded(wp);

  auto series = [&](const Rational& arg, bool upper) {
    Rational sum = 1, term = 1;
    const Rational stop = Rational::pow2(-wp - 4);
    for (long n = 1;; ++n) {
      term = upper ? round_up(term * arg / Rational(n), wp + 4) : round_down(term * arg / Rational(n), wp + 4);
      if (term < stop) {
        // Remainder after n-1 terms is below 2 * term for arg <= 1/2.
        if (upper) sum += Rational(2) * term;
        break;
      }
      sum += term;
    }
    return upper ? round_up(sum, wp + 4) : round_down(sum, wp + 4);
  };

  Enclosure e(series(y.lo(), false), series(y.hi(), true));
  for (long i = 0; i < s; ++i) e = (e * e).rounded(wp);
  return e;
}

Enclosure exp_point(const Rational& x, long w) {
  if (x.sign() >= 0) return exp_nonneg(x, w);
  Enclosure e = exp_nonneg(-x, w);
  return (Enclosure(1) / e).rounded(w + 8);
}

long exp_working_bits(const Rational& x, long p) {
  long extra = 0;
  if (x.sign() > 0) extra = static_cast<long>(x.to_double() * 1.4427) + 2;
  return p + 8 + extra;
}

// ---- sin / cos ------------------------------------------------------------

// Maclaurin series of sin (odd = true) or cos at an exact rational y with
// |y| <= 1, absolute error below 2^-w. The alternating remainder is bounded
// by the first omitted term.
Enclosure trig_series(const Rational& y, bool odd, long w) {
  const long g = w + 8;
  Enclosure y2 = grid_out(Enclosure(y * y), g + 4);
  Enclosure term = odd ? grid_out(Enclosure(y), g + 4) : Enclosure(1);
  Enclosure sum = term;
  const Rational stop = Rational::pow2(-g);
  for (long n = 1;; ++n) {
    long a = odd ? 2 * n : 2 * n - 1, b = odd ? 2 * n + 1 : 2 * n;
    term = grid_out(-(term * y2) / Enclosure(Rational(a * b)), g + 4);
    if (term.mag() < stop) {
      Rational r = term.mag();
      sum += Enclosure(-r, r);
      break;
    }
    sum += term;
  }
  return grid_out(sum, g);
}

// sin over an enclosure R inside [-pi/2, pi/2] (monotone there).
Enclosure sin_small(const Enclosure& r, long w) {
  Enclosure a = trig_series(r.lo(), true, w), b = r.is_point() ? a : trig_series(r.hi(), true, w);
  return Enclosure(a.lo(), b.hi());
}

// cos over an enclosure R inside [-pi/2, pi/2].
Enclosure cos_small(const Enclosure& r, long w) {
  Enclosure a = trig_series(r.lo(), false, w);
  if (r.is_point()) return a;
  Enclosure b = trig_series(r.hi(), false, w);
  if (r.lo().sign() <= 0 && r.hi().sign() >= 0) return Enclosure(min(a.lo(), b.lo()), Rational(1));
  if (r.lo().sign() > 0) return Enclosure(b.lo(), a.hi());
  return Enclosure(a.lo(), b.hi());
}

// sin(x + shift * pi/2) for rational x; shift = 0 gives sin, shift = 1 cos.
Enclosure trig_point(const Rational& x, int shift, long w) {
  if (x.is_zero()) return shift == 0 ? Enclosure(0) : Enclosure(1);
  long kbits = std::max(0L, ilog2(x) + 2);
  Enclosure half_pi = pi_raw(w + kbits + 8) / Enclosure(2);
  mpz_class k = floor(x / half_pi.mid() + Rational(1, 2));
  Enclosure r = (Enclosure(x) - Enclosure(Rational(k)) * half_pi).rounded(w + 8);
  mpz_class q = k + shift;
  long quadrant = mpz_fdiv_ui(q.get_mpz_t(), 4);
  switch (quadrant) {
    case 0: return sin_small(r, w);
    case 1: return cos_small(r, w);
    case 2: return -sin_small(r, w);
    default: return -cos_small(r, w);
  }
}

// Range of sin(X + shift*pi/2) over an enclosure X. Extrema sit at
// X = (k + 1/2 - shift/2) pi with value (-1)^k (shift in {0,1}).
Enclosure trig_range(const Enclosure& x, int shift, long p) {
  long xbits = std::max(0L, x.mag().is_zero() ? 0L : ilog2(x.mag()) + 2);
  Enclosure pi = pi_raw(p + xbits + 8);
  if (x.width() >= Rational(2) * pi.hi()) return Enclosure(-1, 1);
  Rational offset = shift == 0 ? Rational(1, 2) : Rational(0);
  mpz_class kmin = ceil((Enclosure(x.lo()) / pi).lo() - offset);
  mpz_class kmax = floor((Enclosure(x.hi()) / pi).hi() - offset);
  long w = p + 6;
  Enclosure ra = publish(trig_point(x.lo(), shift, w), p);
  Enclosure rb = publish(trig_point(x.hi(), shift, w), p);
  Enclosure range = hull(ra, rb);
  for (mpz_class k = kmin; k <= kmax; ++k) {
    bool even = mpz_even_p(k.get_mpz_t()) != 0;
    range = hull(range, Enclosure(even ? 1 : -1));
  }
  return clip_unit(range);
}

// sin(pi * t) for exact t with exact argument reduction, absolute error 2^-w.
Enclosure sinpi_raw(const Rational& t, long w) {
  Rational u = t - Rational(2) * Rational(floor(t / Rational(2)));
  bool negate = false;
  if (u >= Rational(1)) {
    u -= Rational(1);
    negate = true;
  }
  if (u > Rational(1, 2)) u = Rational(1) - u;
  Enclosure v;
  if (u.is_zero()) {
    v = Enclosure(0);
  } else if (u == Rational(1, 2)) {
    v = Enclosure(1);
  } else if (u <= Rational(1, 4)) {
    Enclosure y = (pi_raw(w + 8) * Enclosure(u)).rounded(w + 8);
    v = sin_small(y, w);
  } else {
    Enclosure y = (pi_raw(w + 8) * Enclosure(Rational(1, 2) - u)).rounded(w + 8);
    v = cos_small(y, w);
  }
  return negate ? -v : v;
}

// ---- sqrt -----------------------------------------------------------------

bool perfect_square(const mpz_class& n) { return mpz_perfect_square_p(n.get_mpz_t()) != 0; }

Enclosure sqrt_point(const Rational& x, long w) {
  if (x.sign() < 0) throw Error(ErrorCode::NegativeSqrtDomain, "sqrt of a negative number");
  if (x.is_zero()) return Enclosure(0);
  if (perfect_square(x.num()) && perfect_square(x.den())) {
    mpz_class a, b;
    mpz_sqrt(a.get_mpz_t(), x.num().get_mpz_t());
    mpz_sqrt(b.get_mpz_t(), x.den().get_mpz_t());
    return Enclosure(Rational(a, b));
  }
  // sqrt(n/d) = sqrt(n*d*4^s) / (d*2^s)
  mpz_class nd = x.num() * x.den();
  long bits = static_cast<long>(mpz_sizeinbase(nd.get_mpz_t(), 2));
  long s = std::max(0L, w + 4 - bits / 2);
  mpz_class big = nd;
  mpz_mul_2exp(big.get_mpz_t(), big.get_mpz_t(), static_cast<mp_bitcnt_t>(2 * s));
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), big.get_mpz_t());
  mpz_class den = x.den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
  Enclosure e(Rational(r, den), Rational(mpz_class(r + 1), den));
  return e.rounded(w + 4);
}

long magnitude_bits(const Enclosure& x) {
  return x.mag().is_zero() ? 0 : std::max(0L, ilog2(x.mag()) + 1);
}

}  // namespace

Enclosure pi_enclosure(long precision) { return publish(pi_raw(precision + 6), precision); }

Enclosure exp(const Enclosure& x, long precision) {
  if (x.is_point()) {
    if (x.lo().is_zero()) return Enclosure(1);
    return publish(exp_point(x.lo(), exp_working_bits(x.lo(), precision)), precision);
  }
  Enclosure a = publish(exp_point(x.lo(), exp_working_bits(x.lo(), precision)), precision);
  Enclosure b = publish(exp_point(x.hi(), exp_working_bits(x.hi(), precision)), precision);
  return Enclosure(max(a.lo(), Rational(0)), b.hi());
}

Enclosure sin(const Enclosure& x, long precision) {
  if (x.is_point()) {
    if (x.lo().is_zero()) return Enclosure(0);
    return clip_unit(publish(trig_point(x.lo(), 0, precision + 6 + magnitude_bits(x)), precision));
  }
  return trig_range(x, 0, precision);
}

Enclosure cos(const Enclosure& x, long precision) {
  if (x.is_point()) {
    if (x.lo().is_zero()) return Enclosure(1);
    return clip_unit(publish(trig_point(x.lo(), 1, precision + 6 + magnitude_bits(x)), precision));
  }
  return trig_range(x, 1, precision);
}

Enclosure sqrt(const Enclosure& x, long precision) {
  if (x.lo().sign() < 0) throw Error(ErrorCode::NegativeSqrtDomain, "sqrt of an enclosure reaching below 0");
  Enclosure a = publish(sqrt_point(x.lo(), precision + 6 + magnitude_bits(x) / 2), precision);
  if (x.is_point()) return a;
  Enclosure b = publish(sqrt_point(x.hi(), precision + 6 + magnitude_bits(x) / 2), precision);
  return Enclosure(max(a.lo(), Rational(0)), b.hi());
}

Enclosure sinpi(const Rational& t, long precision) {
  return clip_unit(publish(sinpi_raw(t, precision + 6), precision));
}

Enclosure cospi(const Rational& t, long precision) { return sinpi(t + Rational(1, 2), precision); }

Enclosure sinpi_range(const Rational& lo, const Rational& hi, long precision) {
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "sinpi_range with lo > hi");
  if (hi - lo >= Rational(2)) return Enclosure(-1, 1);
  Enclosure range = hull(sinpi(lo, precision), sinpi(hi, precision));
  // Extrema at t = k + 1/2 with value (-1)^k; located exactly.
  mpz_class kmin = ceil(lo - Rational(1, 2));
  mpz_class kmax = floor(hi - Rational(1, 2));
  for (mpz_class k = kmin; k <= kmax; ++k)
    range = hull(range, Enclosure(mpz_even_p(k.get_mpz_t()) ? 1 : -1));
  return clip_unit(range);
}

Enclosure enc_transcendental(Transcendental fn, const Enclosure& x, long precision) {
  if (precision < 1) throw Error(ErrorCode::InvalidArgument, "precision must be positive");
  switch (fn) {
    case Transcendental::Sin: return sin(x, precision);
    case Transcendental::Cos: return cos(x, precision);
    case Transcendental::Exp: return exp(x, precision);
    case Transcendental::Sqrt: return sqrt(x, precision);
    case Transcendental::Pi: return pi_enclosure(precision);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown transcendental");
}

}  // namespace nwint
