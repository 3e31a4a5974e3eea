#include "nwint/bvfn.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

#include "nwint/error.hpp"

namespace nwint {

// ---- enumeration ------------------------------------------------------------

namespace {

// prefix[d] = number of reduced fractions in (0,1) with denominator <= d.
class FareyTable {
 public:
  std::shared_ptr<const std::vector<long>> upto(long D) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!table_ || static_cast<long>(table_->size()) <= D) grow(std::max({D + 1, 1024L, table_ ? 2 * static_cast<long>(table_->size()) : 0L}));
    return table_;
  }
  // Table reaching at least `count` fractions.
  std::shared_ptr<const std::vector<long>> reaching(long count) {
    long D = 1024;
    for (;;) {
      auto t = upto(D);
      if (t->back() >= count) return t;
      D = static_cast<long>(t->size()) * 2;
      if (D > 400000000L) throw Error(ErrorCode::OutOfRange, "enumeration index too large");
    }
  }

 private:
  void grow(long size) {
    if (size > 400000000L) throw Error(ErrorCode::OutOfRange, "denominator too large for the enumeration table");
    std::vector<long> phi(static_cast<std::size_t>(size));
    std::iota(phi.begin(), phi.end(), 0L);
    for (long p = 2; p < size; ++p)
      if (phi[p] == p)
        for (long m = p; m < size; m += p) phi[m] -= phi[m] / p;
    auto t = std::make_shared<std::vector<long>>(static_cast<std::size_t>(size), 0L);
    for (long d = 2; d < size; ++d) (*t)[d] = (*t)[d - 1] + phi[d];
    table_ = std::move(t);
  }
  std::mutex mu_;
  std::shared_ptr<const std::vector<long>> table_;
};

FareyTable& farey() {
  static FareyTable t;
  return t;
}

long coprime_rank(long n, long d) {
  long r = 0;
  for (long m = 1; m <= n; ++m)
    if (std::gcd(m, d) == 1) ++r;
  return r;
}

long as_long(const mpz_class& z, const char* what) {
  if (!z.fits_slong_p()) throw Error(ErrorCode::OutOfRange, what);
  return z.get_si();
}

}  // namespace

Rational RationalEnum::q(long i) const {
  if (i < 1) throw Error(ErrorCode::OutOfRange, "enumeration index must be >= 1");
  if (order_ == Order::CalkinWilf) {
    if (i > (1L << 61)) throw Error(ErrorCode::OutOfRange, "Calkin-Wilf index too large");
    unsigned long n = 2UL * static_cast<unsigned long>(i);
    int top = 63 - __builtin_clzl(n);
    mpz_class a = 1, b = 1;
    for (int bit = top - 1; bit >= 0; --bit) {
      if ((n >> bit) & 1UL) a += b; else b += a;
    }
    return Rational(a, b);
  }
  auto t = farey().reaching(i);
  const auto& pre = *t;
  long d = static_cast<long>(std::lower_bound(pre.begin() + 2, pre.end(), i) - pre.begin());
  long r = i - pre[d - 1];
  for (long n = 1; n < d; ++n)
    if (std::gcd(n, d) == 1 && --r == 0) return Rational(mpz_class(n), mpz_class(d));
  throw Error(ErrorCode::OutOfRange, "enumeration table inconsistent");
}

long RationalEnum::index(const Rational& q) const {
  if (q.sign() <= 0 || q >= Rational(1)) throw Error(ErrorCode::OutOfRange, "enumerated rationals lie in (0,1)");
  if (order_ == Order::CalkinWilf) {
    // Walk up the Calkin-Wilf tree collecting the path bits.
    mpz_class a = q.num(), b = q.den();
    unsigned long path = 0;
    int len = 0;
    while (!(a == 1 && b == 1)) {
      if (len >= 62) throw Error(ErrorCode::OutOfRange, "Calkin-Wilf index exceeds 62 bits");
      if (a < b) {
        b -= a;
      } else {
        a -= b;
        path |= 1UL << len;
      }
      ++len;
    }
    unsigned long n = (1UL << len) | path;
    return static_cast<long>(n / 2);
  }
  long d = as_long(q.den(), "denominator too large");
  long n = as_long(q.num(), "numerator too large");
  auto t = farey().upto(d);
  return (*t)[d - 1] + coprime_rank(n, d);
}

bool RationalEnum::for_each_in(const Rational& a, const Rational& b, long max_index,
                               const std::function<bool(long, const Rational&)>& visit) const {
  if (order_ == Order::CalkinWilf) {
    for (long i = 1; i <= max_index; ++i) {
      Rational x = q(i);
      if (a <= x && x <= b && visit(i, x)) return true;
    }
    return false;
  }
  for (long d = 2;; ++d) {
    auto t = farey().upto(d);
    long base = (*t)[d - 1];
    if (base + 1 > max_index) return false;
    mpz_class lo_z = ceil(a * Rational(d)), hi_z = floor(b * Rational(d));
    long lo = std::max(1L, lo_z.fits_slong_p() ? lo_z.get_si() : 1L);
    long hi = std::min(d - 1, hi_z.fits_slong_p() ? hi_z.get_si() : d - 1);
    if (lo > hi) continue;
    long rank = coprime_rank(lo - 1, d);
    for (long n = lo; n <= hi; ++n) {
      if (std::gcd(n, d) != 1) continue;
      ++rank;
      long i = base + rank;
      if (i > max_index) break;
      if (visit(i, Rational(mpz_class(n), mpz_class(d)))) return true;
    }
  }
}

// ---- shifts and f -------------------------------------------------------------

Enclosure shift_point(long k, long precision) {
  if (k == 0) return Enclosure(0);
  long kbits = static_cast<long>(mpz_sizeinbase(mpz_class(std::labs(k)).get_mpz_t(), 2));
  for (long p = precision + kbits + 4;; p *= 2) {
    Enclosure s = sqrt(Enclosure(2), p) * Enclosure(Rational(k));
    mpz_class fl = floor(s.lo());
    if (floor(s.hi()) == fl) return s - Enclosure(Rational(fl));  // k sqrt 2 is irrational, so this terminates
  }
}

namespace {

struct FKey {
  int order;
  long terms;
  Rational x;
  bool operator<(const FKey& o) const { return std::tie(order, terms, x) < std::tie(o.order, o.terms, o.x); }
};

std::mutex f_mutex;
std::map<FKey, Enclosure>& f_cache() {
  static std::map<FKey, Enclosure> c;
  return c;
}

// sum_{i <= N, q_i < x} 2^-i
Rational partial_below(const RationalEnum& e, const Rational& x, long terms) {
  Rational s = 0;
  for (long i = 1; i <= terms; ++i)
    if (e.q(i) < x) s += Rational::pow2(-i);
  return s;
}

// f over [lo, hi] for the unshifted series, using monotonicity.
Enclosure f_range(const RationalEnum& e, const Rational& lo, const Rational& hi, long terms) {
  if (hi.sign() <= 0) return Enclosure(0);
  if (lo > Rational(1)) return Enclosure(1);
  Rational low = lo.sign() <= 0 ? Rational(0) : partial_below(e, lo, terms);
  Rational up = hi >= Rational(1) ? Rational(1) : partial_below(e, hi, terms) + Rational::pow2(-terms);
  if (lo >= Rational(1)) low = Rational(1);
  return Enclosure(low, min(up, Rational(1)));
}

Enclosure f_point(const RationalEnum& e, const Rational& x, long terms) {
  if (x.sign() <= 0) return Enclosure(0);
  if (x >= Rational(1)) return Enclosure(1);
  FKey key{static_cast<int>(e.order()), terms, x};
  {
    std::lock_guard<std::mutex> lock(f_mutex);
    auto it = f_cache().find(key);
    if (it != f_cache().end()) return it->second;
  }
  Rational low = partial_below(e, x, terms);
  Rational tail = Rational::pow2(-terms);
  // The jump at x itself is not part of f(x) (left-continuity).
  if (x.den() <= 100000) {
    long i = e.index(x);
    if (i > terms && i <= terms + 1024) tail -= Rational::pow2(-i);
  }
  Enclosure out(low, low + tail);
  std::lock_guard<std::mutex> lock(f_mutex);
  if (f_cache().size() > 200000) f_cache().clear();
  f_cache().emplace(key, out);
  return out;
}

}  // namespace

Enclosure eval_f(const JumpSeries& s, const Rational& x, long terms, long precision) {
  if (terms < 1) throw Error(ErrorCode::InvalidArgument, "terms must be at least 1");
  if (s.shift == 0) return f_point(s.order, x, terms);
  for (long p = precision;; p *= 2) {
    Enclosure t = Enclosure(x) - shift_point(s.shift, p);
    if (t.lo().sign() >= 0) return t.is_point() ? f_point(s.order, t.lo(), terms) : f_range(s.order, t.lo(), t.hi(), terms);
    if (t.hi().sign() < 0) {
      t += Enclosure(1);
      return f_range(s.order, t.lo(), t.hi(), terms);
    }
    if (p > 1 << 14) return Enclosure(0, 1);
  }
}

Enclosure eval_f(const JumpSeries& s, const Enclosure& x, long terms, long precision) {
  if (x.is_point()) return eval_f(s, x.lo(), terms, precision);
  if (s.shift == 0) return f_range(s.order, x.lo(), x.hi(), terms);
  Enclosure t = x - shift_point(s.shift, precision);
  if (t.lo().sign() >= 0) return f_range(s.order, t.lo(), t.hi(), terms);
  if (t.hi().sign() < 0) return f_range(s.order, t.lo() + Rational(1), t.hi() + Rational(1), terms);
  return hull(f_range(s.order, Rational(0), t.hi(), terms), f_range(s.order, t.lo() + Rational(1), Rational(1), terms));
}

// ---- exponential polynomials --------------------------------------------------

namespace {

long nth_prime(long l) {
  static const std::vector<long> primes = [] {
    std::vector<long> ps;
    for (long n = 2; ps.size() < 2000; ++n) {
      bool prime = true;
      for (long p : ps) {
        if (p * p > n) break;
        if (n % p == 0) {
          prime = false;
          break;
        }
      }
      if (prime) ps.push_back(n);
    }
    return ps;
  }();
  if (l < 1 || l > static_cast<long>(primes.size())) throw Error(ErrorCode::OutOfRange, "basis index out of range");
  return primes[static_cast<std::size_t>(l - 1)];
}

struct ExpKey {
  long l, precision;
  Rational x;
  bool operator<(const ExpKey& o) const { return std::tie(l, precision, x) < std::tie(o.l, o.precision, o.x); }
};

std::mutex exp_mutex;
std::map<ExpKey, Enclosure>& exp_cache() {
  static std::map<ExpKey, Enclosure> c;
  return c;
}

// e^{r_l x}, memoized.
Enclosure basis_exp(long l, const Rational& x, long precision) {
  ExpKey key{l, precision, x};
  {
    std::lock_guard<std::mutex> lock(exp_mutex);
    auto it = exp_cache().find(key);
    if (it != exp_cache().end()) return it->second;
  }
  Enclosure arg = (basis_rate(l, precision + 8) * Enclosure(x)).rounded(precision + 8);
  Enclosure v = exp(arg, precision + 4).rounded(precision + 4);
  std::lock_guard<std::mutex> lock(exp_mutex);
  if (exp_cache().size() > 100000) exp_cache().clear();
  exp_cache().emplace(key, v);
  return v;
}

struct MonoKey {
  std::vector<long> e;
  long precision;
  Rational x;
  bool operator<(const MonoKey& o) const { return std::tie(e, precision, x) < std::tie(o.e, o.precision, o.x); }
};

std::mutex mono_mutex;
std::map<MonoKey, Enclosure>& mono_cache() {
  static std::map<MonoKey, Enclosure> c;
  return c;
}

// prod_l e^{e_l r_l x}, memoized per exponent vector.
Enclosure monomial_exp(const std::vector<long>& e, const Rational& x, long precision) {
  MonoKey key{e, precision, x};
  {
    std::lock_guard<std::mutex> lock(mono_mutex);
    auto it = mono_cache().find(key);
    if (it != mono_cache().end()) return it->second;
  }
  Enclosure t(1);
  for (std::size_t l = 0; l < e.size(); ++l)
    if (e[l] != 0) t = (t * pow(basis_exp(static_cast<long>(l), x, precision), e[l])).rounded(precision + 4);
  std::lock_guard<std::mutex> lock(mono_mutex);
  if (mono_cache().size() > 100000) mono_cache().clear();
  mono_cache().emplace(std::move(key), t);
  return t;
}

}  // namespace

Enclosure basis_rate(long l, long precision) {
  if (l == 0) return Enclosure(1);
  return sqrt(Enclosure(Rational(nth_prime(l))), precision);
}

ExpPoly ExpPoly::constant(const Rational& c) { return term(c, {}); }

ExpPoly ExpPoly::term(const Rational& c, Exponent e) {
  ExpPoly p;
  p.add(std::move(e), c);
  return p;
}

void ExpPoly::add(Exponent e, const Rational& c) {
  while (!e.empty() && e.back() == 0) e.pop_back();
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& o) {
  for (const auto& [e, c] : o.terms_) add(e, c);
  return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& o) {
  for (const auto& [e, c] : o.terms_) add(e, -c);
  return *this;
}

ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
  ExpPoly out;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      ExpPoly::Exponent e(std::max(ea.size(), eb.size()), 0);
      for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
      for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
      out.add(std::move(e), ca * cb);
    }
  return out;
}

Enclosure ExpPoly::evaluate(const Rational& x, long precision) const {
  Enclosure sum(0);
  for (const auto& [e, c] : terms_) sum += (Enclosure(c) * monomial_exp(e, x, precision)).rounded(precision + 4);
  return sum.rounded(precision + 4);
}

Rational ExpPoly::sup_bound() const {
  // Every rate is positive, so e^{r x} lies in [1, e^r] on [0,1].
  Rational total = 0;
  for (const auto& [e, c] : terms_) {
    Exponent pos(e.size());
    for (std::size_t l = 0; l < e.size(); ++l) pos[l] = std::max(e[l], 0L);
    total += (Enclosure(abs(c)) * monomial_exp(pos, Rational(1), 32)).rounded(40).hi();
  }
  return total;
}

// ---- jump polynomials ---------------------------------------------------------

namespace {

mpz_class binomial(long n, long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

}  // namespace

JumpPolynomial::JumpPolynomial(std::vector<ExpPoly> G, JumpSeries series) : G_(std::move(G)), series_(series) {
  while (!G_.empty() && G_.back().is_zero()) G_.pop_back();
  if (G_.empty()) throw Error(ErrorCode::ZeroPolynomial, "jump polynomial has no nonzero coefficient");
  if (series_.shift != 0) throw Error(ErrorCode::Unsupported, "jump polynomials are built on the unshifted series");
  M_ = 0;
  for (const auto& g : G_) M_ = max(M_, g.sup_bound());
  long k = degree();
  mpz_class best = 0;
  for (long m = 1; m <= k; ++m) {
    mpz_class s = 0;
    for (long j = m; j <= k; ++j) s += binomial(j, m);
    if (s > best) best = s;
  }
  N_ = M_ * Rational(best);
}

OneSided one_sided_limits(const JumpPolynomial& g, const Rational& q, long terms, long precision) {
  long i = g.series().order.index(q);
  Enclosure y = eval_f(g.series(), q, terms, precision);
  Enclosure yr = y + Enclosure(Rational::pow2(-i));
  Enclosure left(0), right(0), yl_pow(1), yr_pow(1);
  for (long j = 1; j <= g.degree(); ++j) {
    yl_pow = (yl_pow * y).rounded(precision + 8);
    yr_pow = (yr_pow * yr).rounded(precision + 8);
    Enclosure Gj = g.coefficients()[j - 1].evaluate(q, precision);
    left += Gj * yl_pow;
    right += Gj * yr_pow;
  }
  return {left.rounded(precision + 8), right.rounded(precision + 8)};
}

namespace {

JumpResult jump_at(const JumpPolynomial& g, long i, const Rational& q, long terms, long precision) {
  long k = g.degree();
  Enclosure y = eval_f(g.series(), q, terms, precision);
  std::vector<Enclosure> Gq;
  Gq.reserve(static_cast<std::size_t>(k));
  for (const auto& G : g.coefficients()) Gq.push_back(G.evaluate(q, precision));
  std::vector<Enclosure> ypow{Enclosure(1)};
  for (long j = 1; j < k; ++j) ypow.push_back((ypow.back() * y).rounded(precision + 8));
  auto P = [&](long m) {
    Enclosure s(0);
    for (long j = m; j <= k; ++j) {
      if (Gq[j - 1].is_point() && Gq[j - 1].lo().is_zero()) continue;
      s += Enclosure(Rational(binomial(j, m))) * Gq[j - 1] * ypow[j - m];
    }
    return s.rounded(precision + 8);
  };
  Rational a = Rational::pow2(-i);
  // Horner in a: jump = a (P_1 + a (P_2 + ...)).
  Enclosure p1 = P(1);
  Enclosure S = P(k);
  for (long m = k - 1; m >= 1; --m) S = ((m == 1 ? p1 : P(m)) + Enclosure(a) * S).rounded(precision + 8);
  if (k == 1) S = p1;
  Enclosure jump = Enclosure(a) * S;
  return {i, q, y, p1, jump, jump.excludes_zero()};
}

}  // namespace

JumpResult jump_enclosure(const JumpPolynomial& g, const Rational& q, long terms, long precision) {
  long i = g.series().order.index(q);
  if (precision > 64) {
    JumpResult quick = jump_at(g, i, q, terms, 64);
    if (quick.certified) return quick;
  }
  return jump_at(g, i, q, terms, precision);
}

std::variant<JumpFound, JumpInconclusive> jump_search(const JumpPolynomial& g, const Rational& a,
                                                      const Rational& b, const JumpSearchParams& params) {
  if (!(a < b) || a.sign() < 0 || b > Rational(1))
    throw Error(ErrorCode::InvalidArgument, "jump search needs a nondegenerate [a,b] inside [0,1]");
  if (params.epsilon.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  std::optional<JumpFound> found;
  long tried = 0;
  g.series().order.for_each_in(a, b, params.max_index, [&](long i, const Rational& q) {
    ++tried;
    JumpResult r = jump_enclosure(g, q, params.terms, params.precision);
    if (!r.certified) return false;
    // Lower bound from the P_1 term: |jump| >= 2^-i (eps - N/(2^i - 1)).
    mpz_class pow2i;
    mpz_ui_pow_ui(pow2i.get_mpz_t(), 2, static_cast<unsigned long>(i));
    Rational margin = params.epsilon - g.bound_N() / Rational(mpz_class(pow2i - 1));
    bool eps_route = r.p1.mig() >= params.epsilon && margin.sign() > 0;
    found = JumpFound{r, eps_route, margin, tried};
    return true;
  });
  if (found) return *found;
  return JumpInconclusive{tried, "no certified jump among " + std::to_string(tried) + " candidates with index <= " +
                                     std::to_string(params.max_index)};
}

// ---- variation -----------------------------------------------------------------

VariationBounds variation_bounds(const std::vector<ShiftTerm>& h, long terms) {
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (h[i].k == h[j].k) throw Error(ErrorCode::InvalidArgument, "shift indices must be distinct");
  VariationBounds out{Rational(0), Rational(0), "3*sum|beta|", {}};
  Rational beta_sum = 0;
  for (const auto& t : h) {
    beta_sum += abs(t.beta);
    if (t.beta.is_zero()) continue;
    if (t.k != 0) {
      // f_v jumps from f(1-) = 1 down to f(0+) = 0 at v; the other shifts
      // differ from v by a nonzero integer multiple of sqrt 2 (mod 1), hence
      // are continuous there.
      Enclosure jump(-t.beta);
      out.probes.push_back({"v_k", t.k, shift_point(t.k, 64), jump});
      out.lower += abs(t.beta);
    } else {
      RationalEnum e;
      for (long i = 1; i <= terms; ++i) {
        Enclosure jump(t.beta * Rational::pow2(-i));
        out.probes.push_back({"q_i", i, Enclosure(e.q(i)), jump});
        out.lower += jump.mig();
      }
    }
  }
  if (h.size() == 1 && h[0].k == 0) {
    out.upper = abs(h[0].beta);  // |beta| f is monotone with total rise |beta|
    out.upper_kind = "monotone";
  } else {
    out.upper = Rational(3) * beta_sum;
  }
  return out;
}

VariationBounds variation_bounds(const JumpPolynomial& g, const std::vector<Rational>& probes, long terms,
                                 long precision) {
  std::vector<Rational> pts = probes;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  VariationBounds out{Rational(0), std::nullopt, "none", {}};
  for (const auto& q : pts) {
    JumpResult r = jump_enclosure(g, q, terms, precision);
    out.probes.push_back({"q_i", r.index, Enclosure(q), r.jump});
    out.lower += r.jump.mig();
  }
  if (g.degree() == 1 && g.coefficients()[0].terms().size() == 1 && g.coefficients()[0].terms().begin()->first.empty()) {
    out.upper = abs(g.coefficients()[0].terms().begin()->second);
    out.upper_kind = "monotone";
  }
  return out;
}

// ---- expansion ----------------------------------------------------------------

JumpPolynomial expand_generator_polynomial(const GeneratorPolynomial& p, JumpSeries series) {
  std::size_t n = 0;
  for (const auto& m : p.monomials) n = std::max(n, m.gamma.size());
  std::vector<long> alphas = p.alphas;
  if (alphas.empty())
    for (std::size_t l = 0; l < n; ++l) alphas.push_back(static_cast<long>(l + 1));
  if (alphas.size() < n) throw Error(ErrorCode::InvalidArgument, "fewer generator symbols than variables");
  std::vector<ExpPoly> G;
  for (const auto& m : p.monomials) {
    long degree = 0;
    ExpPoly::Exponent e;
    for (std::size_t l = 0; l < m.gamma.size(); ++l) {
      if (m.gamma[l] < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent in polynomial");
      degree += m.gamma[l];
      std::size_t slot = static_cast<std::size_t>(alphas[l]);
      if (e.size() <= slot) e.resize(slot + 1, 0);
      e[slot] += m.gamma[l];
    }
    if (degree == 0) {
      if (!m.lambda.is_zero()) throw Error(ErrorCode::ConstantTermPresent, "polynomial has a constant term");
      continue;
    }
    if (static_cast<long>(G.size()) < degree) G.resize(static_cast<std::size_t>(degree));
    G[static_cast<std::size_t>(degree - 1)] += ExpPoly::term(m.lambda, e);
  }
  return JumpPolynomial(std::move(G), series);
}

Densified densify(const ExpPoly& G, JumpSeries series) {
  if (G.is_zero()) throw Error(ErrorCode::ZeroInput, "densify needs a nonzero G");
  return {JumpPolynomial({G}, series), G};
}

}  // namespace nwint
