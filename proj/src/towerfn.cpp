#include "nwint/towerfn.hpp"

#include <algorithm>
#include <numeric>

#include "nwint/error.hpp"

namespace nwint {

namespace {

long floor_div(long a, long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

void validate(const Subsequence& s) {
  if (s.stride < 1) throw Error(ErrorCode::InvalidArgument, "subsequence stride must be positive");
  if (s.nth(1) < 1) throw Error(ErrorCode::InvalidArgument, "subsequence must start at generation >= 1");
}

void validate(const PowerRule& p) {
  if (p.theta <= Rational(1)) throw Error(ErrorCode::InvalidArgument, "theta must exceed 1");
  validate(p.subseq);
}

}  // namespace

bool Subsequence::contains(long g) const {
  if (g < nth(1)) return false;
  return (g - offset) % stride == 0;
}

long Subsequence::count_upto(long g) const {
  if (g < nth(1)) return 0;
  return floor_div(g - offset, stride);
}

bool disjoint(const Subsequence& a, const Subsequence& b) {
  long d = std::gcd(a.stride, b.stride);
  return ((a.offset - b.offset) % d + d) % d != 0;
}

mpz_class MonomialRule::product(std::size_t row) const {
  mpz_class p = 1;
  for (std::size_t l = 0; l < thetas.size(); ++l) {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(thetas[l]), static_cast<unsigned long>(rows[row].k[l]));
    p *= t;
  }
  return p;
}

StepSeries::StepSeries(TowerSpec tower, StepRule rule) : tower_(std::move(tower)), rule_(std::move(rule)) {
  if (auto* p = std::get_if<PowerRule>(&rule_)) {
    validate(*p);
  } else if (auto* m = std::get_if<MonomialRule>(&rule_)) {
    if (m->thetas.empty() || m->rows.empty()) throw Error(ErrorCode::InvalidArgument, "monomial rule needs thetas and rows");
    for (long t : m->thetas)
      if (t <= 1) throw Error(ErrorCode::InvalidArgument, "monomial thetas must exceed 1");
    for (const auto& row : m->rows) {
      if (row.k.size() != m->thetas.size())
        throw Error(ErrorCode::InvalidArgument, "exponent row length must match the number of thetas");
      bool any = false;
      for (long k : row.k) {
        if (k < 0) throw Error(ErrorCode::InvalidArgument, "exponents must be non-negative");
        any = any || k > 0;
      }
      if (!any) throw Error(ErrorCode::InvalidArgument, "exponent rows must not be all zero");
    }
  } else {
    const auto& parts = std::get<LinearRule>(rule_).parts;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      validate(parts[i].second);
      for (std::size_t j = 0; j < i; ++j)
        if (!disjoint(parts[i].second.subseq, parts[j].second.subseq))
          throw Error(ErrorCode::NotDisjoint, "subsequences " + std::to_string(j + 1) + " and " +
                                                  std::to_string(i + 1) + " share generations");
    }
  }
}

Rational StepSeries::coefficient(long g) const {
  if (g < 1 || !tower_.has_generation(g)) return Rational(0);
  if (auto* p = std::get_if<PowerRule>(&rule_)) return p->subseq.contains(g) ? pow(p->theta, g) : Rational(0);
  if (auto* m = std::get_if<MonomialRule>(&rule_)) {
    Rational c = 0;
    for (std::size_t i = 0; i < m->rows.size(); ++i) {
      mpz_class t;
      mpz_pow_ui(t.get_mpz_t(), m->product(i).get_mpz_t(), static_cast<unsigned long>(g));
      c += m->rows[i].beta * Rational(t);
    }
    return c;
  }
  for (const auto& [a, p] : std::get<LinearRule>(rule_).parts)
    if (p.subseq.contains(g)) return a * pow(p.theta, g);
  return Rational(0);
}

EvalResult eval(const StepSeries& s, const Rational& x, long maxgen, long depth) {
  TowerLocation loc = tower_locate(s.tower(), x, maxgen, depth);
  if (loc.kind == TowerLocation::Unresolved) return {EvalResult::Unknown, Rational(0), loc};
  Rational v = 0;
  for (long g : loc.generations) v += s.coefficient(g);
  return {v.is_zero() ? EvalResult::Zero : EvalResult::Value, v, loc};
}

// ---- L1 norm ----------------------------------------------------------------

namespace {

Enclosure generation_measure(const TowerSpec& t, long g, long depth) {
  Rational mu = t.mass(g), S = t.available(g);
  return Enclosure(mu, mu + (S - mu) * Rational::pow2(-depth));
}

// Upper bound for sum_{g > G} theta^g (mu_g + depth slack) over every
// generation past G. G may be raised so that the factorial bound applies;
// the caller sums exact terms through the returned G.
Rational tail_bound(const TowerSpec& t, const Rational& theta, long G, long depth) {
  switch (t.preset()) {
    case TowerSpec::Preset::Explicit: return Rational(0);
    case TowerSpec::Preset::Dyadic: {
      Rational r = theta / Rational(2);
      if (r >= Rational(1))
        throw Error(ErrorCode::DivergentTail, "theta >= 2 makes the dyadic tail diverge");
      // On the dyadic tower S_g - mu_g = mu_g, so the slack is a factor 1 + 2^-d.
      return pow(r, G + 1) / (Rational(1) - r) * (Rational(1) + Rational::pow2(-depth));
    }
    case TowerSpec::Preset::Factorial: {
      // sum_{g>G} theta^g/(2 g!) <= t_{G+1} / (1 - theta/(G+2)).
      Rational ratio = theta / Rational(G + 2);
      mpz_class f;
      mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(G + 1));
      Rational first = pow(theta, G + 1) / Rational(mpz_class(2 * f));
      return first / (Rational(1) - ratio);
    }
  }
  return Rational(0);
}

long factorial_floor(const TowerSpec& t, const Rational& theta, long G) {
  if (t.preset() != TowerSpec::Preset::Factorial) return G;
  mpz_class need = floor(theta);  // tail needs theta < G + 2
  return std::max(G, need.get_si());
}

}  // namespace

Enclosure l1_norm(const StepSeries& s, long terms, long depth) {
  if (terms < 1) throw Error(ErrorCode::InvalidArgument, "terms must be at least 1");
  if (depth < 1) throw Error(ErrorCode::DepthTooSmall, "depth must be at least 1");
  const TowerSpec& t = s.tower();

  // (|weight|, theta) pairs whose tails must be bounded, and the last exact generation.
  std::vector<std::pair<Rational, Rational>> tails;
  long G = 0;
  if (auto* p = std::get_if<PowerRule>(&s.rule())) {
    G = p->subseq.nth(terms);
    tails.push_back({Rational(1), p->theta});
  } else if (auto* m = std::get_if<MonomialRule>(&s.rule())) {
    G = terms;
    for (std::size_t i = 0; i < m->rows.size(); ++i)
      if (!m->rows[i].beta.is_zero()) tails.push_back({abs(m->rows[i].beta), Rational(m->product(i))});
  } else {
    for (const auto& [a, p] : std::get<LinearRule>(s.rule()).parts) {
      G = std::max(G, p.subseq.nth(terms));
      if (!a.is_zero()) tails.push_back({abs(a), p.theta});
    }
  }
  for (const auto& tl : tails) G = factorial_floor(t, tl.second, G);
  if (auto last = t.generations()) G = std::min(G, *last);

  Enclosure sum(0);
  for (long g = 1; g <= G; ++g) {
    Rational c = abs(s.coefficient(g));
    if (c.is_zero()) continue;
    sum += Enclosure(c) * generation_measure(t, g, depth);
  }
  Rational tail = 0;
  for (const auto& [w, theta] : tails) tail += w * tail_bound(t, theta, G, depth);
  return Enclosure(sum.lo(), sum.hi() + tail);
}

// ---- witnesses ----------------------------------------------------------------

std::variant<UnboundedWitness, Inconclusive> unbounded_witness(const StepSeries& s, const Rational& lo,
                                                               const Rational& hi, const Rational& bound,
                                                               long maxgen, long depth) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "witness interval must be nondegenerate");
  if (lo.sign() < 0 || hi > Rational(1)) throw Error(ErrorCode::InvalidArgument, "witness interval must lie in [0,1]");
  if (bound.sign() < 0) throw Error(ErrorCode::InvalidArgument, "bound must be non-negative");
  if (depth < 1) throw Error(ErrorCode::DepthTooSmall, "depth must be at least 1");
  bool any_large = false;
  for (long g = 1; g <= maxgen && s.tower().has_generation(g); ++g) {
    Rational c = s.coefficient(g);
    if (!(abs(c) > bound)) continue;
    any_large = true;
    auto found = component_in(tower_generation(s.tower(), g, depth), lo, hi);
    if (auto* comp = std::get_if<TowerComponent>(&found)) {
      Enclosure m = comp->measure_enclosure(depth);
      return UnboundedWitness{g, c, std::move(*comp), m};
    }
  }
  if (!any_large)
    return Inconclusive{"no generation <= " + std::to_string(maxgen) + " has |value| above the bound"};
  return Inconclusive{"no component inside the interval at depth " + std::to_string(depth) +
                      " for generations <= " + std::to_string(maxgen)};
}

DominanceCertificate dominance_index(const std::vector<Rational>& betas, const std::vector<Rational>& thetas) {
  if (betas.empty() || betas.size() != thetas.size())
    throw Error(ErrorCode::InvalidArgument, "betas and thetas must be nonempty and of equal length");
  if (betas[0].is_zero()) throw Error(ErrorCode::InvalidArgument, "beta_1 must be nonzero");
  for (const auto& t : thetas)
    if (t.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "thetas must be positive");
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (thetas[i] >= thetas[0]) throw Error(ErrorCode::NotDominant, "theta_1 is not strictly largest");

  std::optional<Rational> tail_prev, half_prev;
  std::vector<Rational> powers(thetas.size(), Rational(1));
  for (long j = 1;; ++j) {
    for (std::size_t i = 0; i < thetas.size(); ++i) powers[i] *= thetas[i];
    Rational tail = 0;
    for (std::size_t i = 1; i < thetas.size(); ++i) tail += abs(betas[i]) * powers[i];
    Rational half = abs(betas[0]) * powers[0] / Rational(2);
    // Each (theta_i/theta_1)^j decreases in j, so once this holds it holds for all later j.
    if (tail < half) return {j, tail, half, tail_prev, half_prev};
    tail_prev = tail;
    half_prev = half;
  }
}

std::variant<ProductsVerified, ProductsCollision> distinct_products_check(const std::vector<long>& thetas,
                                                                         const std::vector<std::vector<long>>& rows) {
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    mpz_class t = thetas[i];
    if (thetas[i] < 2 || mpz_probab_prime_p(t.get_mpz_t(), 40) == 0)
      throw Error(ErrorCode::NonPrimeTheta, std::to_string(thetas[i]) + " is not prime");
    for (std::size_t j = 0; j < i; ++j)
      if (thetas[i] == thetas[j]) throw Error(ErrorCode::NonPrimeTheta, "thetas must be pairwise distinct primes");
  }
  MonomialRule m{thetas, {}};
  for (const auto& r : rows) {
    if (r.size() != thetas.size()) throw Error(ErrorCode::InvalidArgument, "exponent row length mismatch");
    for (long k : r)
      if (k < 0) throw Error(ErrorCode::InvalidArgument, "exponents must be non-negative");
    m.rows.push_back({Rational(1), r});
  }
  ProductsVerified out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.products.push_back(m.product(i));
    for (std::size_t j = 0; j < i; ++j)
      if (out.products[j] == out.products[i]) return ProductsCollision{j, i, out.products[i]};
  }
  return out;
}

BasisResult basis_inequality_check(const TowerSpec& tower, const std::vector<PowerRule>& family,
                                   const std::vector<Rational>& a, std::size_t m1, long terms, long depth) {
  std::size_t m2 = a.size();
  if (m2 == 0 || m1 < 1 || m1 > m2) throw Error(ErrorCode::InvalidArgument, "need 1 <= m1 <= m2");
  if (family.size() < m2) throw Error(ErrorCode::InvalidArgument, "family shorter than the coefficient vector");
  for (std::size_t i = 0; i < m2; ++i) {
    validate(family[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (!disjoint(family[i].subseq, family[j].subseq))
        throw Error(ErrorCode::NotDisjoint, "family subsequences must be pairwise disjoint");
  }
  // Disjoint supports make the norm additive: ||sum a_k g_k|| = sum |a_k| ||g_k||.
  Enclosure left(0), right(0), diff(0);
  for (std::size_t k = 0; k < m2; ++k) {
    if (a[k].is_zero()) continue;
    Enclosure term = Enclosure(abs(a[k])) * l1_norm(StepSeries(tower, family[k]), terms, depth);
    right += term;
    if (k < m1) left += term; else diff += term;
  }
  if (left.hi() <= right.lo()) return {true, "direct", left, right, diff};
  // right - left equals diff exactly, term by term.
  return {diff.lo().sign() >= 0, "difference", left, right, diff};
}

// ---- perturbation -------------------------------------------------------------

Rational StepFunction::sup_abs_on(const Rational& lo, const Rational& hi) const {
  Rational m = 0;
  for (const auto& p : pieces)
    if (p.where.left < hi && lo < p.where.right) m = max(m, abs(p.value));
  return m;
}

namespace {

Rational value_at(const StepFunction& f, const Rational& x) {
  for (const auto& p : f.pieces)
    if (p.where.left < x && x < p.where.right) return p.value;
  return Rational(0);
}

}  // namespace

Rational StepFunction::l1_distance(const StepFunction& g, const StepFunction& h) {
  std::vector<Rational> cuts{Rational(0), Rational(1)};
  for (const auto* f : {&g, &h})
    for (const auto& p : f->pieces) {
      cuts.push_back(p.where.left);
      cuts.push_back(p.where.right);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Rational total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Rational mid = (cuts[i] + cuts[i + 1]) / Rational(2);
    total += abs(value_at(g, mid) - value_at(h, mid)) * (cuts[i + 1] - cuts[i]);
  }
  return total;
}

PerturbationCertificate comeager_perturbation(const StepFunction& f, const Rational& N, const Rational& lo,
                                              const Rational& hi, const Rational& R) {
  if (N.sign() <= 0 || R.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "N and R must be positive");
  if (!(lo < hi) || lo.sign() < 0 || hi > Rational(1))
    throw Error(ErrorCode::InvalidArgument, "I must be a nondegenerate subinterval of [0,1]");
  Rational len = R / (Rational(6) * N);
  if (hi - lo < len) throw Error(ErrorCode::IntervalTooShort, "|I| < R/(6N)");
  if (f.sup_abs_on(lo, hi) > N) throw Error(ErrorCode::InvalidArgument, "|f| exceeds N on I");

  Interval J{lo, lo + len};
  StepFunction g;
  for (const auto& p : f.pieces) {
    if (p.where.left < J.left) g.pieces.push_back({{p.where.left, min(p.where.right, J.left)}, p.value});
    if (J.right < p.where.right) g.pieces.push_back({{max(p.where.left, J.right), p.where.right}, p.value});
  }
  g.pieces.push_back({J, Rational(2) * N});
  std::sort(g.pieces.begin(), g.pieces.end(),
            [](const auto& x, const auto& y) { return x.where.left < y.where.left; });

  PerturbationCertificate c{J, g, StepFunction::l1_distance(g, f), R / Rational(2), len * N, R / Rational(7), false};
  c.holds = c.distance <= c.half_R && c.forced_excess > c.radius;
  return c;
}

}  // namespace nwint
