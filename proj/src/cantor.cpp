#include "nwint/cantor.hpp"

#include <functional>

#include "nwint/error.hpp"

namespace nwint {

CantorSpec::CantorSpec(Rational a_, Rational b_, Rational mass_)
    : a(std::move(a_)), b(std::move(b_)), mass(std::move(mass_)) {
  if (!(a < b)) throw Error(ErrorCode::InfeasibleMass, "Cantor span must have a < b");
  if (mass.sign() <= 0 || mass >= length())
    throw Error(ErrorCode::InfeasibleMass, "Cantor mass must lie strictly between 0 and the span length");
}

Rational CantorSpec::hole_length(long n) const { return Rational(2) * removed() * Rational::pow2(-2 * n); }

Rational CantorSpec::kept_length(long n) const {
  return Rational::pow2(-n) * length() - removed() * (Rational::pow2(-n) - Rational::pow2(-2 * n));
}

Enclosure CantorApprox::measure_enclosure() const {
  return Enclosure(spec.mass, spec.mass + spec.removed() * Rational::pow2(-depth));
}

CantorApprox cantor_approx(const CantorSpec& spec, long depth) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be non-negative");
  if (depth > 24) throw Error(ErrorCode::OutOfRange, "materialized Cantor depth is limited to 24");
  std::vector<Rational> lefts{spec.a};
  CantorApprox out{spec, depth, {}, {}};
  for (long n = 1; n <= depth; ++n) {
    Rational L = spec.kept_length(n), h = spec.hole_length(n);
    std::vector<Rational> next;
    std::vector<Interval> holes;
    next.reserve(lefts.size() * 2);
    holes.reserve(lefts.size());
    for (const auto& l : lefts) {
      Rational hl = l + L, hr = hl + h;
      next.push_back(l);
      holes.push_back({hl, hr});
      next.push_back(hr);
    }
    out.holes.push_back(IntervalSet::from_sorted(std::move(holes)));
    lefts = std::move(next);
  }
  Rational L = spec.kept_length(depth);
  std::vector<Interval> kept;
  kept.reserve(lefts.size());
  for (auto& l : lefts) kept.push_back({l, l + L});
  out.kept = IntervalSet::from_sorted(std::move(kept));
  return out;
}

// ---- tower spec -------------------------------------------------------------

TowerSpec TowerSpec::dyadic() { return TowerSpec(); }

TowerSpec TowerSpec::factorial() {
  TowerSpec t;
  t.preset_ = Preset::Factorial;
  return t;
}

TowerSpec TowerSpec::explicit_masses(std::vector<Rational> masses) {
  if (masses.empty()) throw Error(ErrorCode::InfeasibleMass, "tower needs at least one generation");
  TowerSpec t;
  t.preset_ = Preset::Explicit;
  t.masses_ = std::move(masses);
  Rational left = 1;
  for (std::size_t i = 0; i < t.masses_.size(); ++i) {
    if (t.masses_[i].sign() <= 0) throw Error(ErrorCode::InfeasibleMass, "tower masses must be positive");
    if (t.masses_[i] >= left)
      throw Error(ErrorCode::InfeasibleMass, "generation " + std::to_string(i + 1) + " needs ratio >= 1");
    left -= t.masses_[i];
  }
  return t;
}

std::optional<long> TowerSpec::generations() const {
  if (preset_ == Preset::Explicit) return static_cast<long>(masses_.size());
  return std::nullopt;
}

bool TowerSpec::has_generation(long j) const {
  auto g = generations();
  return j >= 1 && (!g || j <= *g);
}

namespace {

Rational factorial_mass(long j) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(j));
  return Rational(mpz_class(1), mpz_class(2 * f));
}

}  // namespace

Rational TowerSpec::mass(long j) const {
  if (!has_generation(j)) throw Error(ErrorCode::OutOfRange, "tower has no generation " + std::to_string(j));
  switch (preset_) {
    case Preset::Dyadic: return Rational::pow2(-j);
    case Preset::Factorial: return factorial_mass(j);
    case Preset::Explicit: break;
  }
  return masses_[static_cast<std::size_t>(j - 1)];
}

Rational TowerSpec::available(long j) const {
  if (!has_generation(j)) throw Error(ErrorCode::OutOfRange, "tower has no generation " + std::to_string(j));
  if (preset_ == Preset::Dyadic) return Rational::pow2(1 - j);
  Rational s = 1;
  for (long i = 1; i < j; ++i) s -= mass(i);
  return s;
}

Rational TowerSpec::ratio(long j) const {
  Rational r = mass(j) / available(j);
  if (r >= Rational(1)) throw Error(ErrorCode::InfeasibleMass, "generation " + std::to_string(j) + " has ratio >= 1");
  return r;
}

// ---- lazy geometry ----------------------------------------------------------

namespace {

// Level geometry of one component: kept lengths L[0..d] and hole lengths
// h[1..d] (h[0] unused).
struct Geometry {
  Rational a, b;
  std::vector<Rational> L, h;

  Geometry(const Rational& a_, const Rational& b_, const Rational& rho, long depth) : a(a_), b(b_) {
    CantorSpec spec(a, b, rho * (b - a));
    L.reserve(depth + 1);
    h.reserve(depth + 1);
    for (long n = 0; n <= depth; ++n) {
      L.push_back(spec.kept_length(n));
      h.push_back(n == 0 ? Rational(0) : spec.hole_length(n));
    }
  }
  long depth() const { return static_cast<long>(L.size()) - 1; }
};

// In-order walk of the holes of levels <= depth. `enter(l, r)` prunes a kept
// interval; `hole(level, index, l, r)` returns true to stop the walk.
using EnterFn = std::function<bool(const Rational&, const Rational&)>;
using HoleFn = std::function<bool(long, const mpz_class&, const Rational&, const Rational&)>;

bool walk(const Geometry& g, long m, const Rational& left, const mpz_class& index, const EnterFn& enter,
          const HoleFn& hole) {
  if (m >= g.depth()) return false;
  if (!enter(left, left + g.L[m])) return false;
  if (walk(g, m + 1, left, 2 * index, enter, hole)) return true;
  Rational hl = left + g.L[m + 1];
  Rational hr = hl + g.h[m + 1];
  if (hole(m + 1, index, hl, hr)) return true;
  return walk(g, m + 1, hr, 2 * index + 1, enter, hole);
}

struct Searcher {
  const TowerSpec& spec;
  long target, depth;
  Rational lo, hi;
  std::vector<Rational> rho;  // rho[g] for g = 1..target
  std::vector<TowerComponent::Link> chain;
  std::optional<TowerComponent> found;

  bool search(long g, const Rational& a, const Rational& b) {
    if (g == target) {
      if (lo <= a && b <= hi) {
        found = TowerComponent{g, {a, b}, rho[g] * (b - a), chain};
        return true;
      }
      return false;
    }
    Geometry geo(a, b, rho[g], depth);
    EnterFn enter = [&](const Rational& l, const Rational& r) { return l < hi && lo < r; };
    HoleFn hole = [&](long level, const mpz_class& idx, const Rational& l, const Rational& r) {
      bool useful = (g + 1 == target) ? (lo <= l && r <= hi) : (l < hi && lo < r);
      if (!useful) return false;
      chain.push_back({g + 1, {l, r}, level, idx});
      if (search(g + 1, l, r)) return true;
      chain.pop_back();
      return false;
    };
    return walk(geo, 0, a, mpz_class(0), enter, hole);
  }
};

}  // namespace

Enclosure TowerComponent::measure_enclosure(long depth) const {
  Rational removed = span.length() - mass;
  return Enclosure(mass, mass + removed * Rational::pow2(-depth));
}

TowerApprox tower_generation(const TowerSpec& spec, long j, long d) {
  if (d < 1) throw Error(ErrorCode::DepthTooSmall, "tower depth must be at least 1");
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "generation must be at least 1");
  for (long g = 1; g <= j; ++g) spec.ratio(g);  // feasibility of the whole chain
  return TowerApprox{spec, j, d};
}

Enclosure TowerApprox::measure_enclosure() const {
  // Each component keeps mu_c + R_c 2^-d at depth d, R_c = (1 - rho) |span|,
  // and the spans of generation j have total length S_j.
  Rational mu = spec.mass(generation);
  Rational S = spec.available(generation);
  return Enclosure(mu, mu + (S - mu) * Rational::pow2(-depth));
}

std::vector<TowerComponent> TowerApprox::components(std::size_t limit) const {
  std::vector<Rational> rho(static_cast<std::size_t>(generation + 1));
  for (long g = 1; g <= generation; ++g) rho[g] = spec.ratio(g);
  std::vector<TowerComponent> out;
  std::vector<TowerComponent::Link> chain{{1, {0, 1}, 0, mpz_class(0)}};
  std::function<void(long, const Rational&, const Rational&)> rec = [&](long g, const Rational& a,
                                                                        const Rational& b) {
    if (g == generation) {
      if (out.size() >= limit) throw Error(ErrorCode::OutOfRange, "too many components to materialize");
      out.push_back(TowerComponent{g, {a, b}, rho[g] * (b - a), chain});
      return;
    }
    Geometry geo(a, b, rho[g], depth);
    walk(
        geo, 0, a, mpz_class(0), [](const Rational&, const Rational&) { return true; },
        [&](long level, const mpz_class& idx, const Rational& l, const Rational& r) {
          chain.push_back({g + 1, {l, r}, level, idx});
          rec(g + 1, l, r);
          chain.pop_back();
          return false;
        });
  };
  rec(1, 0, 1);
  return out;
}

std::variant<TowerComponent, NotFoundAtDepth> component_in(const TowerApprox& t, const Rational& lo,
                                                           const Rational& hi) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "component search needs a nondegenerate interval");
  Searcher s{t.spec, t.generation, t.depth, lo, hi, {}, {{1, {0, 1}, 0, mpz_class(0)}}, std::nullopt};
  s.rho.resize(static_cast<std::size_t>(t.generation + 1));
  for (long g = 1; g <= t.generation; ++g) s.rho[g] = t.spec.ratio(g);
  if (s.search(1, 0, 1)) return *s.found;
  return NotFoundAtDepth{t.generation, t.depth};
}

TowerLocation tower_locate(const TowerSpec& spec, const Rational& x, long maxgen, long depth) {
  if (x.sign() < 0 || x > Rational(1)) return {TowerLocation::Member, {}, 0};
  if (x.is_zero() || x == Rational(1)) return {TowerLocation::Member, {1}, 1};
  Rational a = 0, b = 1;
  for (long g = 1;; ++g) {
    if (g > maxgen || !spec.has_generation(g)) {
      // Inside an open hole of generation g - 1.
      if (!spec.has_generation(g)) return {TowerLocation::Member, {}, g - 1};
      return {TowerLocation::Unresolved, {}, g - 1};
    }
    Geometry geo(a, b, spec.ratio(g), depth);
    Rational left = a;
    bool descended = false;
    for (long m = 0; m < depth; ++m) {
      Rational hl = left + geo.L[m + 1];
      Rational hr = hl + geo.h[m + 1];
      if (x == hl || x == hr) {
        // Endpoint of a level-(m+1) hole: kept by generation g for good and
        // the span endpoint of the generation-(g+1) component in that hole.
        std::vector<long> gens{g};
        if (spec.has_generation(g + 1)) gens.push_back(g + 1);
        return {TowerLocation::Member, gens, g};
      }
      if (x < hl) continue;
      if (x < hr) {
        a = hl;
        b = hr;
        descended = true;
        break;
      }
      left = hr;
    }
    if (!descended) return {TowerLocation::Unresolved, {}, g};
  }
}

}  // namespace nwint
