#pragma once

// Fat Cantor sets with hole schedule h_n = 2R 4^-n, and towers of them: each
// generation fills every hole of the previous generation's components.
//
// A tower is never materialized as a whole (generation j has infinitely many
// components, and already (2^d - 1)^(j-1) at depth d). Measures come from
// closed forms and geometry queries walk the component tree lazily.

#include <optional>
#include <variant>
#include <vector>

#include "nwint/enclosure.hpp"
#include "nwint/interval_set.hpp"

namespace nwint {

struct CantorSpec {
  Rational a, b, mass;
  /// Throws InfeasibleMass unless a < b and 0 < mass < b - a.
  CantorSpec(Rational a, Rational b, Rational mass);
  Rational length() const { return b - a; }
  Rational removed() const { return length() - mass; }
  /// Length of each hole removed at level n >= 1.
  Rational hole_length(long n) const;
  /// Length of each kept interval at level n >= 0.
  Rational kept_length(long n) const;
};

struct CantorApprox {
  CantorSpec spec;
  long depth;
  IntervalSet kept;
  std::vector<IntervalSet> holes;  // holes[n - 1] = the 2^(n-1) holes of level n
  /// [mass, measure(kept)]; the upper end equals mass + R 2^-depth.
  Enclosure measure_enclosure() const;
};

CantorApprox cantor_approx(const CantorSpec& spec, long depth);

class TowerSpec {
 public:
  enum class Preset { Dyadic, Factorial, Explicit };

  static TowerSpec dyadic();
  static TowerSpec factorial();
  /// Finitely many generations; throws InfeasibleMass on a non-positive mass
  /// or when some generation would need ratio >= 1.
  static TowerSpec explicit_masses(std::vector<Rational> masses);

  Preset preset() const { return preset_; }
  const std::vector<Rational>& explicit_list() const { return masses_; }
  /// Number of generations, or nullopt when unbounded.
  std::optional<long> generations() const;
  bool has_generation(long j) const;

  /// mu_j. Throws OutOfRange past the last generation.
  Rational mass(long j) const;
  /// S_j: span length minus the masses of generations before j.
  Rational available(long j) const;
  /// rho_j = mu_j / S_j, the mass fraction each hole receives.
  Rational ratio(long j) const;

 private:
  Preset preset_ = Preset::Dyadic;
  std::vector<Rational> masses_;
};

/// One Cantor component of a tower, plus the chain of spans leading to it
/// from generation 1 (chain.back() is the component itself).
struct TowerComponent {
  long generation;
  Interval span;
  Rational mass;
  struct Link {
    long generation;
    Interval span;
    long hole_level;  // level of the hole in the parent that this span fills; 0 for generation 1
    mpz_class hole_index;
  };
  std::vector<Link> chain;
  /// Measure of the component's depth-d approximation around its true mass.
  Enclosure measure_enclosure(long depth) const;
};

struct TowerApprox {
  TowerSpec spec;
  long generation;
  long depth;
  /// [mu_j, mu_j + (S_j - mu_j) 2^-d]: the measure of every generation-j
  /// component kept at depth d, summed over all of them in closed form.
  Enclosure measure_enclosure() const;
  /// Components filling holes of level <= depth, left to right. Throws
  /// OutOfRange when more than `limit` would be produced.
  std::vector<TowerComponent> components(std::size_t limit = 100000) const;
};

/// Throws DepthTooSmall if d < 1, InfeasibleMass if the generation is not
/// feasible, OutOfRange if the tower has fewer generations.
TowerApprox tower_generation(const TowerSpec& spec, long j, long d);

struct NotFoundAtDepth {
  long generation;
  long depth;
};

/// Leftmost generation-j component (holes of level <= depth at every
/// ancestor) whose span lies inside [lo, hi].
std::variant<TowerComponent, NotFoundAtDepth> component_in(const TowerApprox& t, const Rational& lo,
                                                           const Rational& hi);

/// Where a point sits in the tower at a finite budget.
struct TowerLocation {
  enum Kind {
    Member,     // x is in exactly the listed generations (possibly none)
    Unresolved  // x is inside a kept interval at the depth limit, or past maxgen
  } kind;
  std::vector<long> generations;
  long deepest_generation = 0;  // generation reached during the descent
};

TowerLocation tower_locate(const TowerSpec& spec, const Rational& x, long maxgen, long depth);

}  // namespace nwint
