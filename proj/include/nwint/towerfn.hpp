#pragma once

// Step series sum_g c_g chi_{A_g} over the generations of a tower.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nwint/cantor.hpp"

namespace nwint {

/// Generations n_j = stride * j + offset for j >= 1.
struct Subsequence {
  long stride = 1;
  long offset = 0;

  static Subsequence all() { return {1, 0}; }
  static Subsequence even() { return {2, 0}; }
  static Subsequence odd() { return {2, -1}; }

  long nth(long j) const { return stride * j + offset; }
  bool contains(long g) const;
  /// Number of j with n_j <= g.
  long count_upto(long g) const;
  friend bool operator==(const Subsequence&, const Subsequence&) = default;
};

/// theta^g on the generations of a subsequence.
struct PowerRule {
  Rational theta;
  Subsequence subseq;
};

/// sum_i beta_i Theta_i^g with Theta_i = prod_l thetas[l]^k[l].
struct MonomialRule {
  struct Row {
    Rational beta;
    std::vector<long> k;
  };
  std::vector<long> thetas;
  std::vector<Row> rows;
  mpz_class product(std::size_t row) const;
};

/// sum_k a_k g_k for power series g_k with pairwise disjoint subsequences.
struct LinearRule {
  std::vector<std::pair<Rational, PowerRule>> parts;
};

using StepRule = std::variant<PowerRule, MonomialRule, LinearRule>;

class StepSeries {
 public:
  /// Validates the rule: theta > 1, subsequences starting at n_1 >= 1,
  /// monomial thetas > 1 with non-negative exponent rows that are not all
  /// zero, linear parts pairwise disjoint (NotDisjoint).
  StepSeries(TowerSpec tower, StepRule rule);

  const TowerSpec& tower() const { return tower_; }
  const StepRule& rule() const { return rule_; }
  /// The exact value c_g on generation g.
  Rational coefficient(long g) const;

 private:
  TowerSpec tower_;
  StepRule rule_;
};

bool disjoint(const Subsequence& a, const Subsequence& b);

struct EvalResult {
  enum Kind { Value, Zero, Unknown } kind;
  Rational value;
  TowerLocation location;
};

EvalResult eval(const StepSeries& s, const Rational& x, long maxgen, long depth);

/// Enclosure of the L1 norm: exact terms through `terms` subsequence entries
/// (generations, for monomial rules), each weighted by the depth-d generation
/// measure enclosure, plus an analytic tail bound. Throws DivergentTail.
Enclosure l1_norm(const StepSeries& s, long terms, long depth);

struct UnboundedWitness {
  long generation;
  Rational value;
  TowerComponent component;
  Enclosure component_measure;
};

struct Inconclusive {
  std::string reason;
};

std::variant<UnboundedWitness, Inconclusive> unbounded_witness(const StepSeries& s, const Rational& lo,
                                                               const Rational& hi, const Rational& bound,
                                                               long maxgen, long depth);

struct DominanceCertificate {
  long j0;
  // Tail sum and half of the leading term at j0 (holds) and at j0 - 1
  // (fails; absent when j0 = 1).
  Rational tail_at, half_lead_at;
  std::optional<Rational> tail_before, half_lead_before;
};

/// Throws NotDominant unless thetas[0] is strictly largest, InvalidArgument
/// on beta_1 = 0, non-positive thetas or mismatched sizes.
DominanceCertificate dominance_index(const std::vector<Rational>& betas, const std::vector<Rational>& thetas);

struct ProductsVerified {
  std::vector<mpz_class> products;
};
struct ProductsCollision {
  std::size_t row, other;
  mpz_class product;
};

/// Throws NonPrimeTheta unless the thetas are pairwise distinct primes.
std::variant<ProductsVerified, ProductsCollision> distinct_products_check(const std::vector<long>& thetas,
                                                                         const std::vector<std::vector<long>>& rows);

struct BasisResult {
  bool holds;
  std::string route;  // "direct" or "difference"
  Enclosure left, right, difference;
};

/// Compares ||sum_{k<=m1} a_k g_k||_1 with ||sum_{k<=m2} a_k g_k||_1 where
/// m2 = a.size(), using additivity over disjoint supports.
BasisResult basis_inequality_check(const TowerSpec& tower, const std::vector<PowerRule>& family,
                                   const std::vector<Rational>& a, std::size_t m1, long terms, long depth);

/// Finite step function on [0,1]: value on each piece, 0 elsewhere.
struct StepFunction {
  struct Piece {
    Interval where;
    Rational value;
  };
  std::vector<Piece> pieces;  // sorted, interior-disjoint
  Rational sup_abs_on(const Rational& lo, const Rational& hi) const;
  /// Exact integral of |g - h| over [0,1].
  static Rational l1_distance(const StepFunction& g, const StepFunction& h);
};

struct PerturbationCertificate {
  Interval J;
  StepFunction g;
  Rational distance;       // ||g - f||_1, exact
  Rational half_R;         // R / 2
  Rational forced_excess;  // m(J) N = R / 6
  Rational radius;         // R / 7
  bool holds;
};

/// Throws IntervalTooShort when |I| < R/(6N); InvalidArgument when N, R are
/// not positive or |f| exceeds N on I.
PerturbationCertificate comeager_perturbation(const StepFunction& f, const Rational& N, const Rational& lo,
                                              const Rational& hi, const Rational& R);

}  // namespace nwint
