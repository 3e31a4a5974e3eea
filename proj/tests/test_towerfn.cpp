#include <random>

#include "doctest.h"
#include "nwint/error.hpp"
#include "nwint/towerfn.hpp"
#include "oracles.hpp"

using namespace nwint;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Unsupported;
}

StepSeries gk(Rational theta = Rational(3, 2), Subsequence s = Subsequence::even()) {
  return StepSeries(TowerSpec::dyadic(), PowerRule{theta, s});
}

// Closed form of sum_{j>=1} (theta/2)^(stride j + offset) on the dyadic tower.
Rational geometric_l1(const Rational& theta, const Subsequence& s) {
  Rational r = theta / Rational(2);
  return pow(r, s.stride + s.offset) / (Rational(1) - pow(r, s.stride));
}

}  // namespace

TEST_CASE("subsequences") {
  CHECK(Subsequence::even().nth(1) == 2);
  CHECK(Subsequence::odd().nth(3) == 5);
  CHECK(Subsequence::odd().contains(7));
  CHECK_FALSE(Subsequence::odd().contains(4));
  CHECK(Subsequence::even().count_upto(9) == 4);
  CHECK(disjoint(Subsequence::even(), Subsequence::odd()));
  CHECK_FALSE(disjoint(Subsequence{3, 0}, Subsequence{2, 0}));
  CHECK(disjoint(Subsequence{4, 1}, Subsequence{4, 3}));
  CHECK(code_of([] { StepSeries(TowerSpec::dyadic(), LinearRule{{{1, PowerRule{Rational(3, 2), {2, 0}}},
                                                                   {1, PowerRule{Rational(3, 2), {3, 0}}}}}); }) ==
        ErrorCode::NotDisjoint);
}

TEST_CASE("eval verdicts") {
  auto s = gk();
  for (long b : {1L, 2L, 5L, 10L, 20L}) {
    auto r = eval(s, Rational(1, 2), b, b);
    CHECK(r.kind != EvalResult::Value);
  }
  CHECK(eval(s, Rational(0), 20, 20).kind == EvalResult::Zero);
  // 1/10 is not dyadic, so it is never a kept endpoint; the budget cannot decide it.
  CHECK(eval(s, Rational(1, 10), 20, 20).kind == EvalResult::Unknown);
  auto v = eval(s, Rational(3, 8), 20, 20);
  CHECK(v.kind == EvalResult::Value);
  CHECK(v.value == Rational(9, 4));
  auto all = StepSeries(TowerSpec::dyadic(), PowerRule{Rational(3, 2), Subsequence::all()});
  CHECK(eval(all, Rational(0), 5, 5).value == Rational(3, 2));
}

TEST_CASE("eval verdicts never contradict across budgets") {
  std::mt19937_64 rng(1);
  auto s = gk(Rational(5, 4), Subsequence::all());
  for (int t = 0; t < 300; ++t) {
    // Mix of dyadic points (which may be endpoints) and general rationals.
    Rational x = (t % 2) ? Rational(mpz_class(static_cast<long>(rng() % 1024)), mpz_class(1024))
                         : abs(oracle::random_rational(rng, 97, 97));
    if (x > Rational(1)) continue;
    std::optional<EvalResult> first;
    for (long b = 1; b <= 14; ++b) {
      auto r = eval(s, x, b, b);
      if (r.kind == EvalResult::Unknown) continue;
      if (!first) first = r;
      REQUIRE(r.kind == first->kind);
      REQUIRE(r.value == first->value);
    }
  }
}

TEST_CASE("l1 norm examples") {
  auto e = l1_norm(gk(), 40, 20);
  CHECK(e.contains(Rational(9, 7)));
  CHECK(e.width() <= Rational(1, 1000));
  auto zero = StepSeries(TowerSpec::dyadic(), LinearRule{{{0, PowerRule{Rational(3, 2), Subsequence::even()}}}});
  CHECK(l1_norm(zero, 10, 10) == Enclosure(0));
  auto mono = StepSeries(TowerSpec::factorial(), MonomialRule{{2}, {{Rational(1), {1}}}});
  Enclosure bound = (exp(Enclosure(2), 40) - Enclosure(1)) / Enclosure(2);
  auto m = l1_norm(mono, 40, 100);
  CHECK(Enclosure(Rational(0), bound.hi()).contains(m));
  CHECK(m.overlaps(bound));
  CHECK(code_of([] { l1_norm(gk(Rational(2)), 10, 10); }) == ErrorCode::DivergentTail);
  auto mono_dy = StepSeries(TowerSpec::dyadic(), MonomialRule{{2}, {{Rational(1), {1}}}});
  CHECK(code_of([&] { l1_norm(mono_dy, 10, 10); }) == ErrorCode::DivergentTail);
}

TEST_CASE("l1 norm contains closed forms and nests under refinement") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 40; ++t) {
    Rational theta(mpz_class(11 + static_cast<long>(rng() % 8)), mpz_class(10));
    Subsequence sub{1 + static_cast<long>(rng() % 3), 0};
    sub.offset = -static_cast<long>(rng() % sub.stride);
    auto s = gk(theta, sub);
    Rational exact = geometric_l1(theta, sub);
    Enclosure prev = l1_norm(s, 2, 2);
    for (long k = 3; k <= 30; k += 3) {
      Enclosure cur = l1_norm(s, k, k);
      REQUIRE(cur.contains(exact));
      REQUIRE(prev.contains(cur));
      prev = cur;
    }
  }
  // Factorial preset: depth refinement nests; values converge to (e^2 - 1)/2.
  auto mono = StepSeries(TowerSpec::factorial(), MonomialRule{{2}, {{Rational(1), {1}}}});
  Enclosure a = l1_norm(mono, 30, 10), b = l1_norm(mono, 30, 30);
  CHECK(a.contains(b));
}

TEST_CASE("unbounded witnesses") {
  auto s = gk();
  auto w = unbounded_witness(s, Rational(3, 8), Rational(5, 8), Rational(2), 20, 20);
  REQUIRE(std::holds_alternative<UnboundedWitness>(w));
  auto& uw = std::get<UnboundedWitness>(w);
  CHECK(uw.generation == 2);
  CHECK(uw.value == Rational(9, 4));
  CHECK(uw.component.span == Interval{Rational(3, 8), Rational(5, 8)});
  CHECK(uw.component_measure.contains(uw.component.mass));
  CHECK(uw.component.mass.sign() > 0);

  auto any = unbounded_witness(s, Rational(1, 10), Rational(1, 5), Rational(0), 20, 20);
  CHECK(std::holds_alternative<UnboundedWitness>(any));

  auto mono = StepSeries(TowerSpec::factorial(), MonomialRule{{3, 2}, {{Rational(1), {1, 0}}, {Rational(-1), {0, 1}}}});
  auto mw = unbounded_witness(mono, Rational::parse("0.3"), Rational::parse("0.31"), Rational(1000000), 20, 20);
  REQUIRE(std::holds_alternative<UnboundedWitness>(mw));
  auto& m = std::get<UnboundedWitness>(mw);
  CHECK(m.generation == 13);
  CHECK(m.value == Rational(1594323 - 8192));
  CHECK(m.generation >= dominance_index({1, -1}, {3, 2}).j0);
  CHECK(Rational::parse("0.3") <= m.component.span.left);
  CHECK(m.component.span.right <= Rational::parse("0.31"));

  auto inc = unbounded_witness(s, Rational(3, 8), Rational(5, 8), Rational(1000000), 3, 3);
  CHECK(std::holds_alternative<Inconclusive>(inc));
}

TEST_CASE("witness values exceed growing bounds") {
  auto s = gk();
  Rational M = 1;
  for (int e = 1; e <= 6; ++e) {
    M *= 10;
    auto w = unbounded_witness(s, Rational(1, 5), Rational(1, 4), M, 40, 24);
    REQUIRE(std::holds_alternative<UnboundedWitness>(w));
    auto& uw = std::get<UnboundedWitness>(w);
    CHECK(uw.value > M);
    CHECK(uw.component.span.left >= Rational(1, 5));
    // Self-validation: the chain links each span to a hole of its parent.
    for (std::size_t i = 1; i < uw.component.chain.size(); ++i) {
      const auto& parent = uw.component.chain[i - 1];
      const auto& link = uw.component.chain[i];
      CHECK(parent.span.left < link.span.left);
      CHECK(link.span.right < parent.span.right);
    }
  }
}

TEST_CASE("dominance index") {
  auto d = dominance_index({1, -1}, {3, 2});
  CHECK(d.j0 == 2);
  CHECK(d.tail_before == Rational(2));
  CHECK(d.half_lead_before == Rational(3, 2));
  auto single = dominance_index({5}, {7});
  CHECK(single.j0 == 1);
  CHECK_FALSE(single.tail_before.has_value());
  auto three = dominance_index({2, 1, 1}, {5, 3, 2});
  CHECK(three.j0 == 2);
  CHECK(three.tail_before == Rational(5));
  CHECK(three.half_lead_before == Rational(5));
  CHECK(three.tail_at == Rational(13));
  CHECK(three.half_lead_at == Rational(25));
  CHECK(code_of([] { dominance_index({1, 1}, {2, 3}); }) == ErrorCode::NotDominant);
  CHECK(code_of([] { dominance_index({1, 1}, {2, 2}); }) == ErrorCode::NotDominant);
}

TEST_CASE("dominance minimality and persistence on random inputs") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    int m = 1 + static_cast<int>(rng() % 4);
    std::vector<Rational> betas, thetas;
    Rational top(mpz_class(20 + static_cast<long>(rng() % 20)), mpz_class(4));
    for (int i = 0; i < m; ++i) {
      betas.push_back(oracle::random_rational(rng, 9, 4));
      if (betas.back().is_zero()) betas.back() = Rational(1);
      thetas.push_back(i == 0 ? top : top - Rational(mpz_class(1 + static_cast<long>(rng() % 19)), mpz_class(4)));
    }
    auto d = dominance_index(betas, thetas);
    auto holds = [&](long j) {
      Rational tail = 0;
      for (int i = 1; i < m; ++i) tail += abs(betas[i]) * pow(thetas[i], j);
      return tail < abs(betas[0]) * pow(thetas[0], j) / Rational(2);
    };
    if (d.j0 > 1) CHECK_FALSE(holds(d.j0 - 1));
    for (long j = d.j0; j < d.j0 + 10; ++j) CHECK(holds(j));
  }
}

TEST_CASE("distinct products") {
  CHECK(std::holds_alternative<ProductsVerified>(distinct_products_check({2, 3}, {{1, 0}, {0, 1}})));
  CHECK(std::holds_alternative<ProductsVerified>(distinct_products_check({2, 3}, {{2, 0}, {0, 1}})));
  auto c = distinct_products_check({2, 3}, {{1, 1}, {1, 1}});
  REQUIRE(std::holds_alternative<ProductsCollision>(c));
  CHECK(std::get<ProductsCollision>(c).product == 6);
  CHECK(code_of([] { distinct_products_check({2, 4}, {{1, 0}}); }) == ErrorCode::NonPrimeTheta);
  // With prime thetas, distinct rows always give distinct products.
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<long>> rows;
    for (int i = 0; i < 5; ++i) rows.push_back({static_cast<long>(rng() % 4), static_cast<long>(rng() % 4), static_cast<long>(rng() % 4)});
    bool dup = false;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) dup = dup || rows[i] == rows[j];
    CHECK(std::holds_alternative<ProductsCollision>(distinct_products_check({2, 3, 5}, rows)) == dup);
  }
}

TEST_CASE("basis inequality") {
  auto dy = TowerSpec::dyadic();
  std::vector<PowerRule> fam{{Rational(3, 2), Subsequence::even()}, {Rational(3, 2), Subsequence::odd()}};
  auto one = basis_inequality_check(dy, fam, {1}, 1, 30, 20);
  CHECK(one.holds);
  CHECK(one.left == one.right);
  auto two = basis_inequality_check(dy, fam, {1, 1}, 1, 30, 20);
  CHECK(two.holds);
  CHECK(two.left.contains(Rational(9, 7)));
  CHECK(two.difference.contains(geometric_l1(Rational(3, 2), Subsequence::odd())));
  auto neg = basis_inequality_check(dy, fam, {1, -5}, 1, 30, 20);
  CHECK(neg.holds);
  CHECK(neg.route == "direct");
  std::vector<PowerRule> bad{{Rational(3, 2), Subsequence::all()}, {Rational(3, 2), Subsequence::odd()}};
  CHECK(code_of([&] { basis_inequality_check(dy, bad, {1, 1}, 1, 10, 10); }) == ErrorCode::NotDisjoint);
}

TEST_CASE("nonzero combinations have a witness and an L1 norm away from 0") {
  std::mt19937_64 rng(12);
  auto dy = TowerSpec::dyadic();
  for (int t = 0; t < 30; ++t) {
    LinearRule lr;
    bool nonzero = false;
    for (long k = 0; k < 4; ++k) {
      Rational a = oracle::random_rational(rng, 3, 2);
      nonzero = nonzero || !a.is_zero();
      lr.parts.push_back({a, PowerRule{Rational(3, 2), Subsequence{4, -k}}});
    }
    if (!nonzero) continue;
    StepSeries s(dy, lr);
    CHECK(l1_norm(s, 20, 20).excludes_zero());
    CHECK(std::holds_alternative<UnboundedWitness>(unbounded_witness(s, Rational(1, 3), Rational(1, 2), Rational(100), 40, 24)));
  }
}

TEST_CASE("co-meager perturbation") {
  StepFunction zero;
  auto c = comeager_perturbation(zero, 1, 0, 1, Rational(3, 5));
  CHECK(c.J.length() == Rational(1, 10));
  CHECK(c.distance == Rational(1, 5));
  CHECK(c.distance <= Rational(3, 10));
  CHECK(c.holds);
  for (const Rational& R : {Rational(1, 100), Rational(1), Rational(5)}) {
    auto r = comeager_perturbation(zero, 1, 0, 1, R);
    CHECK(r.forced_excess > r.radius);
  }
  StepFunction half{{{{0, Rational(1, 2)}, Rational(1)}}};
  auto h = comeager_perturbation(half, 1, 0, 1, Rational(3, 5));
  CHECK(h.distance <= h.J.length() * Rational(3));
  CHECK(h.distance == Rational(1, 10));
  CHECK(h.holds);
  CHECK(code_of([&] { comeager_perturbation(zero, 1, 0, Rational(1, 20), Rational(3, 5)); }) ==
        ErrorCode::IntervalTooShort);
}
