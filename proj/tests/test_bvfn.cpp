#include <chrono>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nwint/bvfn.hpp"
#include "nwint/error.hpp"
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

// Reduced fractions in (0,1) listed by denominator, then numerator.
std::vector<Rational> farey_listing(std::size_t count) {
  std::vector<Rational> out;
  for (long d = 2; out.size() < count; ++d)
    for (long n = 1; n < d && out.size() < count; ++n)
      if (std::gcd(n, d) == 1) out.emplace_back(mpz_class(n), mpz_class(d));
  return out;
}

// Stern's diatomic sequence: cw(n) = s(n) / s(n+1).
std::vector<Rational> calkin_wilf_listing(std::size_t count) {
  std::vector<long> s{0, 1};
  std::vector<Rational> out;
  for (std::size_t n = 1; out.size() < count; ++n) {
    while (s.size() <= n + 1) {
      std::size_t m = s.size();
      s.push_back(m % 2 == 0 ? s[m / 2] : s[m / 2] + s[m / 2 + 1]);
    }
    if (s[n] < s[n + 1]) out.emplace_back(mpz_class(s[n]), mpz_class(s[n + 1]));
  }
  return out;
}

const std::vector<Rational>& listing() {
  static const auto l = farey_listing(20000);
  return l;
}

// sum_{i <= N, q_i < x} 2^-i from the independent listing.
Rational partial_sum(const Rational& x, long N) {
  Rational s = 0;
  for (long i = 1; i <= N; ++i)
    if (listing()[i - 1] < x) s += Rational::pow2(-i);
  return s;
}

ExpPoly ex(long l, long power = 1) {
  ExpPoly::Exponent e(static_cast<std::size_t>(l + 1), 0);
  e[l] = power;
  return ExpPoly::term(1, e);
}

Enclosure exp_oracle(const Rational& x) { return oracle::mpfr_bracket(oracle::Fn::Exp, x, 200); }

}  // namespace

TEST_CASE("enumeration orders against independent listings") {
  RationalEnum den;
  RationalEnum cw(RationalEnum::Order::CalkinWilf);
  auto cwl = calkin_wilf_listing(10000);
  CHECK(den.q(1) == Rational(1, 2));
  CHECK(den.q(2) == Rational(1, 3));
  CHECK(den.q(3) == Rational(2, 3));
  CHECK(den.q(4) == Rational(1, 4));
  CHECK(cw.q(1) == Rational(1, 2));
  CHECK(cw.q(2) == Rational(1, 3));
  CHECK(cw.q(5) == Rational(3, 5));
  for (long n = 1; n <= 10000; ++n) {
    REQUIRE(den.q(n) == listing()[n - 1]);
    REQUIRE(den.index(den.q(n)) == n);
    REQUIRE(cw.q(n) == cwl[n - 1]);
    REQUIRE(cw.index(cw.q(n)) == n);
  }
  CHECK(code_of([&] { den.index(Rational(1)); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { cw.index(Rational(-1, 2)); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { den.q(0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("for_each_in visits candidates in increasing index") {
  std::mt19937_64 rng(7);
  for (auto order : {RationalEnum::Order::Denominator, RationalEnum::Order::CalkinWilf}) {
    RationalEnum e(order);
    for (int t = 0; t < 20; ++t) {
      Rational a = oracle::random_dyadic(rng, 0.0, 0.9, 12);
      Rational b = a + oracle::random_dyadic(rng, 0.01, 0.1, 12);
      std::vector<long> seen;
      e.for_each_in(a, b, 2000, [&](long i, const Rational& q) {
        REQUIRE(e.q(i) == q);
        seen.push_back(i);
        return false;
      });
      std::vector<long> expect;
      for (long i = 1; i <= 2000; ++i)
        if (a <= e.q(i) && e.q(i) <= b) expect.push_back(i);
      CHECK(seen == expect);
    }
  }
}

TEST_CASE("shift points against MPFR") {
  for (long k = 1; k <= 20; ++k) {
    Enclosure v = shift_point(k, 100);
    CHECK(v.width() <= Rational::pow2(-100));
    Enclosure s = oracle::mpfr_bracket(oracle::Fn::Sqrt, Rational(2), 300) * Enclosure(Rational(k));
    Enclosure frac = s - Enclosure(Rational(floor(s.lo())));
    CHECK(v.overlaps(frac));
  }
  CHECK(shift_point(0, 64) == Enclosure(0));
}

TEST_CASE("eval_f examples and oracle") {
  JumpSeries f;
  for (long N : {1L, 5L, 30L}) {
    Enclosure one = eval_f(f, Rational(1), N);
    CHECK(one.contains(Rational(1)));
    CHECK(one.lo() >= Rational(1) - Rational::pow2(-N));
    Enclosure zero = eval_f(f, Rational(0), N);
    CHECK(zero.contains(Rational(0)));
    CHECK(zero.hi() <= Rational::pow2(-N));
  }
  CHECK(eval_f(f, Rational(1, 2), 2) == Enclosure(Rational(1, 4), Rational(1, 2)));

  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    Rational x = oracle::random_dyadic(rng, 0.0, 1.0, 20);
    long N = 1 + static_cast<long>(rng() % 60);
    Enclosure e = eval_f(f, x, N);
    Rational s = partial_sum(x, N);
    CHECK(e.lo() == s);
    CHECK(e.hi() <= s + Rational::pow2(-N));
    Rational deep = partial_sum(x, 2000);
    CHECK(e.overlaps(Enclosure(deep, deep + Rational::pow2(-2000))));
  }
}

TEST_CASE("f is monotone and left-continuous") {
  JumpSeries f;
  std::mt19937_64 rng(13);
  const long N = 40;
  Rational slack = Rational(2) * Rational::pow2(-N);
  for (int t = 0; t < 300; ++t) {
    Rational x = oracle::random_dyadic(rng, 0.0, 1.0, 24), y = oracle::random_dyadic(rng, 0.0, 1.0, 24);
    if (y < x) std::swap(x, y);
    CHECK(eval_f(f, x, N).hi() <= eval_f(f, y, N).lo() + slack);
  }
  RationalEnum e;
  for (long i = 1; i <= 30; ++i) {
    Rational q = e.q(i);
    Enclosure at = eval_f(f, q, N);
    Rational prev_gap = 1;
    for (long m = 8; m <= 40; m += 8) {
      Enclosure near = eval_f(f, q - Rational::pow2(-m), N);
      CHECK(near.hi() <= at.hi());
      Rational gap = at.lo() - near.lo();
      CHECK(gap <= prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap <= Rational::pow2(-20));
    // Right of q the jump 2^-i is present.
    CHECK(eval_f(f, q + Rational::pow2(-60), N).lo() >= at.lo() + Rational::pow2(-i));
  }
}

TEST_CASE("shifted series drops from 1 to 0 at the shift point") {
  JumpSeries fv{RationalEnum(), 1};
  Enclosure v = shift_point(1, 64);
  Rational below = v.lo() - Rational::pow2(-50), above = v.hi() + Rational::pow2(-50);
  CHECK(eval_f(fv, below, 50).lo() > Rational(99, 100));
  CHECK(eval_f(fv, above, 50).hi() < Rational(1, 100));
  // f_v(x) = f(x - v + 1) for x < v
  Rational x(1, 5);
  Enclosure direct = eval_f(JumpSeries{}, Enclosure(x) - v + Enclosure(1), 30);
  CHECK(eval_f(fv, x, 30).overlaps(direct));
}

TEST_CASE("exp polynomials merge and evaluate") {
  ExpPoly a = ex(0), b = ex(1);
  CHECK((a - a).is_zero());
  CHECK(!(a - b).is_zero());
  CHECK(ExpPoly::term(1, {0, 0}) == ExpPoly::constant(1));
  ExpPoly prod = a * b;
  CHECK(prod.terms().begin()->first == ExpPoly::Exponent{1, 1});
  Enclosure v = a.evaluate(Rational(1, 2), 100);
  CHECK(v.overlaps(exp_oracle(Rational(1, 2))));
  CHECK(v.width() <= Rational::pow2(-90));
  CHECK(basis_rate(1, 80).overlaps(oracle::mpfr_bracket(oracle::Fn::Sqrt, Rational(2), 200)));
  CHECK(basis_rate(3, 80).overlaps(oracle::mpfr_bracket(oracle::Fn::Sqrt, Rational(5), 200)));
  // sup bound of e^x over [0,1] is e
  Rational s = a.sup_bound();
  CHECK(s >= exp_oracle(Rational(1)).hi());
  CHECK(s <= Rational(272, 100));
  CHECK(code_of([] { JumpPolynomial({ExpPoly::constant(1) - ExpPoly::constant(1)}); }) ==
        ErrorCode::ZeroPolynomial);
}

TEST_CASE("jump examples") {
  RationalEnum e;
  JumpPolynomial f({ExpPoly::constant(1)});
  auto r1 = jump_enclosure(f, Rational(1, 2), 64, 128);
  CHECK(r1.jump == Enclosure(Rational(1, 2)));
  CHECK(r1.certified);
  auto r2 = jump_enclosure(f, Rational(1, 3), 64, 128);
  CHECK(r2.jump.contains(Rational(1, 4)));

  OneSided os = one_sided_limits(f, Rational(1, 2), 64, 128);
  CHECK((os.right - os.left).contains(Rational(1, 2)));

  JumpPolynomial exf({ex(0)});
  auto r3 = jump_enclosure(exf, Rational(1, 2), 64, 128);
  CHECK(r3.certified);
  CHECK(r3.jump.overlaps(exp_oracle(Rational(1, 2)) * Enclosure(Rational(1, 2))));
  CHECK(r3.jump.width() <= Rational::pow2(-60));

  JumpPolynomial f2({ExpPoly(), ExpPoly::constant(1)});
  auto r4 = jump_enclosure(f2, Rational(1, 2), 64, 128);
  Enclosure y = eval_f(JumpSeries{}, Rational(1, 2), 64);
  Enclosure expect = pow(y + Enclosure(Rational(1, 2)), 2) - pow(y, 2);
  CHECK(r4.certified);
  CHECK(r4.jump.overlaps(expect));
  CHECK(r4.p1.overlaps(Enclosure(2) * y));
}

TEST_CASE("jump exactness for f up to index 1000") {
  RationalEnum e;
  JumpPolynomial f({ExpPoly::constant(1)});
  for (long i = 1; i <= 1000; ++i) {
    auto r = jump_enclosure(f, e.q(i), 64, 128);
    REQUIRE(r.index == i);
    REQUIRE(r.certified);
    REQUIRE(r.jump.contains(Rational::pow2(-i)));
  }
}

TEST_CASE("P-form agrees with one-sided limits") {
  std::mt19937_64 rng(17);
  RationalEnum e;
  std::uniform_int_distribution<int> coef(-3, 3), deg(1, 3), idx(1, 400), basis(0, 2);
  for (int t = 0; t < 1000; ++t) {
    std::vector<ExpPoly> G(static_cast<std::size_t>(deg(rng)));
    for (auto& g : G)
      for (int m = 0; m < 2; ++m) g += ExpPoly::term(coef(rng), {0, basis(rng), basis(rng)});
    if (G.back().is_zero()) G.back() = ExpPoly::constant(1);
    JumpPolynomial g(G);
    Rational q = e.q(idx(rng));
    auto r = jump_enclosure(g, q, 64, 128);
    OneSided os = one_sided_limits(g, q, 64, 128);
    REQUIRE(r.jump.overlaps(os.right - os.left));
  }
}

TEST_CASE("jump search") {
  JumpPolynomial f({ExpPoly::constant(1)});
  RationalEnum e;
  std::mt19937_64 rng(19);
  for (int t = 0; t < 30; ++t) {
    Rational a = oracle::random_dyadic(rng, 0.01, 0.9, 16);
    Rational b = a + oracle::random_dyadic(rng, 0.001, 0.09, 16);
    auto res = jump_search(f, a, b);
    REQUIRE(std::holds_alternative<JumpFound>(res));
    long least = 0;
    for (long i = 1; !least; ++i)
      if (a <= e.q(i) && e.q(i) <= b) least = i;
    CHECK(std::get<JumpFound>(res).jump.index == least);
  }
  JumpPolynomial exf({ex(0)});
  auto res = jump_search(exf, Rational(1, 10), Rational(1, 5));
  REQUIRE(std::holds_alternative<JumpFound>(res));
  const auto& found = std::get<JumpFound>(res);
  CHECK(found.jump.q >= Rational(1, 10));
  CHECK(found.jump.q <= Rational(1, 5));
  mpz_class p2 = mpz_class(1) << found.jump.index;
  CHECK(found.epsilon_margin == Rational(1, 1000) - exf.bound_N() / Rational(mpz_class(p2 - 1)));
  CHECK(found.epsilon_route == (found.epsilon_margin.sign() > 0 && found.jump.p1.mig() >= Rational(1, 1000)));
  CHECK(code_of([&] { jump_search(f, Rational(1, 2), Rational(1, 2)); }) == ErrorCode::InvalidArgument);
  auto none = jump_search(f, Rational(1, 2) + Rational::pow2(-40), Rational(1, 2) + Rational::pow2(-39),
                          JumpSearchParams{Rational(1, 1000), 500, 64, 128});
  CHECK(std::holds_alternative<JumpInconclusive>(none));
}

TEST_CASE("jump density on a test family") {
  std::vector<JumpPolynomial> family{
      JumpPolynomial({ex(0)}),
      JumpPolynomial({ExpPoly(), ExpPoly::constant(1)}),
      JumpPolynomial({ex(1), ex(2)}),
      JumpPolynomial({ex(0) - ex(0, 2)}),
  };
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    Rational len = oracle::random_dyadic(rng, 0.001, 0.05, 30);
    Rational a = oracle::random_dyadic(rng, 0.0, 1.0, 30) * (Rational(1) - len);
    const auto& g = family[static_cast<std::size_t>(t) % family.size()];
    auto res = jump_search(g, a, a + len);
    REQUIRE(std::holds_alternative<JumpFound>(res));
    CHECK(std::get<JumpFound>(res).jump.certified);
  }
}

TEST_CASE("expansion examples") {
  GeneratorPolynomial sq{{{Rational(1), {2}}}, {}};
  auto g = expand_generator_polynomial(sq);
  CHECK(g.degree() == 2);
  CHECK(g.coefficients()[0].is_zero());
  CHECK(g.coefficients()[1] == ex(1, 2));

  GeneratorPolynomial mixed{{{Rational(1), {1, 1}}}, {}};
  auto h = expand_generator_polynomial(mixed);
  CHECK(h.degree() == 2);
  CHECK(h.coefficients()[1] == ExpPoly::term(1, {0, 1, 1}));

  GeneratorPolynomial diff{{{Rational(1), {1, 0}}, {Rational(-1), {0, 1}}}, {}};
  auto d = expand_generator_polynomial(diff);
  CHECK(d.degree() == 1);
  CHECK(d.coefficients()[0] == ex(1) - ex(2));

  GeneratorPolynomial cancel{{{Rational(1), {1, 0}}, {Rational(-1), {1, 0}}}, {}};
  CHECK(code_of([&] { expand_generator_polynomial(cancel); }) == ErrorCode::ZeroPolynomial);
  GeneratorPolynomial constant{{{Rational(3), {0, 0}}, {Rational(1), {1, 0}}}, {}};
  CHECK(code_of([&] { expand_generator_polynomial(constant); }) == ErrorCode::ConstantTermPresent);
}

TEST_CASE("faithfulness on a reduced generator family") {
  // Degree <= 2 in 2 generators, coefficients in {-1, 0, 1}.
  std::vector<std::vector<long>> monos{{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  long certified = 0, zero = 0;
  for (int code = 0; code < 243; ++code) {
    GeneratorPolynomial p;
    int c = code;
    bool nonzero = false;
    for (const auto& m : monos) {
      int lambda = c % 3 - 1;
      c /= 3;
      if (lambda) nonzero = true;
      p.monomials.push_back({Rational(lambda), m});
    }
    if (!nonzero) {
      CHECK(code_of([&] { expand_generator_polynomial(p); }) == ErrorCode::ZeroPolynomial);
      ++zero;
      continue;
    }
    auto g = expand_generator_polynomial(p);
    auto res = jump_search(g, Rational(1, 4), Rational(3, 4));
    REQUIRE(std::holds_alternative<JumpFound>(res));
    ++certified;
  }
  CHECK(certified == 242);
  CHECK(zero == 1);
}

TEST_CASE("densify") {
  auto d1 = densify(ExpPoly::constant(1));
  for (long i = 1; i <= 20; ++i) {
    RationalEnum e;
    CHECK(jump_enclosure(d1.jump_part, e.q(i), 64, 128).jump.contains(Rational::pow2(-i)));
  }
  auto d2 = densify(ex(0));
  CHECK(jump_enclosure(d2.jump_part, Rational(1, 2), 64, 128)
            .jump.overlaps(exp_oracle(Rational(1, 2)) * Enclosure(Rational(1, 2))));
  auto d3 = densify(ex(0) - ex(0, 2));
  RationalEnum e;
  for (long i = 1; i <= 50; ++i) {
    Rational q = e.q(i);
    auto r = jump_enclosure(d3.jump_part, q, 64, 128);
    CHECK(r.certified);
    Enclosure expect = (exp_oracle(q) - exp_oracle(Rational(2) * q)) * Enclosure(Rational::pow2(-i));
    CHECK(r.jump.overlaps(expect));
  }
  CHECK(code_of([] { densify(ExpPoly()); }) == ErrorCode::ZeroInput);
}

TEST_CASE("variation bounds") {
  auto vf = variation_bounds({{Rational(1), 0}}, 30);
  CHECK(vf.lower == Rational(1) - Rational::pow2(-30));
  REQUIRE(vf.upper);
  CHECK(*vf.upper == Rational(1));
  CHECK(vf.upper_kind == "monotone");

  auto vd = variation_bounds({{Rational(1), 1}, {Rational(-1), 2}});
  CHECK(vd.lower >= Rational(1));

  auto v = variation_bounds({{Rational(2), 1}, {Rational(3), 2}});
  CHECK(v.lower >= Rational(5));
  REQUIRE(v.upper);
  CHECK(*v.upper <= Rational(15));
  CHECK(code_of([] { variation_bounds({{Rational(1), 1}, {Rational(2), 1}}); }) == ErrorCode::InvalidArgument);

  // The probe jump of a shift is visible through eval_f: the sum just left of
  // v_1 minus just right of v_1 is about 2 (f_{v_2} is continuous there).
  Enclosure v1 = shift_point(1, 80);
  Rational l = v1.lo() - Rational::pow2(-60), r = v1.hi() + Rational::pow2(-60);
  auto h = [&](const Rational& x) {
    return Enclosure(2) * eval_f(JumpSeries{RationalEnum(), 1}, x, 60) +
           Enclosure(3) * eval_f(JumpSeries{RationalEnum(), 2}, x, 60);
  };
  CHECK((h(l) - h(r)).lo() > Rational(199, 100));

  JumpPolynomial g({ExpPoly::constant(1)});
  RationalEnum e;
  std::vector<Rational> probes;
  for (long i = 1; i <= 20; ++i) probes.push_back(e.q(i));
  auto vg = variation_bounds(g, probes, 64, 128);
  CHECK(vg.lower == Rational(1) - Rational::pow2(-20));
  CHECK(vg.upper_kind == "monotone");
}
