#include <chrono>
#include <functional>
#include <random>

#include "app/commands.hpp"
#include "nwint/error.hpp"

namespace nwint::app {

namespace {

struct Check {
  bool certified;
  json payload;
};

// Dyadic rational with `bits` fractional bits, uniform in [lo, hi).
Rational dyadic(std::mt19937_64& rng, double lo, double hi, int bits) {
  const double scale = std::ldexp(1.0, bits);
  auto a = static_cast<unsigned long>(lo * scale), b = static_cast<unsigned long>(hi * scale);
  return Rational(mpz_class(a + rng() % (b - a)), mpz_class(1)) * Rational::pow2(-bits);
}

// Nonzero p/q with |p| <= maxnum and 1 <= q <= maxden.
Rational small_rational(std::mt19937_64& rng, long maxnum, long maxden) {
  long p = 1 + static_cast<long>(rng() % maxnum), q = 1 + static_cast<long>(rng() % maxden);
  return Rational(rng() % 2 ? p : -p, q);
}

ExpPoly rate(long l) {
  ExpPoly::Exponent e(static_cast<std::size_t>(l + 1), 0);
  e[l] = 1;
  return ExpPoly::term(1, e);
}

Check c1() {
  auto dy = TowerSpec::dyadic();
  json gens = json::array();
  bool ok = true;
  for (long j = 1; j <= 6; ++j) {
    Enclosure m = tower_generation(dy, j, 12).measure_enclosure();
    ok = ok && m.contains(Rational::pow2(-j)) && m.width() <= Rational::pow2(-12) * dy.available(j);
    gens.push_back({{"generation", j}, {"mass", to_json(Rational::pow2(-j))}, {"measure", to_json(m)}});
  }
  return {ok, {{"depth", 12}, {"generations", gens}}};
}

Check c2() {
  StepSeries s(TowerSpec::dyadic(), PowerRule{Rational(3, 2), Subsequence::even()});
  Enclosure e = l1_norm(s, 40, 20);
  Rational truth(9, 7);
  return {e.contains(truth) && e.width() <= Rational(1, 1000),
          {{"norm", "l1"}, {"expected", to_json(truth)}, {"enclosure", to_json(e)}}};
}

Check c3() {
  StepSeries s(TowerSpec::dyadic(), PowerRule{Rational(3, 2), Subsequence::even()});
  std::mt19937_64 rng(3);
  Rational M(1000000);
  json found = json::array();
  bool ok = true;
  for (int t = 0; t < 20 && ok; ++t) {
    Rational len = dyadic(rng, 0.01, 0.2, 20);
    Rational lo = dyadic(rng, 0.0, 1.0, 20) * (Rational(1) - len), hi = lo + len;
    auto w = unbounded_witness(s, lo, hi, M, 40, 24);
    const auto* u = std::get_if<UnboundedWitness>(&w);
    ok = u && u->value == pow(Rational(3, 2), u->generation) && u->value > M && lo <= u->component.span.left &&
         u->component.span.right <= hi && u->component_measure.lo().sign() > 0;
    json entry{{"interval", {to_json(lo), to_json(hi)}}};
    if (u) {
      entry["generation"] = u->generation;
      entry["value"] = to_json(u->value);
      entry["span"] = to_json(u->component.span);
      entry["measure"] = to_json(u->component_measure);
    }
    found.push_back(entry);
  }
  return {ok, {{"bound", to_json(M)}, {"witnesses", found}}};
}

Check c4() {
  std::vector<std::pair<std::vector<Rational>, std::vector<Rational>>> cases{{{1, -1}, {3, 2}}, {{2, 1, 1}, {5, 3, 2}}};
  json out = json::array();
  bool ok = true;
  for (const auto& [b, th] : cases) {
    auto d = dominance_index(b, th);
    ok = ok && d.j0 == 2 && d.tail_at < d.half_lead_at && d.tail_before && !(*d.tail_before < *d.half_lead_before);
    out.push_back({{"j0", d.j0}, {"tail", to_json(d.tail_at)}, {"half_lead", to_json(d.half_lead_at)},
                   {"tail_before", d.tail_before ? to_json(*d.tail_before) : json(nullptr)},
                   {"half_lead_before", d.half_lead_before ? to_json(*d.half_lead_before) : json(nullptr)}});
  }
  return {ok, {{"dominance", out}}};
}

Check c5() {
  Rational R(3, 5);
  auto c = comeager_perturbation(StepFunction{}, 1, 0, 1, R);
  bool ok = c.holds && c.distance <= c.half_R && c.forced_excess > c.radius;
  return {ok, {{"R", to_json(R)}, {"J", to_json(c.J)}, {"distance", to_json(c.distance)}, {"half_R", to_json(c.half_R)},
               {"forced_excess", to_json(c.forced_excess)}, {"radius", to_json(c.radius)}}};
}

Check c6() {
  RationalEnum e;
  JumpPolynomial f({ExpPoly::constant(1)});
  json sample = json::array();
  for (long i = 1; i <= 1000; ++i) {
    auto r = jump_enclosure(f, e.q(i), 64, 128);
    if (!r.certified || !r.jump.contains(Rational::pow2(-i))) return {false, {{"failed_index", i}}};
    if (i <= 4) sample.push_back({{"index", i}, {"q", to_json(r.q)}, {"jump", to_json(r.jump)}});
  }
  return {true, {{"indices", 1000}, {"first", sample}}};
}

Check c7() {
  auto v = variation_bounds({{Rational(2), 1}, {Rational(3), 2}});
  bool ok = v.lower >= Rational(5) && v.upper && *v.upper <= Rational(15);
  return {ok, {{"lower", to_json(v.lower)}, {"upper", v.upper ? to_json(*v.upper) : json(nullptr)}}};
}

Check c8() {
  std::vector<JumpPolynomial> family{JumpPolynomial({rate(0)}), JumpPolynomial({ExpPoly(), ExpPoly::constant(1)}),
                                     JumpPolynomial({rate(1), rate(2)})};
  std::mt19937_64 rng(8);
  long worst = 0, searches = 0;
  for (const auto& g : family)
    for (int t = 0; t < 50; ++t, ++searches) {
      Rational len = dyadic(rng, 0.001, 0.05, 30);
      Rational a = dyadic(rng, 0.0, 1.0, 30) * (Rational(1) - len);
      auto res = jump_search(g, a, a + len, JumpSearchParams{Rational(1, 1000), 100000, 64, 128});
      const auto* f = std::get_if<JumpFound>(&res);
      if (!f || f->jump.q < a || f->jump.q > a + len || !f->jump.jump.excludes_zero())
        return {false, {{"failed_search", searches}, {"interval", {to_json(a), to_json(a + len)}}}};
      worst = std::max(worst, f->jump.index);
    }
  return {true, {{"searches", searches}, {"largest_index", worst}}};
}

Check c9(bool full) {
  std::vector<std::vector<long>> monos;
  for (long d = 1; d <= 3; ++d)
    for (long a = 0; a <= d; ++a) monos.push_back({a, d - a});
  long certified = 0, zero = 0, checked = 0, total = 0;
  std::vector<int> digits(monos.size(), -2);
  for (;; ++total) {
    bool nonzero = std::any_of(digits.begin(), digits.end(), [](int d) { return d != 0; });
    if (full || !nonzero || total % 97 == 0) {
      ++checked;
      GeneratorPolynomial p;
      for (std::size_t m = 0; m < monos.size(); ++m) p.monomials.push_back({Rational(digits[m]), monos[m]});
      bool cert = false;
      try {
        cert = std::holds_alternative<JumpFound>(jump_search(expand_generator_polynomial(p), Rational(0), Rational(1)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroPolynomial) throw;
      }
      if (cert != nonzero) return {false, {{"mismatch_at", total}}};
      (cert ? certified : zero)++;
    }
    std::size_t m = 0;
    while (m < digits.size() && digits[m] == 2) digits[m++] = -2;
    if (m == digits.size()) break;
    ++digits[m];
  }
  return {zero == 1 && certified == checked - 1,
          {{"assignments", total + 1}, {"checked", checked}, {"sampled", !full}, {"certified", certified}, {"zero", zero}}};
}

Check c10() {
  Oscillator o;
  Enclosure k = kurzweil_integral(o, Enclosure(0), Enclosure(1), 64);
  bool ok = k.contains(Rational(0)) && k.width() <= Rational(1, 1000000000);
  json rows = json::array();
  std::vector<Enclosure> eps;
  for (long n = 1; n <= 20; ++n) eps.emplace_back(Rational::pow2(-n));
  for (const auto& row : hake_table(o, eps, 64)) {
    Rational e = row.eps.hi();
    ok = ok && row.value.mag() <= Rational(4) * e * e;
    rows.push_back({{"eps", to_json(e)}, {"value", to_json(row.value)}});
  }
  return {ok, {{"integral", to_json(k)}, {"hake", rows}}};
}

Check c11() {
  Oscillator o;
  auto w1 = nonlebesgue_witness(o, Rational(1));
  auto w4 = nonlebesgue_witness(o, Rational(4));
  bool ok = w1.K == 1 && w1.sum == Rational(16, 15) && w4.K == 10 && w4.sum_before < Rational(4) && Rational(4) <= w4.sum;
  return {ok, {{"M1", {{"K", w1.K}, {"sum", to_json(w1.sum)}}},
               {"M4", {{"K", w4.K}, {"sum", to_json(w4.sum)}, {"sum_before", to_json(w4.sum_before)}}}}};
}

Check c12() {
  Rational tol(1, 1000);
  auto single = [](long k, Rational a) { return OscCombination{{{k, std::move(a)}}}; };
  Enclosure n1 = alexiewicz_norm(single(1, 1), tol);
  bool ok = n1.lo() >= Rational(68, 100) && n1.hi() <= Rational(69, 100);
  json scaled = json::array();
  for (long k = 2; k <= 5; ++k) {
    Enclosure nk = alexiewicz_norm(single(k, 1), tol);
    ok = ok && abs(nk.mid() - n1.mid()) <= Rational(2) * tol;
    scaled.push_back(to_json(nk));
  }
  std::mt19937_64 rng(12);
  long combos = 0;
  for (int t = 0; t < 10; ++t) {
    OscCombination c;
    Rational biggest = 0;
    for (long k = 1; k <= 5; ++k) {
      if (rng() % 3 == 0) continue;
      Rational a = small_rational(rng, 6, 2);
      c.alphas[k] = a;
      biggest = max(biggest, abs(a));
    }
    if (c.alphas.empty()) continue;
    ++combos;
    Enclosure n = alexiewicz_norm(c, tol);
    ok = ok && abs(n.mid() - biggest * n1.mid()) <= Rational(2) * tol * (Rational(1) + biggest);
  }
  return {ok, {{"tolerance", to_json(tol)}, {"single", to_json(n1)}, {"rescaled", scaled}, {"combinations", combos}}};
}

Check c13() {
  auto dy = TowerSpec::dyadic();
  std::vector<PowerRule> fam;
  for (long o = 0; o < 6; ++o) fam.push_back({Rational(3, 2), Subsequence{6, -o}});
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    std::size_t m2 = 2 + rng() % 5;
    std::size_t m1 = 1 + rng() % (m2 - 1);
    std::vector<Rational> a;
    for (std::size_t k = 0; k < m2; ++k) a.push_back(small_rational(rng, 5, 3));
    auto r = basis_inequality_check(dy, std::vector<PowerRule>(fam.begin(), fam.begin() + m2), a, m1, 30, 20);
    if (!r.holds) return {false, {{"failed_vector", t}}};
  }
  return {true, {{"vectors", 100}, {"basis_constant", 1}}};
}

Check c14() {
  std::mt19937_64 rng(14);
  Rational h = Rational::pow2(-24);
  for (int t = 0; t < 1000; ++t) {
    Rational x = dyadic(rng, 0.02, 0.98, 30);
    if (!derivative_check(Oscillator{}, x, h, 80).consistent) return {false, {{"failed_point", to_json(x)}}};
  }
  return {true, {{"points", 1000}, {"h", to_json(h)}}};
}

}  // namespace

json checklist(bool full) {
  struct Entry {
    int id;
    const char* name;
    const char* claim;
    std::function<Check()> run;
  };
  const std::vector<Entry> all{
      {1, "measure recursion", "measure-enclosure", c1},
      {2, "integral formula", "norm-enclosure", c2},
      {3, "nowhere essential boundedness", "unbounded", c3},
      {4, "dominance", "unbounded", c4},
      {5, "perturbation", "perturbation", c5},
      {6, "jump exactness", "jump-nonzero", c6},
      {7, "shift-family variation", "norm-enclosure", c7},
      {8, "jump density", "jump-dense-sample", c8},
      {9, "free-generator faithfulness", "jump-dense-sample", [full] { return c9(full); }},
      {10, "Kurzweil integral", "non-lebesgue", c10},
      {11, "non-Lebesgue witness", "non-lebesgue", c11},
      {12, "Alexiewicz norm", "norm-enclosure", c12},
      {13, "basic-sequence inequalities", "basis-inequality", c13},
      {14, "finite-difference consistency", "non-lebesgue", c14},
  };
  json out = json::array();
  for (const auto& e : all) {
    auto start = std::chrono::steady_clock::now();
    json setup{{"checklist", e.id}, {"full", full && e.id == 9}};
    json entry;
    try {
      Check c = e.run();
      entry = certificate(e.claim, c.certified, std::move(c.payload), fnv1a_hex(setup.dump()), setup);
    } catch (const Error& err) {
      entry = {{"claim", e.claim}, {"error", {{"code", error_code_name(err.code())}, {"message", err.what()}}}};
    }
    entry["criterion"] = e.id;
    entry["name"] = e.name;
    entry["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace nwint::app
