#include <gmpxx.h>

#include <json.hpp>
#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "nwint/nwint.h"

using json = nlohmann::json;

namespace {

mpq_class q(const json& j) {
  mpq_class r(j.get<std::string>());
  r.canonicalize();
  return r;
}

struct Spec {
  nwint_spec* p = nullptr;
  nwint_status status;
  explicit Spec(const std::string& text) : status(nwint_spec_from_json(text.c_str(), &p)) {}
  ~Spec() { nwint_spec_free(p); }
};

struct Call {
  nwint_status status;
  json doc;
  std::string text;
};

template <class F>
Call call(F&& f) {
  char* out = nullptr;
  nwint_status s = f(&out);
  Call c{s, json(), out ? out : ""};
  if (out) c.doc = json::parse(out);
  nwint_string_free(out);
  return c;
}

const char* kOsc = R"({"kind":"oscillator-combination","alphas":{"1":"1"}})";
const char* kGk = R"({"kind":"tower-series","tower":"dyadic","rule":{"power":{"theta":"3/2","subseq":"even"}}})";

json strip_seconds(json report) {
  for (auto& e : report["entries"]) e.erase("seconds");
  return report;
}

}  // namespace

TEST_CASE("malformed specs are rejected with a diagnostic") {
  for (const char* text : {"{", "[]", R"({"kind":"mystery"})", R"({"kind":"tower-series","tower":"dyadic"})",
                           R"({"kind":"oscillator-combination","alphas":{"0":"1"}})",
                           R"({"kind":"tower-series","tower":"dyadic","rule":{"power":{"theta":"x"}}})",
                           R"({"kind":"step-function","pieces":[{"from":"1/2","to":"1/4","value":"1"}]})",
                           R"({"kind":"jump-polynomial","degree":3,"G":[{"terms":[{"c":"1","exp":[0]}]}]})",
                           R"({"kind":"oscillator-combination","alphas":{"1":"1"},"budget":{"maxgen":0}})"}) {
    Spec s(text);
    CHECK_MESSAGE(s.status == NWINT_INVALID_SPEC, text);
    CHECK(s.p == nullptr);
    CHECK(std::string(nwint_last_error()).size() > 0);
  }
}

TEST_CASE("module errors keep their own status") {
  Spec s(R"({"kind":"tower-series","tower":{"masses":["3/2"]},"rule":{"power":{"theta":"3/2"}}})");
  CHECK(s.status == NWINT_INFEASIBLE_MASS);
  Spec g(kGk);
  REQUIRE(g.status == NWINT_OK);
  auto c = call([&](char** o) { return nwint_norm(g.p, "alexiewicz", nullptr, o); });
  CHECK(c.status == NWINT_UNSUPPORTED);
  CHECK(c.text.empty());
  CHECK(nwint_spec_set_budget(g.p, "colour=3") == NWINT_INVALID_SPEC);
  CHECK(nwint_spec_set_budget(g.p, "depth=-1") == NWINT_INVALID_SPEC);
  CHECK(nwint_spec_set_budget(g.p, "depth=12,tolerance=1/100") == NWINT_OK);
  CHECK(std::string(nwint_status_name(NWINT_INCONCLUSIVE)) == "InconclusiveAtBudget");
}

TEST_CASE("non-Lebesgue witness on the unit oscillator copy") {
  Spec s(kOsc);
  auto c = call([&](char** o) { return nwint_certify(s.p, "non-lebesgue", R"({"bound":"4"})", o); });
  REQUIRE(c.status == NWINT_OK);
  CHECK(c.doc["verdict"] == "Certified");
  const json& p = c.doc["payload"];
  // Least K with sum_{k<=K} (2/(2k+1) + 2/(2k+3)) >= 4, summed here in doubles.
  double sum = 0;
  long K = 0;
  while (sum < 4) {
    ++K;
    sum += 2.0 / (2 * K + 1) + 2.0 / (2 * K + 3);
  }
  CHECK(p["K"] == K);
  CHECK(K == 10);
  CHECK(q(p["sum"]).get_d() == doctest::Approx(sum).epsilon(1e-12));
  CHECK(q(p["sum"]).get_d() == doctest::Approx(4.144).epsilon(1e-3));
  CHECK(q(p["sum_before"]) < 4);
  CHECK(q(p["sum"]) >= 4);
}

TEST_CASE("unbounded witness is self-validating") {
  Spec s(kGk);
  auto c = call([&](char** o) {
    return nwint_certify(s.p, "unbounded", R"({"interval":["3/8","5/8"],"bound":"2"})", o);
  });
  REQUIRE(c.status == NWINT_OK);
  const json& p = c.doc["payload"];
  long g = p["generation"];
  mpq_class value(1);
  for (long i = 0; i < g; ++i) value *= mpq_class(3, 2);
  CHECK(g % 2 == 0);
  CHECK(q(p["value"]) == value);
  CHECK(value > 2);
  mpq_class lo = q(p["component"]["span"][0]), hi = q(p["component"]["span"][1]);
  CHECK(lo >= mpq_class(3, 8));
  CHECK(hi <= mpq_class(5, 8));
  CHECK(q(p["component_measure"]["lo"]) > 0);
  CHECK(q(p["component_measure"]["hi"]) <= hi - lo);
}

TEST_CASE("oscillator integral over [0,1] contains 0") {
  Spec s(kOsc);
  auto c = call([&](char** o) { return nwint_fn_integrate(s.p, R"({"from":"0","to":"1"})", o); });
  REQUIRE(c.status == NWINT_OK);
  CHECK(q(c.doc["integral"]["lo"]) <= 0);
  CHECK(q(c.doc["integral"]["hi"]) >= 0);
  CHECK(c.doc["table"]["columns"] == json({"x", "lo", "hi"}));
}

TEST_CASE("identical spec and budget give byte-identical documents") {
  Spec s(kGk);
  auto a = call([&](char** o) { return nwint_certify(s.p, "unbounded", R"({"bound":"100"})", o); });
  auto b = call([&](char** o) { return nwint_certify(s.p, "unbounded", R"({"bound":"100"})", o); });
  CHECK(a.text == b.text);
  Spec t(kGk);
  auto c = call([&](char** o) { return nwint_certify(t.p, "unbounded", R"({"bound":"100"})", o); });
  CHECK(a.text == c.text);
  const nwint_spec* list[] = {s.p};
  auto r1 = call([&](char** o) { return nwint_report(list, 1, nullptr, o); });
  auto r2 = call([&](char** o) { return nwint_report(list, 1, nullptr, o); });
  CHECK(strip_seconds(r1.doc) == strip_seconds(r2.doc));
}

TEST_CASE("spec hash ignores the budget and tracks the body") {
  Spec a(kGk), b(R"({"kind":"tower-series","tower":"dyadic","rule":{"power":{"theta":"3/2","subseq":"even"}},"budget":{"depth":9}})"),
      c(R"({"kind":"tower-series","tower":"dyadic","rule":{"power":{"theta":"5/4","subseq":"even"}}})");
  auto hash = [](const Spec& s) {
    return call([&](char** o) { return nwint_certify(s.p, "measure-enclosure", nullptr, o); }).doc["provenance"]["spec_hash"];
  };
  CHECK(hash(a) == hash(b));
  CHECK(hash(a) != hash(c));
}

TEST_CASE("report: empty set, insufficient budget") {
  auto empty = call([](char** o) { return nwint_report(nullptr, 0, nullptr, o); });
  CHECK(empty.status == NWINT_OK);
  CHECK(empty.doc["entries"].empty());

  Spec s(kGk);
  REQUIRE(nwint_spec_set_budget(s.p, "maxgen=1,depth=1,terms=1") == NWINT_OK);
  const nwint_spec* list[] = {s.p};
  auto r = call([&](char** o) { return nwint_report(list, 1, nullptr, o); });
  CHECK(r.status == NWINT_INCONCLUSIVE);
  long inconclusive = 0;
  for (const auto& e : r.doc["entries"]) {
    CHECK(e.contains("seconds"));
    CHECK_FALSE(e["payload"].contains("seconds"));
    if (e["verdict"] == "InconclusiveAtBudget") ++inconclusive;
  }
  CHECK(inconclusive > 0);
  CHECK(r.doc["summary"]["inconclusive"] == inconclusive);
}

TEST_CASE("report with a failing claim propagates the error status") {
  Spec s(R"({"kind":"step-function","pieces":[],"claims":[{"claim":"perturbation","N":"1","R":"1","interval":["0","1/100"]}]})");
  REQUIRE(s.status == NWINT_OK);
  const nwint_spec* list[] = {s.p};
  auto r = call([&](char** o) { return nwint_report(list, 1, nullptr, o); });
  CHECK(r.status == NWINT_REPORT_HAS_ERRORS);
  CHECK(r.doc["entries"][0]["error"]["code"] == "IntervalTooShort");
}

TEST_CASE("Alexiewicz box budget exhaustion is inconclusive") {
  Spec s(kOsc);
  REQUIRE(nwint_spec_set_budget(s.p, "max_boxes=1") == NWINT_OK);
  auto c = call([&](char** o) { return nwint_norm(s.p, "alexiewicz", nullptr, o); });
  CHECK(c.status == NWINT_INCONCLUSIVE);
  CHECK(c.doc["status"] == "inconclusive");
}

TEST_CASE("property: step-function L1 norms and perturbations re-verify exactly") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 50; ++t) {
    json pieces = json::array();
    mpq_class l1 = 0, cut = 0, sup = 0;
    for (int k = 0; k < 4; ++k) {
      mpq_class lo = cut + mpq_class(1 + rng() % 3, 32), hi = lo + mpq_class(1 + rng() % 3, 32);
      mpq_class v(static_cast<long>(rng() % 9) - 4, 1 + rng() % 3);
      v.canonicalize();
      cut = hi;
      pieces.push_back({{"from", lo.get_str()}, {"to", hi.get_str()}, {"value", v.get_str()}});
      l1 += abs(v) * (hi - lo);
      sup = std::max<mpq_class>(sup, abs(v));
    }
    json spec{{"kind", "step-function"}, {"pieces", pieces}};
    Spec s(spec.dump());
    REQUIRE(s.status == NWINT_OK);
    auto n = call([&](char** o) { return nwint_norm(s.p, "l1", nullptr, o); });
    REQUIRE(n.status == NWINT_OK);
    CHECK(q(n.doc["enclosure"]["lo"]) == l1);
    CHECK(q(n.doc["enclosure"]["hi"]) == l1);

    mpq_class N = sup + 1, R(1, 2);
    json opts{{"N", N.get_str()}, {"R", "1/2"}, {"interval", {"0", "1"}}};
    auto c = call([&](char** o) { return nwint_certify(s.p, "perturbation", opts.dump().c_str(), o); });
    REQUIRE(c.status == NWINT_OK);
    const json& p = c.doc["payload"];
    // Re-derive ||g - f||_1 from the two piece lists on the merged breakpoints.
    auto value_of = [](const json& ps, const mpq_class& x, const char* key) {
      for (const auto& piece : ps) {
        const json& w = piece.contains("interval") ? piece["interval"] : json{piece["from"], piece["to"]};
        if (q(w[0]) <= x && x < q(w[1])) return q(piece[key]);
      }
      return mpq_class(0);
    };
    std::vector<mpq_class> cuts{0, 1};
    for (const auto& piece : pieces) cuts.insert(cuts.end(), {q(piece["from"]), q(piece["to"])});
    for (const auto& piece : p["g"]) cuts.insert(cuts.end(), {q(piece["interval"][0]), q(piece["interval"][1])});
    std::sort(cuts.begin(), cuts.end());
    mpq_class dist = 0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      if (cuts[i] == cuts[i - 1]) continue;
      mpq_class mid = (cuts[i] + cuts[i - 1]) / 2;
      dist += abs(value_of(p["g"], mid, "value") - value_of(pieces, mid, "value")) * (cuts[i] - cuts[i - 1]);
    }
    CHECK(q(p["distance"]) == dist);
    CHECK(dist <= R / 2);
    CHECK(q(p["forced_excess"]) == R / 6);
    CHECK(q(p["radius"]) == R / 7);
  }
}

TEST_CASE("property: tower build encloses the dyadic masses") {
  Spec s(kGk);
  auto c = call([&](char** o) { return nwint_tower_build(s.p, R"({"generations":8,"depth":10})", o); });
  REQUIRE(c.status == NWINT_OK);
  mpq_class mass(1, 2);
  for (const auto& g : c.doc["generations"]) {
    CHECK(q(g["measure"]["lo"]) <= mass);
    CHECK(q(g["measure"]["hi"]) >= mass);
    CHECK(q(g["mass"]) == mass);
    mass /= 2;
  }
  CHECK(c.doc["table"]["rows"].size() == 8);
}

TEST_CASE("property: dense-jump samples land in their subintervals with nonzero jumps") {
  Spec s(R"({"kind":"jump-polynomial","polynomial":{"monomials":[{"lambda":"1","gamma":[1,0]},{"lambda":"-2","gamma":[1,1]}]}})");
  REQUIRE(s.status == NWINT_OK);
  auto c = call([&](char** o) { return nwint_certify(s.p, "jump-dense", R"({"samples":40})", o); });
  REQUIRE(c.status == NWINT_OK);
  REQUIRE(c.doc["payload"]["samples"].size() == 40);
  for (const auto& e : c.doc["payload"]["samples"]) {
    mpq_class qi = q(e["jump"]["q"]);
    CHECK(q(e["interval"][0]) <= qi);
    CHECK(qi <= q(e["interval"][1]));
    CHECK((q(e["jump"]["jump"]["lo"]) > 0 || q(e["jump"]["jump"]["hi"]) < 0));
  }
}

TEST_CASE("verdicts and statuses agree") {
  Spec s(kGk);
  for (const char* bound : {"1", "100000000000000000000"}) {
    REQUIRE(nwint_spec_set_budget(s.p, "maxgen=6,depth=4") == NWINT_OK);
    json opts{{"bound", bound}};
    auto c = call([&](char** o) { return nwint_certify(s.p, "unbounded", opts.dump().c_str(), o); });
    bool certified = c.doc["verdict"] == "Certified";
    CHECK(c.status == (certified ? NWINT_OK : NWINT_INCONCLUSIVE));
    CHECK(certified == (std::string(bound) == "1"));
  }
}
