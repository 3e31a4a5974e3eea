#include "app/spec.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <optional>

#include "nwint/error.hpp"

namespace nwint::app {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

long long_of(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<long>();
}

std::vector<long> longs_of(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<long> out;
  for (const auto& v : j) out.push_back(long_of(v, what));
  return out;
}

Subsequence subsequence_of(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "all") return Subsequence::all();
    if (s == "even") return Subsequence::even();
    if (s == "odd") return Subsequence::odd();
    bad("unknown subsequence \"" + s + "\"");
  }
  return Subsequence{long_of(field(j, "stride"), "stride"), long_of(field(j, "offset"), "offset")};
}

TowerSpec tower_of(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "dyadic") return TowerSpec::dyadic();
    if (s == "factorial") return TowerSpec::factorial();
    bad("unknown tower preset \"" + s + "\"");
  }
  std::vector<Rational> masses;
  const auto& m = field(j, "masses");
  if (!m.is_array()) bad("tower masses must be an array");
  for (const auto& v : m) masses.push_back(rational_of(v, "mass"));
  return TowerSpec::explicit_masses(std::move(masses));
}

PowerRule power_of(const json& j) {
  return PowerRule{rational_of(field(j, "theta"), "theta"),
                   j.contains("subseq") ? subsequence_of(j.at("subseq")) : Subsequence::all()};
}

StepRule rule_of(const json& j) {
  if (!j.is_object() || j.size() != 1) bad("rule must be an object with one key: power, monomial or linear");
  const std::string type = j.begin().key();
  const json& body = j.begin().value();
  if (type == "power") return power_of(body);
  if (type == "monomial") {
    MonomialRule r;
    r.thetas = longs_of(field(body, "thetas"), "thetas");
    for (const auto& row : field(body, "rows")) r.rows.push_back({rational_of(field(row, "beta"), "beta"), longs_of(field(row, "k"), "k")});
    return r;
  }
  if (type == "linear") {
    LinearRule r;
    if (!body.is_array()) bad("linear rule must be an array of parts");
    for (const auto& part : body) r.parts.emplace_back(rational_of(field(part, "a"), "a"), power_of(part));
    return r;
  }
  bad("unknown rule \"" + type + "\"");
}

ExpPoly exppoly_of(const json& j) {
  ExpPoly p;
  for (const auto& t : field(j, "terms")) p += ExpPoly::term(rational_of(field(t, "c"), "c"), longs_of(field(t, "exp"), "exp"));
  return p;
}

JumpSeries series_of(const json& j) {
  JumpSeries s;
  if (j.contains("enumeration")) {
    std::string e = j.at("enumeration").get<std::string>();
    if (e == "calkin-wilf") s.order = RationalEnum(RationalEnum::Order::CalkinWilf);
    else if (e != "denominator") bad("unknown enumeration \"" + e + "\"");
  }
  return s;
}

JumpPolynomial jump_of(const json& j) {
  JumpSeries series = series_of(j);
  if (j.contains("polynomial")) {
    const auto& p = j.at("polynomial");
    GeneratorPolynomial gp;
    for (const auto& m : field(p, "monomials"))
      gp.monomials.push_back({rational_of(field(m, "lambda"), "lambda"), longs_of(field(m, "gamma"), "gamma")});
    if (p.contains("alphas")) gp.alphas = longs_of(p.at("alphas"), "alphas");
    return expand_generator_polynomial(gp, series);
  }
  std::vector<ExpPoly> G;
  for (const auto& g : field(j, "G")) G.push_back(exppoly_of(g));
  if (j.contains("degree")) {
    long k = long_of(j.at("degree"), "degree");
    if (k != static_cast<long>(G.size()) || G.empty() || G.back().is_zero())
      bad("degree must equal the number of coefficients, with G_k nonzero");
  }
  return JumpPolynomial(std::move(G), series);
}

OscCombination osc_of(const json& j) {
  OscCombination c;
  const auto& a = field(j, "alphas");
  if (!a.is_object()) bad("alphas must be an object keyed by k");
  for (const auto& [k, v] : a.items()) {
    long idx = 0;
    auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), idx);
    if (ec != std::errc() || ptr != k.data() + k.size() || idx < 1) bad("alpha key \"" + k + "\" is not an index >= 1");
    c.alphas[idx] = rational_of(v, "alpha");
  }
  return c;
}

ShiftCombination shifts_of(const json& j) {
  ShiftCombination h;
  for (const auto& t : field(j, "terms")) h.terms.push_back({rational_of(field(t, "beta"), "beta"), long_of(field(t, "k"), "k")});
  if (h.terms.empty()) bad("shift combination needs at least one term");
  return h;
}

StepFunction step_of(const json& j) {
  StepFunction f;
  for (const auto& p : field(j, "pieces")) {
    Rational lo = rational_of(field(p, "from"), "from"), hi = rational_of(field(p, "to"), "to");
    if (!(lo < hi) || lo.sign() < 0 || hi > Rational(1)) bad("step pieces need 0 <= from < to <= 1");
    f.pieces.push_back({{lo, hi}, rational_of(field(p, "value"), "value")});
  }
  std::sort(f.pieces.begin(), f.pieces.end(), [](const auto& a, const auto& b) { return a.where.left < b.where.left; });
  for (std::size_t i = 1; i < f.pieces.size(); ++i)
    if (f.pieces[i].where.left < f.pieces[i - 1].where.right) bad("step pieces overlap");
  return f;
}

long positive(const json& v, const char* key) {
  long x = long_of(v, key);
  if (x < 1) bad(std::string("budget ") + key + " must be positive");
  return x;
}

}  // namespace

Rational rational_of(const json& j, const char* what) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
  } catch (const Error&) {
  }
  bad(std::string(what) + " must be a rational \"p/q\" or an integer");
}

json to_json(const Rational& r) { return r.to_string(); }
json to_json(const Enclosure& e) { return {{"lo", to_json(e.lo())}, {"hi", to_json(e.hi())}}; }
json to_json(const Interval& i) { return json::array({to_json(i.left), to_json(i.right)}); }

void Budget::apply(const json& o) {
  if (!o.is_object()) bad("budget must be an object");
  for (const auto& [k, v] : o.items()) {
    if (k == "maxgen") maxgen = positive(v, "maxgen");
    else if (k == "depth") depth = positive(v, "depth");
    else if (k == "terms") terms = positive(v, "terms");
    else if (k == "precision") precision = positive(v, "precision");
    else if (k == "max_index") max_index = positive(v, "max_index");
    else if (k == "max_boxes") max_boxes = positive(v, "max_boxes");
    else if (k == "tolerance") {
      tolerance = rational_of(v, "tolerance");
      if (tolerance.sign() <= 0) bad("budget tolerance must be positive");
    } else {
      bad("unknown budget key \"" + k + "\"");
    }
  }
}

void Budget::apply(std::string_view text) {
  json o = json::object();
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) bad("budget entries look like key=value");
    std::string key(item.substr(0, eq)), value(item.substr(eq + 1));
    if (key == "tolerance") {
      o[key] = value;
    } else {
      long x = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
      if (ec != std::errc() || ptr != value.data() + value.size()) bad("budget " + key + " must be an integer");
      o[key] = x;
    }
  }
  apply(o);
}

json Budget::to_json() const {
  return {{"maxgen", maxgen}, {"depth", depth}, {"terms", terms}, {"precision", precision},
          {"tolerance", app::to_json(tolerance)}, {"max_index", max_index}, {"max_boxes", max_boxes}};
}

FunctionSpec parse_spec(const json& doc) {
  if (!doc.is_object()) bad("spec must be a JSON object");
  std::string kind = field(doc, "kind").get<std::string>();
  json body = doc;
  body.erase("budget");
  body.erase("claims");
  std::optional<Body> parsed;
  try {
    if (kind == "tower-series") parsed = StepSeries(tower_of(field(doc, "tower")), rule_of(field(doc, "rule")));
    else if (kind == "jump-polynomial") parsed = jump_of(doc);
    else if (kind == "oscillator-combination") parsed = osc_of(doc);
    else if (kind == "shift-combination") parsed = shifts_of(doc);
    else if (kind == "step-function") parsed = step_of(doc);
    else bad("unknown spec kind \"" + kind + "\"");
  } catch (const json::exception& e) {
    bad(std::string("malformed spec: ") + e.what());
  }
  FunctionSpec spec{kind, std::move(*parsed), {}, json::array(), fnv1a_hex(body.dump())};
  if (doc.contains("budget")) spec.budget.apply(doc.at("budget"));
  if (doc.contains("claims")) {
    spec.claims = doc.at("claims");
    if (!spec.claims.is_array()) bad("claims must be an array");
  }
  return spec;
}

FunctionSpec parse_spec_text(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) bad("spec is not valid JSON");
  return parse_spec(doc);
}

std::string fnv1a_hex(std::string_view bytes) {
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

const char* library_version() { return "1.0.0"; }

}  // namespace nwint::app
