#include "app/commands.hpp"

#include <algorithm>
#include <chrono>

#include "nwint/error.hpp"

namespace nwint::app {

namespace {

template <class T>
const T& body_as(const FunctionSpec& s, const char* command) {
  if (const T* p = std::get_if<T>(&s.body)) return *p;
  throw Error(ErrorCode::Unsupported, std::string(command) + " does not apply to a " + s.kind + " spec");
}

Rational opt_rational(const json& o, const char* key, const Rational& fallback) {
  return o.contains(key) ? rational_of(o.at(key), key) : fallback;
}

Rational need_rational(const json& o, const char* key) {
  if (!o.contains(key)) throw Error(ErrorCode::InvalidArgument, std::string("missing option ") + key);
  return rational_of(o.at(key), key);
}

long opt_long(const json& o, const char* key, long fallback) {
  if (!o.contains(key)) return fallback;
  if (!o.at(key).is_number_integer()) throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be an integer");
  return o.at(key).get<long>();
}

std::pair<Rational, Rational> opt_interval(const json& o, const char* key = "interval") {
  if (!o.contains(key)) return {Rational(0), Rational(1)};
  const json& v = o.at(key);
  if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::InvalidArgument, std::string(key) + " needs two endpoints");
  Rational lo = rational_of(v[0], key), hi = rational_of(v[1], key);
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, std::string(key) + " needs lo < hi");
  return {lo, hi};
}

json make_table(const char* first) { return {{"columns", {first, "lo", "hi"}}, {"rows", json::array()}}; }

void add_row(json& table, const Rational& x, const Enclosure& e) {
  table["rows"].push_back({to_json(x), to_json(e.lo()), to_json(e.hi())});
}

const char* preset_name(const TowerSpec& t) {
  switch (t.preset()) {
    case TowerSpec::Preset::Dyadic: return "dyadic";
    case TowerSpec::Preset::Factorial: return "factorial";
    default: return "explicit";
  }
}

json component_json(const TowerComponent& c, long depth) {
  json chain = json::array();
  for (const auto& l : c.chain)
    chain.push_back({{"generation", l.generation}, {"span", to_json(l.span)}, {"hole_level", l.hole_level},
                     {"hole_index", l.hole_index.get_str()}});
  return {{"generation", c.generation}, {"span", to_json(c.span)}, {"mass", to_json(c.mass)},
          {"measure", to_json(c.measure_enclosure(depth))}, {"chain", chain}};
}

json witness_json(const NonLebesgueWitness& w) {
  return {{"K", w.K}, {"sum", to_json(w.sum)}, {"sum_before", to_json(w.sum_before)}, {"scale", to_json(w.scale)},
          {"interval", to_json(w.I)}, {"left", to_json(w.left)}, {"right", to_json(w.right)}};
}

json jump_json(const JumpResult& r) {
  return {{"index", r.index}, {"q", to_json(r.q)}, {"f_at_q", to_json(r.y)}, {"p1", to_json(r.p1)},
          {"jump", to_json(r.jump)}, {"certified", r.certified}};
}

json step_json(const StepFunction& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces) pieces.push_back({{"interval", to_json(p.where)}, {"value", to_json(p.value)}});
  return pieces;
}

json ok(json doc) {
  doc["status"] = "ok";
  return doc;
}

// Enclosure of the spec's function at x, or nothing when no finite budget
// decides it (a tower point inside a kept interval at the depth limit).
std::optional<Enclosure> value_at(const FunctionSpec& spec, const Rational& x, json* detail) {
  const Budget& b = spec.budget;
  if (const auto* s = std::get_if<StepSeries>(&spec.body)) {
    EvalResult r = eval(*s, x, b.maxgen, b.depth);
    if (detail) {
      (*detail)["verdict"] = r.kind == EvalResult::Value ? "Value" : r.kind == EvalResult::Zero ? "Zero" : "Unknown";
      (*detail)["generations"] = r.location.generations;
    }
    if (r.kind == EvalResult::Unknown) return std::nullopt;
    return Enclosure(r.kind == EvalResult::Value ? r.value : Rational(0));
  }
  if (const auto* g = std::get_if<JumpPolynomial>(&spec.body)) {
    Enclosure y = eval_f(g->series(), x, b.terms, b.precision), sum(0);
    for (long j = 1; j <= g->degree(); ++j) sum += g->coefficients()[j - 1].evaluate(x, b.precision) * pow(y, j);
    if (detail) (*detail)["f"] = to_json(y);
    return sum;
  }
  if (const auto* c = std::get_if<OscCombination>(&spec.body)) {
    if (detail) (*detail)["F"] = to_json(c->F(x, b.precision));
    return c->f(x, b.precision);
  }
  if (const auto* h = std::get_if<ShiftCombination>(&spec.body)) {
    Enclosure sum(0);
    for (const auto& t : h->terms) sum += Enclosure(t.beta) * eval_f(JumpSeries{{}, t.k}, x, b.terms, b.precision);
    return sum;
  }
  const auto& f = std::get<StepFunction>(spec.body);
  for (const auto& p : f.pieces)
    if (p.where.left <= x && x <= p.where.right) return Enclosure(p.value);
  return Enclosure(0);
}

json claim_for(const FunctionSpec& spec, const std::string& claim, const json& payload, bool certified) {
  return certificate(claim, certified, payload, spec.hash, spec.budget.to_json());
}

json norm_payload(const FunctionSpec& spec, const std::string& which, bool* inconclusive) {
  const Budget& b = spec.budget;
  *inconclusive = false;
  json out{{"norm", which}};
  if (which == "l1") {
    if (const auto* s = std::get_if<StepSeries>(&spec.body)) {
      out["enclosure"] = to_json(l1_norm(*s, b.terms, b.depth));
      out["terms"] = b.terms;
      out["depth"] = b.depth;
      return out;
    }
    const auto& f = body_as<StepFunction>(spec, "norm l1");
    out["enclosure"] = to_json(Enclosure(StepFunction::l1_distance(f, StepFunction{})));
    return out;
  }
  if (which == "bv") {
    VariationBounds v;
    if (const auto* h = std::get_if<ShiftCombination>(&spec.body)) {
      v = variation_bounds(h->terms, b.terms);
    } else {
      const auto& g = body_as<JumpPolynomial>(spec, "norm bv");
      std::vector<Rational> probes;
      for (long i = 1; i <= b.terms; ++i) probes.push_back(g.series().order.q(i));
      v = variation_bounds(g, probes, b.terms, b.precision);
    }
    out["lower"] = to_json(v.lower);
    out["upper"] = v.upper ? to_json(*v.upper) : json(nullptr);
    out["upper_kind"] = v.upper_kind;
    json probes = json::array();
    for (const auto& p : v.probes)
      probes.push_back({{"where", p.where}, {"index", p.k_or_i}, {"point", to_json(p.point)}, {"jump", to_json(p.jump)}});
    out["probes"] = probes;
    return out;
  }
  if (which == "alexiewicz") {
    const auto& c = body_as<OscCombination>(spec, "norm alexiewicz");
    out["tolerance"] = to_json(b.tolerance);
    try {
      out["enclosure"] = to_json(alexiewicz_norm(c, b.tolerance, NormParams{b.max_boxes, 0}));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonterminationBudget) throw;
      *inconclusive = true;
      out["reason"] = e.what();
    }
    return out;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown norm \"" + which + "\"");
}

std::string canonical_claim(const std::string& c) {
  if (c == "jump-dense") return "jump-dense-sample";
  if (c == "basis") return "basis-inequality";
  return c;
}

json default_claims(const FunctionSpec& spec) {
  if (spec.kind == "tower-series") {
    json claims = json::array({{{"claim", "measure-enclosure"}, {"generation", 1}},
                               {{"claim", "norm-enclosure"}, {"norm", "l1"}},
                               {{"claim", "unbounded"}, {"interval", {"1/4", "3/4"}}, {"bound", "10"}}});
    if (std::holds_alternative<LinearRule>(std::get<StepSeries>(spec.body).rule()))
      claims.push_back({{"claim", "basis-inequality"}, {"m1", 1}});
    return claims;
  }
  if (spec.kind == "jump-polynomial")
    return json::array({{{"claim", "jump-nonzero"}, {"q", "1/2"}}, {{"claim", "jump-dense-sample"}, {"samples", 10}}});
  if (spec.kind == "oscillator-combination")
    return json::array({{{"claim", "non-lebesgue"}, {"bound", "1"}}, {{"claim", "norm-enclosure"}, {"norm", "alexiewicz"}}});
  if (spec.kind == "shift-combination") return json::array({{{"claim", "norm-enclosure"}, {"norm", "bv"}}});
  return json::array({{{"claim", "norm-enclosure"}, {"norm", "l1"}}});
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

json certificate(const std::string& claim, bool certified, json payload, const std::string& spec_hash,
                 const json& budget) {
  return {{"claim", claim},
          {"verdict", certified ? "Certified" : "InconclusiveAtBudget"},
          {"status", certified ? "ok" : "inconclusive"},
          {"payload", std::move(payload)},
          {"provenance", {{"spec_hash", spec_hash}, {"budget", budget}, {"version", library_version()}}}};
}

bool is_inconclusive(const json& doc) { return doc.value("status", "ok") == "inconclusive"; }

json tower_build(const FunctionSpec& spec, const json& opts) {
  const auto& tower = body_as<StepSeries>(spec, "tower build").tower();
  long depth = opt_long(opts, "depth", spec.budget.depth);
  long count = opt_long(opts, "generations", std::min(spec.budget.maxgen, 10L));
  if (auto n = tower.generations()) count = std::min(count, *n);
  json gens = json::array(), table = make_table("index");
  for (long j = 1; j <= count; ++j) {
    Enclosure m = tower_generation(tower, j, depth).measure_enclosure();
    gens.push_back({{"generation", j}, {"mass", to_json(tower.mass(j))}, {"available", to_json(tower.available(j))},
                    {"ratio", to_json(tower.ratio(j))}, {"measure", to_json(m)}});
    add_row(table, Rational(j), m);
  }
  return ok({{"command", "tower build"}, {"tower", preset_name(tower)}, {"depth", depth}, {"generations", gens},
             {"table", table}});
}

json tower_show(const FunctionSpec& spec, const json& opts) {
  const auto& tower = body_as<StepSeries>(spec, "tower show").tower();
  long j = opt_long(opts, "generation", 1);
  long depth = opt_long(opts, "depth", std::min(spec.budget.depth, 3L));
  long limit = opt_long(opts, "limit", 256);
  if (limit < 1) throw Error(ErrorCode::InvalidArgument, "limit must be positive");
  TowerApprox t = tower_generation(tower, j, depth);
  json comps = json::array(), table = make_table("index");
  long idx = 0;
  for (const auto& c : t.components(static_cast<std::size_t>(limit))) {
    comps.push_back(component_json(c, depth));
    add_row(table, Rational(++idx), Enclosure(c.span.left, c.span.right));
  }
  return ok({{"command", "tower show"}, {"tower", preset_name(tower)}, {"generation", j}, {"depth", depth},
             {"measure", to_json(t.measure_enclosure())}, {"components", comps}, {"table", table}});
}

json fn_eval(const FunctionSpec& spec, const json& opts) {
  json out{{"command", "fn eval"}, {"kind", spec.kind}};
  bool unknown = false;
  if (opts.contains("x")) {
    Rational x = need_rational(opts, "x");
    if (x.sign() < 0 || x > Rational(1)) throw Error(ErrorCode::InvalidArgument, "x must lie in [0,1]");
    json detail = json::object();
    auto v = value_at(spec, x, &detail);
    out["x"] = to_json(x);
    out["value"] = v ? to_json(*v) : json(nullptr);
    out["detail"] = detail;
    unknown = !v;
  }
  if (long n = opt_long(opts, "samples", 0); n > 0) {
    json table = make_table("x");
    for (long i = 0; i <= n; ++i) {
      Rational x(i, n);
      if (auto v = value_at(spec, x, nullptr)) add_row(table, x, *v);
    }
    out["table"] = table;
  } else if (!opts.contains("x")) {
    throw Error(ErrorCode::InvalidArgument, "fn eval needs --x or --samples");
  }
  out["status"] = unknown ? "inconclusive" : "ok";
  return out;
}

json fn_integrate(const FunctionSpec& spec, const json& opts) {
  Rational from = opt_rational(opts, "from", Rational(0)), to = opt_rational(opts, "to", Rational(1));
  if (from.sign() < 0 || to > Rational(1) || to < from) throw Error(ErrorCode::InvalidArgument, "need 0 <= from <= to <= 1");
  json out{{"command", "fn integrate"}, {"from", to_json(from)}, {"to", to_json(to)}};
  if (const auto* f = std::get_if<StepFunction>(&spec.body)) {
    Rational sum = 0;
    for (const auto& p : f->pieces) {
      Rational lo = max(p.where.left, from), hi = min(p.where.right, to);
      if (lo < hi) sum += p.value * (hi - lo);
    }
    out["integral"] = to_json(Enclosure(sum));
    return ok(out);
  }
  const auto& c = body_as<OscCombination>(spec, "fn integrate");
  long p = spec.budget.precision;
  out["integral"] = to_json(kurzweil_integral(c, Enclosure(from), Enclosure(to), p));
  // Hake table: the integral over [eps, to] as eps = 2^-n decreases to `from`.
  json table = make_table("x");
  for (long n = 1; n <= std::min(spec.budget.terms, 60L); ++n) {
    Rational eps = Rational::pow2(-n);
    if (eps >= to) continue;
    if (eps <= from) break;
    add_row(table, eps, kurzweil_integral(c, Enclosure(eps), Enclosure(to), p));
  }
  out["table"] = table;
  return ok(out);
}

json norm(const FunctionSpec& spec, const std::string& which, const json&) {
  bool inconclusive = false;
  json out = norm_payload(spec, which, &inconclusive);
  out["command"] = "norm " + which;
  out["status"] = inconclusive ? "inconclusive" : "ok";
  return out;
}

json certify(const FunctionSpec& spec, const std::string& requested, const json& opts) {
  const Budget& b = spec.budget;
  const std::string claim = canonical_claim(requested);
  if (claim == "unbounded") {
    const auto& s = body_as<StepSeries>(spec, "certify unbounded");
    auto [lo, hi] = opt_interval(opts);
    Rational bound = opt_rational(opts, "bound", Rational(1));
    json payload{{"interval", {to_json(lo), to_json(hi)}}, {"bound", to_json(bound)}};
    auto w = unbounded_witness(s, lo, hi, bound, b.maxgen, b.depth);
    if (const auto* u = std::get_if<UnboundedWitness>(&w)) {
      payload["generation"] = u->generation;
      payload["value"] = to_json(u->value);
      payload["component"] = component_json(u->component, b.depth);
      payload["component_measure"] = to_json(u->component_measure);
      return claim_for(spec, claim, payload, true);
    }
    payload["reason"] = std::get<Inconclusive>(w).reason;
    return claim_for(spec, claim, payload, false);
  }
  if (claim == "jump-nonzero") {
    const auto& g = body_as<JumpPolynomial>(spec, "certify jump-nonzero");
    Rational q = opt_rational(opts, "q", Rational(1, 2));
    JumpResult r = jump_enclosure(g, q, b.terms, b.precision);
    json payload = jump_json(r);
    payload["N"] = to_json(g.bound_N());
    return claim_for(spec, claim, payload, r.certified);
  }
  if (claim == "jump-dense-sample") {
    const auto& g = body_as<JumpPolynomial>(spec, "certify jump-dense");
    auto [lo, hi] = opt_interval(opts);
    long samples = opt_long(opts, "samples", 10);
    if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
    Rational eps = opt_rational(opts, "epsilon", Rational(1, 1000));
    JumpSearchParams params{eps, b.max_index, b.terms, b.precision};
    json found = json::array();
    bool all = true;
    Rational step = (hi - lo) / Rational(samples);
    for (long t = 0; t < samples; ++t) {
      Rational a = lo + step * Rational(t), c = a + step;
      auto res = jump_search(g, a, c, params);
      json entry{{"interval", {to_json(a), to_json(c)}}};
      if (const auto* f = std::get_if<JumpFound>(&res)) {
        entry["jump"] = jump_json(f->jump);
        entry["epsilon_route"] = f->epsilon_route;
        entry["epsilon_margin"] = to_json(f->epsilon_margin);
        entry["candidates_tried"] = f->candidates_tried;
      } else {
        const auto& inc = std::get<JumpInconclusive>(res);
        entry["reason"] = inc.reason;
        entry["candidates_tried"] = inc.candidates_tried;
        all = false;
      }
      found.push_back(entry);
    }
    json payload{{"epsilon", to_json(eps)}, {"M", to_json(g.bound_M())}, {"N", to_json(g.bound_N())}, {"samples", found}};
    return claim_for(spec, claim, payload, all);
  }
  if (claim == "non-lebesgue") {
    const auto& c = body_as<OscCombination>(spec, "certify non-lebesgue");
    Rational bound = opt_rational(opts, "bound", Rational(1));
    json payload = witness_json(restriction_witness(c, bound, std::min(b.precision, 64L)));
    payload["bound"] = to_json(bound);
    return claim_for(spec, claim, payload, true);
  }
  if (claim == "basis-inequality") {
    const auto& s = body_as<StepSeries>(spec, "certify basis");
    const auto* lin = std::get_if<LinearRule>(&s.rule());
    if (!lin) throw Error(ErrorCode::Unsupported, "certify basis needs a linear rule");
    std::vector<PowerRule> family;
    std::vector<Rational> a;
    for (const auto& [coef, rule] : lin->parts) {
      a.push_back(coef);
      family.push_back(rule);
    }
    long m1 = opt_long(opts, "m1", 1);
    if (m1 < 1 || m1 > static_cast<long>(a.size())) throw Error(ErrorCode::InvalidArgument, "m1 must lie in 1..parts");
    BasisResult r = basis_inequality_check(s.tower(), family, a, static_cast<std::size_t>(m1), b.terms, b.depth);
    json payload{{"m1", m1}, {"m2", a.size()}, {"route", r.route}, {"left", to_json(r.left)},
                 {"right", to_json(r.right)}, {"difference", to_json(r.difference)}};
    return claim_for(spec, claim, payload, r.holds);
  }
  if (claim == "perturbation") {
    const auto& f = body_as<StepFunction>(spec, "certify perturbation");
    auto [lo, hi] = opt_interval(opts);
    Rational N = need_rational(opts, "N"), R = need_rational(opts, "R");
    PerturbationCertificate c = comeager_perturbation(f, N, lo, hi, R);
    json payload{{"N", to_json(N)},           {"R", to_json(R)},
                 {"interval", {to_json(lo), to_json(hi)}},
                 {"J", to_json(c.J)},         {"g", step_json(c.g)},
                 {"distance", to_json(c.distance)}, {"half_R", to_json(c.half_R)},
                 {"forced_excess", to_json(c.forced_excess)}, {"radius", to_json(c.radius)}};
    return claim_for(spec, claim, payload, c.holds);
  }
  if (claim == "measure-enclosure") {
    const auto& tower = body_as<StepSeries>(spec, "measure-enclosure").tower();
    long j = opt_long(opts, "generation", 1);
    Enclosure m = tower_generation(tower, j, b.depth).measure_enclosure();
    json payload{{"generation", j}, {"depth", b.depth}, {"mass", to_json(tower.mass(j))}, {"measure", to_json(m)}};
    return claim_for(spec, claim, payload, m.contains(tower.mass(j)));
  }
  if (claim == "norm-enclosure") {
    bool inconclusive = false;
    json payload = norm_payload(spec, opts.value("norm", "l1"), &inconclusive);
    return claim_for(spec, claim, payload, !inconclusive);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown claim \"" + requested + "\"");
}

json report(const std::vector<FunctionSpec>& specs, const json& opts) {
  json entries = json::array();
  long certified = 0, inconclusive = 0, errors = 0;
  auto tally = [&](json& entry) {
    if (entry.contains("error")) ++errors;
    else if (entry["verdict"] == "Certified") ++certified;
    else ++inconclusive;
  };
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const json claims = specs[i].claims.empty() ? default_claims(specs[i]) : specs[i].claims;
    for (const auto& request : claims) {
      auto start = std::chrono::steady_clock::now();
      json entry;
      std::string name = request.value("claim", "");
      try {
        entry = certify(specs[i], name, request);
      } catch (const Error& e) {
        entry = {{"claim", name}, {"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}};
      }
      entry["spec"] = i;
      entry["seconds"] = seconds_since(start);
      tally(entry);
      entries.push_back(std::move(entry));
    }
  }
  if (opts.value("bundled", false)) {
    for (auto& entry : checklist(opts.value("full", false))) {
      tally(entry);
      entries.push_back(std::move(entry));
    }
  }
  const char* status = errors ? "error" : inconclusive ? "inconclusive" : "ok";
  return {{"command", "report"},
          {"version", library_version()},
          {"entries", entries},
          {"summary", {{"certified", certified}, {"inconclusive", inconclusive}, {"errors", errors}}},
          {"status", status}};
}

}  // namespace nwint::app
