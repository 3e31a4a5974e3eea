// nwint_cli: function specs in, certificates and tables out.
// Exit status: 0 certified or computed, 2 inconclusive at the budget, 1 usage or spec error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nwint/nwint.h"

namespace {

using json = nlohmann::json;

struct Flags {
  std::vector<std::string> specs;
  std::string budget, precision, tolerance, csv;
  bool json_out = true;
  json opts = json::object();
};

class Failure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot read spec file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SpecHandle {
  nwint_spec* p = nullptr;
  ~SpecHandle() { nwint_spec_free(p); }
};

void load(const std::string& path, const Flags& f, SpecHandle& h) {
  if (nwint_spec_from_json(read_file(path).c_str(), &h.p) != NWINT_OK)
    throw Failure(path + ": " + nwint_last_error());
  std::string budget = f.budget;
  if (!f.precision.empty()) budget += ",precision=" + f.precision;
  if (!f.tolerance.empty()) budget += ",tolerance=" + f.tolerance;
  if (!budget.empty() && nwint_spec_set_budget(h.p, budget.c_str()) != NWINT_OK)
    throw Failure(std::string("budget: ") + nwint_last_error());
}

void write_csv(const std::string& path, const json& doc) {
  if (!doc.contains("table")) throw Failure("this command produces no plot data for --csv");
  std::ofstream out(path);
  if (!out) throw Failure("cannot write " + path);
  const json& t = doc.at("table");
  for (std::size_t i = 0; i < t["columns"].size(); ++i) out << (i ? "," : "") << t["columns"][i].get<std::string>();
  out << "\n";
  for (const auto& row : t["rows"]) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i].get<std::string>();
    out << "\n";
  }
}

int exit_code(nwint_status s) {
  if (s == NWINT_OK) return 0;
  if (s == NWINT_INCONCLUSIVE) return 2;
  return 1;
}

void print_error(const std::string& message) {
  std::cerr << "nwint_cli: " << message << "\n";
  std::cout << json{{"status", "error"}, {"error", message}}.dump(2) << "\n";
}

using Command = std::function<nwint_status(const nwint_spec*, const char*, char**)>;

int run_command(const Flags& f, const Command& command) {
  if (f.specs.size() != 1) throw Failure("exactly one --spec is required");
  SpecHandle h;
  load(f.specs[0], f, h);
  char* out = nullptr;
  std::string opts = f.opts.dump();
  nwint_status s = command(h.p, opts.c_str(), &out);
  if (!out) throw Failure(std::string(nwint_status_name(s)) + ": " + nwint_last_error());
  json doc = json::parse(out);
  nwint_string_free(out);
  if (!f.csv.empty()) write_csv(f.csv, doc);
  std::cout << doc.dump(2) << "\n";
  return exit_code(s);
}

int run_report(const Flags& f) {
  std::vector<SpecHandle> handles(f.specs.size());
  std::vector<const nwint_spec*> ptrs;
  for (std::size_t i = 0; i < f.specs.size(); ++i) {
    load(f.specs[i], f, handles[i]);
    ptrs.push_back(handles[i].p);
  }
  if (!f.csv.empty()) throw Failure("report produces no plot data for --csv");
  char* out = nullptr;
  std::string opts = f.opts.dump();
  nwint_status s = nwint_report(ptrs.data(), ptrs.size(), opts.c_str(), &out);
  if (!out) throw Failure(std::string(nwint_status_name(s)) + ": " + nwint_last_error());
  std::cout << out << "\n";
  nwint_string_free(out);
  if (s == NWINT_REPORT_HAS_ERRORS) std::cerr << "nwint_cli: some report entries failed\n";
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certificates for pathological integrable functions"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  std::string x, from, to, bound, q, epsilon, N, R;
  std::vector<std::string> interval;
  long generation = 0, generations = 0, depth = 0, limit = 0, samples = 0, m1 = 0;
  bool bundled = false, full = false;

  app.add_option("--spec", f.specs, "Function spec JSON file");
  app.add_option("--budget", f.budget, "Budget overrides key=value,...");
  app.add_option("--precision", f.precision, "Working precision in bits");
  app.add_option("--tolerance", f.tolerance, "Tolerance as p/q");
  app.add_option("--csv", f.csv, "Write plot data (x or index, lo, hi) to this path");
  app.add_flag("--json", f.json_out, "JSON on standard output (default)");

  std::function<int()> action;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, std::function<int()> fn) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  auto with_interval = [&](CLI::App* sub) { sub->add_option("--interval", interval, "Interval lo hi")->expected(2); };

  CLI::App* tower = app.add_subcommand("tower", "Cantor towers")->require_subcommand(1);
  auto* build = leaf(tower, "build", "Generation masses and measure enclosures", [&] {
    return run_command(f, nwint_tower_build);
  });
  build->add_option("--generations", generations, "Number of generations");
  build->add_option("--depth", depth, "Approximation depth");
  auto* show = leaf(tower, "show", "Components of one generation", [&] { return run_command(f, nwint_tower_show); });
  show->add_option("--generation", generation, "Generation");
  show->add_option("--depth", depth, "Approximation depth");
  show->add_option("--limit", limit, "Maximum number of components");

  CLI::App* fn = app.add_subcommand("fn", "Point values and integrals")->require_subcommand(1);
  auto* ev = leaf(fn, "eval", "Value enclosure at a point", [&] { return run_command(f, nwint_fn_eval); });
  ev->add_option("--x", x, "Point p/q in [0,1]");
  ev->add_option("--samples", samples, "Grid size for plot data");
  auto* in = leaf(fn, "integrate", "Integral enclosure and Hake table", [&] {
    return run_command(f, nwint_fn_integrate);
  });
  in->add_option("--from", from, "Lower limit");
  in->add_option("--to", to, "Upper limit");

  CLI::App* nm = app.add_subcommand("norm", "Norm enclosures")->require_subcommand(1);
  for (const char* which : {"l1", "bv", "alexiewicz"}) {
    std::string w = which;
    leaf(nm, w, w + " norm", [&f, w] {
      return run_command(f, [w](const nwint_spec* s, const char* o, char** out) { return nwint_norm(s, w.c_str(), o, out); });
    });
  }

  CLI::App* cert = app.add_subcommand("certify", "Certificates")->require_subcommand(1);
  auto certify = [&f](const std::string& claim) {
    return [&f, claim] {
      return run_command(f, [claim](const nwint_spec* s, const char* o, char** out) {
        return nwint_certify(s, claim.c_str(), o, out);
      });
    };
  };
  auto* unb = leaf(cert, "unbounded", "Component of J on which |s| exceeds the bound", certify("unbounded"));
  with_interval(unb);
  unb->add_option("--bound", bound, "Bound M");
  auto* dense = leaf(cert, "jump-dense", "Nonzero jumps in every subinterval", certify("jump-dense"));
  with_interval(dense);
  dense->add_option("--samples", samples, "Number of subintervals");
  dense->add_option("--epsilon", epsilon, "Epsilon for the |P_1| route");
  auto* nz = leaf(cert, "jump-nonzero", "Nonzero jump at a rational", certify("jump-nonzero"));
  nz->add_option("--q", q, "Rational point in (0,1)");
  auto* nl = leaf(cert, "non-lebesgue", "Absolute-integral witness", certify("non-lebesgue"));
  nl->add_option("--bound", bound, "Bound M");
  auto* bas = leaf(cert, "basis", "Basic-sequence inequality", certify("basis"));
  bas->add_option("--m1", m1, "Shorter prefix length");
  auto* per = leaf(cert, "perturbation", "Perturbation certificate", certify("perturbation"));
  with_interval(per);
  per->add_option("--N", N, "Bound N on |f|");
  per->add_option("--R", R, "Radius R");

  auto* rep = leaf(&app, "report", "Aggregate certificates", [&] { return run_report(f); });
  rep->add_flag("--bundled", bundled, "Include the built-in checklist");
  rep->add_flag("--full", full, "Run the checklist exhaustively");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(e.what());
    return 1;
  }

  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) f.opts[key] = v;
  };
  put("x", x);
  put("from", from);
  put("to", to);
  put("bound", bound);
  put("q", q);
  put("epsilon", epsilon);
  put("N", N);
  put("R", R);
  if (!interval.empty()) f.opts["interval"] = interval;
  auto put_long = [&](const char* key, long v) {
    if (v != 0) f.opts[key] = v;
  };
  put_long("generation", generation);
  put_long("generations", generations);
  put_long("depth", depth);
  put_long("limit", limit);
  put_long("samples", samples);
  put_long("m1", m1);
  if (bundled) f.opts["bundled"] = true;
  if (full) f.opts["full"] = true;
  if (ev->parsed() && !f.csv.empty() && samples == 0) f.opts["samples"] = 256;

  try {
    return action();
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
}
