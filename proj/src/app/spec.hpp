#pragma once

// Function specs read from JSON, and JSON encodings of the core types.

#include <json.hpp>
#include <string>
#include <string_view>
#include <variant>

#include "nwint/bvfn.hpp"
#include "nwint/kurzweil.hpp"
#include "nwint/towerfn.hpp"

namespace nwint::app {

using json = nlohmann::json;

struct Budget {
  long maxgen = 20;
  long depth = 20;
  long terms = 64;
  long precision = 128;
  Rational tolerance = Rational(1, 1000000);
  long max_index = 100000;
  long max_boxes = 2000000;

  /// "k=v,k=v"; throws InvalidSpec on unknown keys or non-positive values.
  void apply(std::string_view assignments);
  void apply(const json& object);
  json to_json() const;
};

struct ShiftCombination {
  std::vector<ShiftTerm> terms;
};

using Body = std::variant<StepSeries, JumpPolynomial, OscCombination, ShiftCombination, StepFunction>;

struct FunctionSpec {
  std::string kind;
  Body body;
  Budget budget;
  json claims;       // optional list of claim requests
  std::string hash;  // FNV-1a of the canonical body
};

/// Throws Error(InvalidSpec) with a diagnostic on malformed input.
FunctionSpec parse_spec(const json& doc);
FunctionSpec parse_spec_text(std::string_view text);

Rational rational_of(const json& j, const char* what);
json to_json(const Rational& r);
json to_json(const Enclosure& e);
json to_json(const Interval& i);

std::string fnv1a_hex(std::string_view bytes);
const char* library_version();

}  // namespace nwint::app
