#pragma once

// Spec-in, JSON-out commands behind the C API. Every document carries a
// "status" of "ok" or "inconclusive"; certificates also carry a "verdict".
// Failures throw nwint::Error.

#include <vector>

#include "app/spec.hpp"

namespace nwint::app {

json certificate(const std::string& claim, bool certified, json payload, const std::string& spec_hash,
                 const json& budget);

bool is_inconclusive(const json& doc);

json tower_build(const FunctionSpec& spec, const json& opts);
json tower_show(const FunctionSpec& spec, const json& opts);
json fn_eval(const FunctionSpec& spec, const json& opts);
json fn_integrate(const FunctionSpec& spec, const json& opts);
/// which: "l1", "bv" or "alexiewicz".
json norm(const FunctionSpec& spec, const std::string& which, const json& opts);
/// claim: a certificate kind or a CLI alias (jump-dense, basis).
json certify(const FunctionSpec& spec, const std::string& claim, const json& opts);

/// Claims of each spec (its "claims" list, or defaults for its kind), then
/// the bundled checklist when opts.bundled is set.
json report(const std::vector<FunctionSpec>& specs, const json& opts);

/// One certificate per acceptance criterion. Criterion 9 checks every
/// 97th coefficient assignment unless `full`.
json checklist(bool full);

}  // namespace nwint::app
