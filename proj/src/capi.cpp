#include "nwint/nwint.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "app/commands.hpp"
#include "nwint/error.hpp"

struct nwint_spec {
  nwint::app::FunctionSpec spec;
};

namespace {

using nwint::app::json;

thread_local std::string last_error;

nwint_status fail(nwint_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

json parse_options(const char* options) {
  if (!options || !*options) return json::object();
  json o = json::parse(options, nullptr, false);
  if (o.is_discarded() || !o.is_object())
    throw nwint::Error(nwint::ErrorCode::InvalidArgument, "options must be a JSON object");
  return o;
}

// Runs a command, serializes its document and maps exceptions to statuses.
template <class F>
nwint_status run(char** out, F&& command) {
  if (!out) return fail(NWINT_INVALID_ARGUMENT, "output pointer is null");
  *out = nullptr;
  last_error.clear();
  try {
    json doc = command();
    *out = dup(doc.dump(2));
    if (!*out) return fail(NWINT_INTERNAL, "out of memory");
    std::string status = doc.value("status", "ok");
    if (status == "inconclusive") return NWINT_INCONCLUSIVE;
    if (status == "error") return fail(NWINT_REPORT_HAS_ERRORS, "some report entries failed");
    return NWINT_OK;
  } catch (const nwint::Error& e) {
    return fail(static_cast<nwint_status>(e.code()), std::string(nwint::error_code_name(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    return fail(NWINT_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

nwint_status nwint_spec_from_json(const char* text, nwint_spec** out) {
  if (!out) return fail(NWINT_INVALID_ARGUMENT, "output pointer is null");
  *out = nullptr;
  if (!text) return fail(NWINT_INVALID_SPEC, "spec text is null");
  try {
    *out = new nwint_spec{nwint::app::parse_spec_text(text)};
    last_error.clear();
    return NWINT_OK;
  } catch (const nwint::Error& e) {
    return fail(static_cast<nwint_status>(e.code()), std::string(nwint::error_code_name(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    return fail(NWINT_INVALID_SPEC, e.what());
  }
}

void nwint_spec_free(nwint_spec* spec) { delete spec; }

nwint_status nwint_spec_set_budget(nwint_spec* spec, const char* assignments) {
  if (!spec || !assignments) return fail(NWINT_INVALID_ARGUMENT, "null argument");
  try {
    nwint::app::Budget b = spec->spec.budget;
    b.apply(std::string_view(assignments));
    spec->spec.budget = b;
    return NWINT_OK;
  } catch (const nwint::Error& e) {
    return fail(static_cast<nwint_status>(e.code()), e.what());
  }
}

#define NWINT_SPEC_COMMAND(name, call)                                                      \
  nwint_status name(const nwint_spec* spec, const char* options, char** out) {             \
    if (!spec) return fail(NWINT_INVALID_ARGUMENT, "spec is null");                        \
    return run(out, [&] { return nwint::app::call(spec->spec, parse_options(options)); }); \
  }

NWINT_SPEC_COMMAND(nwint_tower_build, tower_build)
NWINT_SPEC_COMMAND(nwint_tower_show, tower_show)
NWINT_SPEC_COMMAND(nwint_fn_eval, fn_eval)
NWINT_SPEC_COMMAND(nwint_fn_integrate, fn_integrate)

#undef NWINT_SPEC_COMMAND

nwint_status nwint_norm(const nwint_spec* spec, const char* which, const char* options, char** out) {
  if (!spec || !which) return fail(NWINT_INVALID_ARGUMENT, "null argument");
  return run(out, [&] { return nwint::app::norm(spec->spec, which, parse_options(options)); });
}

nwint_status nwint_certify(const nwint_spec* spec, const char* claim, const char* options, char** out) {
  if (!spec || !claim) return fail(NWINT_INVALID_ARGUMENT, "null argument");
  return run(out, [&] { return nwint::app::certify(spec->spec, claim, parse_options(options)); });
}

nwint_status nwint_report(const nwint_spec* const* specs, size_t count, const char* options, char** out) {
  if (count && !specs) return fail(NWINT_INVALID_ARGUMENT, "spec array is null");
  return run(out, [&] {
    std::vector<nwint::app::FunctionSpec> list;
    for (size_t i = 0; i < count; ++i) {
      if (!specs[i]) throw nwint::Error(nwint::ErrorCode::InvalidArgument, "spec is null");
      list.push_back(specs[i]->spec);
    }
    return nwint::app::report(list, parse_options(options));
  });
}

void nwint_string_free(char* s) { std::free(s); }

const char* nwint_last_error(void) { return last_error.c_str(); }

const char* nwint_status_name(nwint_status status) {
  switch (status) {
    case NWINT_OK: return "Ok";
    case NWINT_INCONCLUSIVE: return "InconclusiveAtBudget";
    case NWINT_REPORT_HAS_ERRORS: return "ReportHasErrors";
    case NWINT_INTERNAL: return "Internal";
    default:
      if (status >= NWINT_INVALID_ARGUMENT && status <= NWINT_UNSUPPORTED)
        return nwint::error_code_name(static_cast<nwint::ErrorCode>(status));
      return "Unknown";
  }
}

const char* nwint_version(void) { return nwint::app::library_version(); }

}  // extern "C"
