#pragma once

#include <string>
#include <vector>

#include "gconvex/approx.hpp"
#include "gconvex/gcf_io.hpp"

namespace gcx::validate {

struct SuiteResult {
  std::string suite;
  std::vector<ValidationReport> checks;
  std::vector<std::string> notes;  // diagnostics that are not pass/fail
  bool pass() const;
};

/// lemmas, lean, uap, gradients, duality, auction-identities
const std::vector<std::string>& suite_names();

/// Runs one named property suite with its fixed seeds. "all" is not a suite
/// here; callers loop over suite_names(). Throws InputError for unknown names.
SuiteResult run_suite(const std::string& name);

SuiteResult lemmas();
SuiteResult lean();
SuiteResult uap();
SuiteResult gradients();
SuiteResult duality();
SuiteResult auction_identities();

/// {suite, pass, checks: [{check_name, instances, max_error, tolerance, pass}]}
Json to_json(const SuiteResult& result);

}  // namespace gcx::validate
