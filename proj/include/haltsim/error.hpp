#pragma once

#include <stdexcept>
#include <string>

namespace haltsim {

/// Broad failure classes. The CLI maps each to a distinct nonzero exit code.
enum class ErrorCategory {
  input = 2,        // precondition violated by the caller
  truncation = 3,   // Fock truncation too small for the requested accuracy
  integration = 4,  // ODE / split-step accuracy budget exceeded
  no_solution = 5,  // algebraic condition has no admissible root
  infeasible = 6,   // design search exhausted
  schedule = 7,     // inconsistent protocol timing
  validation = 8,   // a self-check invariant failed
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::input: return "input";
    case ErrorCategory::truncation: return "truncation";
    case ErrorCategory::integration: return "integration";
    case ErrorCategory::no_solution: return "no-solution";
    case ErrorCategory::infeasible: return "infeasible";
    case ErrorCategory::schedule: return "schedule";
    case ErrorCategory::validation: return "validation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), category_(category), module_(module) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCategory category_;
  std::string module_;
};

}  // namespace haltsim
