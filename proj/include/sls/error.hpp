#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sls {

/// Broad failure class; the CLI maps it to an exit code.
enum class error_category { validation, numerical };

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
  error(error_category cat, const std::string& what)
      : std::runtime_error(what), category_(cat) {}

  error_category category() const noexcept { return category_; }

private:
  error_category category_;
};

#define SLS_DEFINE_ERROR(name, cat)                                          \
  class name : public error {                                                \
  public:                                                                    \
    explicit name(const std::string& what)                                   \
        : error(error_category::cat, std::string(#name ": ") + what) {}      \
  };

// Input validation.
SLS_DEFINE_ERROR(unknown_token, validation)
SLS_DEFINE_ERROR(format_error, validation)
SLS_DEFINE_ERROR(non_total_transition, validation)
SLS_DEFINE_ERROR(dangling_state, validation)
SLS_DEFINE_ERROR(unknown_proposition, validation)
SLS_DEFINE_ERROR(row_sum_error, validation)
SLS_DEFINE_ERROR(empty_action_set, validation)
SLS_DEFINE_ERROR(owner_mismatch, validation)
SLS_DEFINE_ERROR(alphabet_mismatch, validation)
SLS_DEFINE_ERROR(not_invariant_form, validation)
SLS_DEFINE_ERROR(degenerate_region, validation)

// Numerical failure.
SLS_DEFINE_ERROR(numerical_failure, numerical)
SLS_DEFINE_ERROR(non_convergence, numerical)
SLS_DEFINE_ERROR(improper_policy, numerical)
SLS_DEFINE_ERROR(singular_system, numerical)
SLS_DEFINE_ERROR(iteration_cap, numerical)

#undef SLS_DEFINE_ERROR

/// Malformed formula text; carries the byte offset of the offending token.
class syntax_error : public error {
public:
  syntax_error(std::size_t offset, const std::string& what)
      : error(error_category::validation,
              "syntax_error at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

}  // namespace sls
