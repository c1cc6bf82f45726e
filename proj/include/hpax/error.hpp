#pragma once
#include <stdexcept>
#include <string>

namespace hpax {

enum class errc {
  ok = 0,
  invalid_argument,
  domain_error,
  guard_violation,
  unsupported_case,
  no_convergence,
  infeasible_history,
  internal_error,
};

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

struct invalid_argument_error : error {
  explicit invalid_argument_error(const std::string& w) : error(errc::invalid_argument, w) {}
};
struct domain_error : error {
  explicit domain_error(const std::string& w) : error(errc::domain_error, w) {}
};
struct guard_violation : error {
  explicit guard_violation(const std::string& w) : error(errc::guard_violation, w) {}
};
struct unsupported_case : error {
  explicit unsupported_case(const std::string& w) : error(errc::unsupported_case, w) {}
};
struct no_convergence : error {
  explicit no_convergence(const std::string& w) : error(errc::no_convergence, w) {}
};
struct infeasible_history : error {
  explicit infeasible_history(const std::string& w) : error(errc::infeasible_history, w) {}
};
struct internal_error : error {
  explicit internal_error(const std::string& w) : error(errc::internal_error, w) {}
};

}  // namespace hpax
