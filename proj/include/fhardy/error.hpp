#pragma once

#include <stdexcept>
#include <string>

namespace fhardy {

/// Argument outside the mathematical domain of an operation (s not in (0,1),
/// x <= 0 for log_gamma, a set escaping its ambient domain, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An iterative routine ran out of budget before reaching its tolerance.
class convergence_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (domain grammar, CLI values).
class parse_error : public std::invalid_argument {
public:
  parse_error(const std::string& what, std::string token)
      : std::invalid_argument(what + ": '" + token + "'"), token_(std::move(token)) {}

  const std::string& token() const noexcept { return token_; }

private:
  std::string token_;
};

namespace detail {

inline void require(bool ok, const char* msg) {
  if (!ok) throw domain_error(msg);
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw domain_error(msg);
}

inline void require_fractional_order(double s) {
  if (!(s > 0.0 && s < 1.0)) throw domain_error("fractional order s must lie in (0,1), got " + std::to_string(s));
}

}  // namespace detail
}  // namespace fhardy
