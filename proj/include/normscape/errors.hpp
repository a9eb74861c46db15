#pragma once

#include <stdexcept>
#include <string>

namespace normscape {

// R == P in the canonical payoff tuple; the UV map is undefined.
class DegeneratePayoffs : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// u(1) == u(0); the perceived game cannot be re-expressed in UV form.
class DegenerateUtility : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidTopologyParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration problems surfaced to the CLI (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace normscape
