#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace erw {

// Base of every error the library throws on purpose. Each subclass names the
// contract that was violated so callers (and the CLI exit-code mapping) can
// dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class RegularityError : public Error { using Error::Error; };
class DegreeError : public Error { using Error::Error; };
class NumericalError : public Error { using Error::Error; };
class ScheduleError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class BudgetError : public Error { using Error::Error; };
class PlanError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class RegimeError : public Error { using Error::Error; };
class TauNonpositive : public Error { using Error::Error; };

class NonUniqueFixedPoint : public Error {
 public:
  NonUniqueFixedPoint(const std::string& what, std::vector<double> roots)
      : Error(what), roots_(std::move(roots)) {}
  const std::vector<double>& roots() const noexcept { return roots_; }

 private:
  std::vector<double> roots_;
};

}  // namespace erw
