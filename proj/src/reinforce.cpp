#include "erw/reinforce.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "erw/errors.hpp"

namespace erw {

std::string_view to_string(FKind kind) {
  switch (kind) {
    case FKind::Constant: return "constant";
    case FKind::Linear: return "linear";
    case FKind::AffineDecreasing: return "affine_decreasing";
    case FKind::Exponential: return "exponential";
    case FKind::Quadratic: return "quadratic";
    case FKind::Majority: return "majority";
    case FKind::Table: return "table";
    case FKind::Custom: return "custom";
  }
  return "?";
}

std::string_view to_string(Continuity c) {
  switch (c) {
    case Continuity::C0: return "C0";
    case Continuity::C1: return "C1";
    case Continuity::C2: return "C2";
    case Continuity::Discontinuous: return "Discontinuous";
  }
  return "?";
}

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::StrictlyIncreasing: return "StrictlyIncreasing";
    case Monotonicity::StrictlyDecreasing: return "StrictlyDecreasing";
    case Monotonicity::NonMonotone: return "NonMonotone";
    case Monotonicity::Constant: return "Constant";
  }
  return "?";
}

std::string_view to_string(Convexity c) {
  switch (c) {
    case Convexity::StrictlyConvex: return "StrictlyConvex";
    case Convexity::StrictlyConcave: return "StrictlyConcave";
    case Convexity::Affine: return "Affine";
    case Convexity::Neither: return "Neither";
  }
  return "?";
}

namespace {

Monotonicity slope_monotonicity(double slope) {
  if (slope > 0) return Monotonicity::StrictlyIncreasing;
  if (slope < 0) return Monotonicity::StrictlyDecreasing;
  return Monotonicity::Constant;
}

void require_unit_interval(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "reinforcement argument " << x << " outside [0,1]";
    throw DomainError(os.str());
  }
}

}  // namespace

ReinforcementSpec ReinforcementSpec::constant(double c) {
  ReinforcementSpec s;
  s.kind_ = FKind::Constant;
  s.name_ = "constant";
  s.params_ = {c};
  s.continuity_ = Continuity::C2;
  s.holder_ = Holder{1.0, 0.0};
  s.lipschitz_ = 0.0;
  s.monotonicity_ = Monotonicity::Constant;
  s.convexity_ = Convexity::Affine;
  s.f_ = [c](double) { return c; };
  s.d1_ = [](double) { return 0.0; };
  s.d2_ = [](double) { return 0.0; };
  s.validate();
  return s;
}

ReinforcementSpec ReinforcementSpec::linear(double c) {
  ReinforcementSpec s;
  s.kind_ = FKind::Linear;
  s.name_ = "linear";
  s.params_ = {c};
  s.continuity_ = Continuity::C2;
  s.holder_ = Holder{1.0, std::abs(c)};
  s.lipschitz_ = std::abs(c);
  s.monotonicity_ = slope_monotonicity(c);
  s.convexity_ = Convexity::Affine;
  s.f_ = [c](double x) { return c * x; };
  s.d1_ = [c](double) { return c; };
  s.d2_ = [](double) { return 0.0; };
  s.validate();
  return s;
}

ReinforcementSpec ReinforcementSpec::affine_decreasing(double c) {
  ReinforcementSpec s;
  s.kind_ = FKind::AffineDecreasing;
  s.name_ = "affine_decreasing";
  s.params_ = {c};
  s.continuity_ = Continuity::C2;
  s.holder_ = Holder{1.0, std::abs(c)};
  s.lipschitz_ = std::abs(c);
  s.monotonicity_ = slope_monotonicity(-c);
  s.convexity_ = Convexity::Affine;
  s.f_ = [c](double x) { return c * (1.0 - x); };
  s.d1_ = [c](double) { return -c; };
  s.d2_ = [](double) { return 0.0; };
  s.validate();
  return s;
}

ReinforcementSpec ReinforcementSpec::exponential(double c) {
  ReinforcementSpec s;
  s.kind_ = FKind::Exponential;
  s.name_ = "exponential";
  s.params_ = {c};
  s.continuity_ = Continuity::C2;
  const double lip = std::abs(c) * std::numbers::e;
  s.holder_ = Holder{1.0, lip};
  s.lipschitz_ = lip;
  s.monotonicity_ = slope_monotonicity(c);
  s.convexity_ = c > 0 ? Convexity::StrictlyConvex
                       : (c < 0 ? Convexity::StrictlyConcave : Convexity::Affine);
  s.f_ = [c](double x) { return c * std::exp(x); };
  s.d1_ = [c](double x) { return c * std::exp(x); };
  s.d2_ = [c](double x) { return c * std::exp(x); };
  s.validate();
  return s;
}

ReinforcementSpec ReinforcementSpec::quadratic(double a, double b, double c) {
  ReinforcementSpec s;
  s.kind_ = FKind::Quadratic;
  s.name_ = "quadratic";
  s.params_ = {a, b, c};
  s.continuity_ = Continuity::C2;
  // f' is affine, so its extremes on [0,1] sit at the endpoints.
  const double slope0 = b;
  const double slope1 = 2.0 * a + b;
  const double lip = std::max(std::abs(slope0), std::abs(slope1));
  s.holder_ = Holder{1.0, lip};
  s.lipschitz_ = lip;
  if (a == 0.0 && b == 0.0) {
    s.monotonicity_ = Monotonicity::Constant;
  } else if (slope0 >= 0.0 && slope1 >= 0.0) {
    s.monotonicity_ = Monotonicity::StrictlyIncreasing;
  } else if (slope0 <= 0.0 && slope1 <= 0.0) {
    s.monotonicity_ = Monotonicity::StrictlyDecreasing;
  } else {
    s.monotonicity_ = Monotonicity::NonMonotone;
  }
  s.convexity_ = a > 0 ? Convexity::StrictlyConvex
                       : (a < 0 ? Convexity::StrictlyConcave : Convexity::Affine);
  s.f_ = [a, b, c](double x) { return (a * x + b) * x + c; };
  s.d1_ = [a, b](double x) { return 2.0 * a * x + b; };
  s.d2_ = [a](double) { return 2.0 * a; };
  s.validate();
  return s;
}

ReinforcementSpec ReinforcementSpec::majority() {
  ReinforcementSpec s;
  s.kind_ = FKind::Majority;
  s.name_ = "majority";
  s.continuity_ = Continuity::Discontinuous;
  s.monotonicity_ = Monotonicity::NonMonotone;
  s.convexity_ = Convexity::Neither;
  s.f_ = [](double x) { return x > 0.5 ? 1.0 : (x < 0.5 ? 0.0 : 0.5); };
  s.validate();
  return s;
}

ReinforcementSpec ReinforcementSpec::table(std::vector<double> values) {
  if (values.size() < 2) throw ConfigError("table reinforcement needs at least two grid values");
  ReinforcementSpec s;
  s.kind_ = FKind::Table;
  s.name_ = "table";
  s.params_ = std::move(values);
  s.continuity_ = Continuity::Discontinuous;

  const auto& v = s.params_;
  bool inc = true, dec = true, flat = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    inc = inc && v[i] > v[i - 1];
    dec = dec && v[i] < v[i - 1];
    flat = flat && v[i] == v[i - 1];
  }
  s.monotonicity_ = flat ? Monotonicity::Constant
                         : inc ? Monotonicity::StrictlyIncreasing
                               : dec ? Monotonicity::StrictlyDecreasing : Monotonicity::NonMonotone;
  bool convex = true, concave = true, affine = true;
  for (std::size_t i = 2; i < v.size(); ++i) {
    const double d2 = v[i] - 2.0 * v[i - 1] + v[i - 2];
    convex = convex && d2 > 0;
    concave = concave && d2 < 0;
    affine = affine && d2 == 0;
  }
  s.convexity_ = affine ? Convexity::Affine
                        : convex ? Convexity::StrictlyConvex
                                 : concave ? Convexity::StrictlyConcave : Convexity::Neither;
  const int k = static_cast<int>(v.size()) - 1;
  auto grid = s.params_;
  s.f_ = [grid, k](double x) {
    const double scaled = x * k;
    const double idx = std::round(scaled);
    if (std::abs(scaled - idx) > 1e-9) {
      std::ostringstream os;
      os << "table reinforcement queried off its grid at x=" << x << " (k=" << k << ")";
      throw DomainError(os.str());
    }
    return grid[static_cast<std::size_t>(idx)];
  };
  for (double value : v) {
    if (!(value >= 0.0 && value <= 1.0)) throw RangeError("table reinforcement value outside [0,1]");
  }
  return s;
}

ReinforcementSpec ReinforcementSpec::custom(CustomReinforcement parts) {
  if (!parts.f) throw ConfigError("custom reinforcement without an evaluator");
  ReinforcementSpec s;
  s.kind_ = FKind::Custom;
  s.name_ = parts.name.empty() ? "custom" : parts.name;
  s.continuity_ = parts.continuity;
  s.holder_ = parts.holder;
  s.lipschitz_ = parts.lipschitz;
  if (s.lipschitz_ && !s.holder_) s.holder_ = Holder{1.0, *s.lipschitz_};
  s.monotonicity_ = parts.monotonicity;
  s.convexity_ = parts.convexity;
  s.f_ = std::move(parts.f);
  s.d1_ = std::move(parts.d1);
  s.d2_ = std::move(parts.d2);
  s.modulus_bound_ = std::move(parts.modulus_bound);
  s.validate();
  return s;
}

int ReinforcementSpec::table_k() const noexcept {
  return kind_ == FKind::Table ? static_cast<int>(params_.size()) - 1 : 0;
}

double ReinforcementSpec::operator()(double x) const { return evaluate_f(*this, x); }

void ReinforcementSpec::validate() const {
  for (int i = 0; i <= kValidationGrid; ++i) {
    const double x = static_cast<double>(i) / kValidationGrid;
    const double v = f_(x);
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream os;
      os << name_ << " reinforcement leaves [0,1]: f(" << x << ") = " << v;
      throw RangeError(os.str());
    }
  }
}

double evaluate_f(const ReinforcementSpec& spec, double x) {
  require_unit_interval(x);
  return spec.f_(x);
}

double derivative_f(const ReinforcementSpec& spec, double x, int order) {
  if (order != 1 && order != 2) throw DomainError("derivative order must be 1 or 2");
  require_unit_interval(x);
  const Continuity c = spec.continuity_;
  const bool admits = (order == 1 && (c == Continuity::C1 || c == Continuity::C2)) ||
                      (order == 2 && c == Continuity::C2);
  if (!admits) {
    std::ostringstream os;
    os << spec.name_ << " reinforcement is " << to_string(c) << "; derivative of order " << order
       << " not available";
    throw RegularityError(os.str());
  }
  if (order == 1 && spec.d1_) return spec.d1_(x);
  if (order == 2 && spec.d2_) return spec.d2_(x);

  const auto& f = spec.f_;
  if (order == 1) {
    const double h = kFirstDifferenceStep;
    if (x - h < 0.0) return (f(x + h) - f(x)) / h;
    if (x + h > 1.0) return (f(x) - f(x - h)) / h;
    return (f(x + h) - f(x - h)) / (2.0 * h);
  }
  const double h = kSecondDifferenceStep;
  if (x - h < 0.0) return (f(x) - 2.0 * f(x + h) + f(x + 2.0 * h)) / (h * h);
  if (x + h > 1.0) return (f(x) - 2.0 * f(x - h) + f(x - 2.0 * h)) / (h * h);
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

std::optional<double> modulus_of_continuity_bound(const ReinforcementSpec& spec, double delta) {
  if (!(delta > 0.0)) throw DomainError("modulus of continuity needs delta > 0");
  if (spec.modulus_bound_) return spec.modulus_bound_(delta);
  if (spec.holder_) return spec.holder_->constant * std::pow(delta, spec.holder_->exponent);
  if (spec.lipschitz_) return *spec.lipschitz_ * delta;
  return std::nullopt;
}

}  // namespace erw
