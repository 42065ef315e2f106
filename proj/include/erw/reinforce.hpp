#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace erw {

enum class FKind { Constant, Linear, AffineDecreasing, Exponential, Quadratic, Majority, Table, Custom };
enum class Continuity { C0, C1, C2, Discontinuous };
// Strict monotonicity only; a non-decreasing step function is NonMonotone.
enum class Monotonicity { StrictlyIncreasing, StrictlyDecreasing, NonMonotone, Constant };
enum class Convexity { StrictlyConvex, StrictlyConcave, Affine, Neither };

std::string_view to_string(FKind kind);
std::string_view to_string(Continuity c);
std::string_view to_string(Monotonicity m);
std::string_view to_string(Convexity c);

/// Hoelder data: |f(x) - f(y)| <= constant * |x - y|^exponent on [0,1].
struct Holder {
  double exponent = 1.0;
  double constant = 0.0;
};

using ScalarFn = std::function<double(double)>;

/// Everything a compiled-in custom reinforcement function has to declare.
struct CustomReinforcement {
  std::string name;
  ScalarFn f;
  Continuity continuity = Continuity::C0;
  std::optional<Holder> holder;
  std::optional<double> lipschitz;
  Monotonicity monotonicity = Monotonicity::NonMonotone;
  Convexity convexity = Convexity::Neither;
  ScalarFn d1;
  ScalarFn d2;
  ScalarFn modulus_bound;
};

/// A reinforcement function f: [0,1] -> [0,1] together with the regularity
/// metadata consumed by the condition checker. Instances are immutable and
/// are range-validated on construction; an invalid catalog parameter throws
/// RangeError immediately.
class ReinforcementSpec {
 public:
  /// f(x) = c.
  static ReinforcementSpec constant(double c);
  /// f(x) = c x.
  static ReinforcementSpec linear(double c);
  /// f(x) = c (1 - x).
  static ReinforcementSpec affine_decreasing(double c);
  /// f(x) = c e^x.
  static ReinforcementSpec exponential(double c);
  /// f(x) = a x^2 + b x + c.
  static ReinforcementSpec quadratic(double a, double b = 0.0, double c = 0.0);
  /// 1 above one half, 0 below, 1/2 on the tie.
  static ReinforcementSpec majority();
  /// Grid values f(i/k), i = 0..k, with k = values.size() - 1.
  static ReinforcementSpec table(std::vector<double> values);
  static ReinforcementSpec custom(CustomReinforcement parts);

  FKind kind() const noexcept { return kind_; }
  const std::vector<double>& params() const noexcept { return params_; }
  Continuity continuity() const noexcept { return continuity_; }
  const std::optional<Holder>& holder() const noexcept { return holder_; }
  const std::optional<double>& lipschitz() const noexcept { return lipschitz_; }
  Monotonicity monotonicity() const noexcept { return monotonicity_; }
  Convexity convexity() const noexcept { return convexity_; }
  bool has_d1() const noexcept { return static_cast<bool>(d1_); }
  bool has_d2() const noexcept { return static_cast<bool>(d2_); }
  bool has_modulus_bound() const noexcept { return static_cast<bool>(modulus_bound_); }
  const std::string& name() const noexcept { return name_; }

  /// Declared grid size for Table specs, 0 otherwise.
  int table_k() const noexcept;

  double operator()(double x) const;

 private:
  ReinforcementSpec() = default;
  void validate() const;

  friend double evaluate_f(const ReinforcementSpec&, double);
  friend double derivative_f(const ReinforcementSpec&, double, int);
  friend std::optional<double> modulus_of_continuity_bound(const ReinforcementSpec&, double);

  FKind kind_ = FKind::Custom;
  std::string name_;
  std::vector<double> params_;
  Continuity continuity_ = Continuity::C0;
  std::optional<Holder> holder_;
  std::optional<double> lipschitz_;
  Monotonicity monotonicity_ = Monotonicity::NonMonotone;
  Convexity convexity_ = Convexity::Neither;
  ScalarFn f_;
  ScalarFn d1_;
  ScalarFn d2_;
  ScalarFn modulus_bound_;
};

/// f(x) for x in [0,1]; DomainError outside, or off-grid for Table specs.
double evaluate_f(const ReinforcementSpec& spec, double x);

/// First or second derivative. Uses the analytic form when present, else a
/// central difference (one-sided at 0 and 1). RegularityError when the
/// declared continuity class does not admit `order`.
double derivative_f(const ReinforcementSpec& spec, double x, int order);

/// Upper bound on sup{|f(x)-f(y)| : |x-y| < delta}, or nullopt if nothing
/// declared supports one.
std::optional<double> modulus_of_continuity_bound(const ReinforcementSpec& spec, double delta);

/// Step used by the first-derivative fallback.
inline constexpr double kFirstDifferenceStep = 1e-6;
/// Step used by the second-derivative fallback.
inline constexpr double kSecondDifferenceStep = 1e-4;
/// Points in the eager range scan.
inline constexpr int kValidationGrid = 10000;

}  // namespace erw
