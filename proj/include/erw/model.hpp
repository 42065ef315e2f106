#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "erw/drift.hpp"
#include "erw/reinforce.hpp"

namespace erw {

/// Sample-size schedule k(n). Growing kinds evaluate clamp(ceil(formula), 1, n);
/// Constant(k) is returned as is.
class KSchedule {
 public:
  struct Constant { std::int64_t k; };
  struct Power { double c; double alpha; };
  struct Log { double c; };
  struct Table { std::vector<std::int64_t> values; };
  using Variant = std::variant<Constant, Power, Log, Table>;

  static KSchedule constant(std::int64_t k);
  static KSchedule power(double c, double alpha);
  static KSchedule log(double c);
  static KSchedule table(std::vector<std::int64_t> values);

  const Variant& kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return std::holds_alternative<Constant>(kind_); }
  /// Fixed k for Constant schedules; 0 for growing kinds.
  std::int64_t constant_k() const noexcept;
  std::string describe() const;

 private:
  explicit KSchedule(Variant v) : kind_(std::move(v)) {}
  Variant kind_;
};

/// k(n) for n >= 1; ScheduleError if a Table schedule is exhausted.
std::int64_t k_schedule_eval(const KSchedule& schedule, std::int64_t n);

/// Complete walk specification.
struct ModelConfig {
  double p = 0.75;
  double q = 0.5;
  Sampling sampling = Sampling::WithReplacement;
  KSchedule schedule = KSchedule::constant(1);
  ReinforcementSpec spec = ReinforcementSpec::linear(1.0);
  bool allow_half = false;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  DriftContext drift_context() const;
  /// Steps generated i.i.d. Rademacher(q) before sampling starts: k for a
  /// constant-k without-replacement walk, 1 otherwise.
  std::int64_t warmup_length() const;
};

}  // namespace erw
