#include "erw/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "erw/errors.hpp"

namespace erw {

KSchedule KSchedule::constant(std::int64_t k) {
  if (k < 1) throw ConfigError("constant sample size must be >= 1");
  return KSchedule(Constant{k});
}

KSchedule KSchedule::power(double c, double alpha) {
  if (!(c > 0.0) || !(alpha > 0.0)) throw ConfigError("power schedule needs c > 0 and alpha > 0");
  return KSchedule(Power{c, alpha});
}

KSchedule KSchedule::log(double c) {
  if (!(c > 0.0)) throw ConfigError("log schedule needs c > 0");
  return KSchedule(Log{c});
}

KSchedule KSchedule::table(std::vector<std::int64_t> values) {
  if (values.empty()) throw ConfigError("table schedule is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 1) throw ConfigError("table schedule values must be >= 1");
    if (i > 0 && values[i] < values[i - 1]) throw ConfigError("table schedule must be nondecreasing");
  }
  return KSchedule(Table{std::move(values)});
}

std::int64_t KSchedule::constant_k() const noexcept {
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->k;
  return 0;
}

std::string KSchedule::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          os << "constant(k=" << s.k << ")";
        } else if constexpr (std::is_same_v<T, Power>) {
          os << "power(c=" << s.c << ", alpha=" << s.alpha << ")";
        } else if constexpr (std::is_same_v<T, Log>) {
          os << "log(c=" << s.c << ")";
        } else {
          os << "table(" << s.values.size() << " entries)";
        }
      },
      kind_);
  return os.str();
}

namespace {

// ceil() that ignores representation noise just above an integer.
std::int64_t ceil_tolerant(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(v));
}

std::int64_t clamp_k(std::int64_t k, std::int64_t n) { return std::clamp<std::int64_t>(k, 1, n); }

}  // namespace

std::int64_t k_schedule_eval(const KSchedule& schedule, std::int64_t n) {
  if (n < 1) throw DomainError("k(n) is defined for n >= 1");
  return std::visit(
      [n](const auto& s) -> std::int64_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, KSchedule::Constant>) {
          return s.k;
        } else if constexpr (std::is_same_v<T, KSchedule::Power>) {
          return clamp_k(ceil_tolerant(s.c * std::pow(static_cast<double>(n), s.alpha)), n);
        } else if constexpr (std::is_same_v<T, KSchedule::Log>) {
          return clamp_k(ceil_tolerant(s.c * std::log(static_cast<double>(n))), n);
        } else {
          if (static_cast<std::size_t>(n) > s.values.size()) {
            std::ostringstream os;
            os << "table schedule exhausted at n=" << n << " (" << s.values.size() << " entries)";
            throw ScheduleError(os.str());
          }
          return clamp_k(s.values[static_cast<std::size_t>(n - 1)], n);
        }
      },
      schedule.kind());
}

void ModelConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0,1)");
  if (p == 0.5 && !allow_half) throw ConfigError("p = 1/2 is excluded unless allow_half is set");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q must lie in [0,1]");
  if (spec.kind() == FKind::Table) {
    if (!schedule.is_constant() || schedule.constant_k() != spec.table_k()) {
      std::ostringstream os;
      os << "table reinforcement declares k=" << spec.table_k()
         << " and needs a constant schedule with the same k";
      throw ConfigError(os.str());
    }
  }
}

DriftContext ModelConfig::drift_context() const { return DriftContext(spec, p, sampling, allow_half); }

std::int64_t ModelConfig::warmup_length() const {
  if (sampling == Sampling::WithoutReplacement && schedule.is_constant()) return schedule.constant_k();
  return 1;
}

}  // namespace erw
