#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "erw/model.hpp"

namespace erw {

/// Fixed k: roots of H(x) - x on [-1,1].
struct ConstantK {
  std::int64_t k = 1;
};
/// k(n) -> infinity: roots of g(x) - x on [0,1].
struct GrowingLimit {};
using KOrLimit = std::variant<ConstantK, GrowingLimit>;

/// The drift target a model's long-run behaviour is governed by.
KOrLimit drift_target(const ModelConfig& model);

struct FixedPointSet {
  std::vector<double> roots;     // ascending
  std::vector<bool> tangential;  // parallel to roots; true for near-roots without a sign change
  std::vector<std::string> warnings;
};

inline constexpr int kFixedPointGrid = 4096;
inline constexpr double kFixedPointTol = 1e-12;
/// Largest |h(x)| accepted at a reported root.
inline constexpr double kFixedPointResidual = 1e-9;

/// Bisects every sign change of h on a uniform grid down to width `tol`.
/// Sign changes across a jump of a discontinuous f are dropped with a
/// warning; grid minima of |h| below 1e-9 without a sign change are added as
/// tangential roots.
FixedPointSet find_fixed_points(const DriftContext& ctx, KOrLimit target, int grid_size = kFixedPointGrid,
                                double tol = kFixedPointTol);

/// h(x) = H(x) - x (constant k) or g(x) - x (growing limit).
double fixed_point_residual(const DriftContext& ctx, KOrLimit target, double x);

/// 1 - H'(x*) or 1 - (2p-1) f'(x*). DomainError if x* is not a fixed point.
double compute_tau(const DriftContext& ctx, KOrLimit target, double x_star);

enum class Regime { Superdiffusive, Critical, Diffusive, Indeterminate };
std::string_view to_string(Regime regime);

struct RegimeClass {
  Regime regime = Regime::Indeterminate;
  std::string scaling;
  std::vector<std::string> warnings;
};

inline constexpr double kCriticalTol = 1e-9;
/// |tau - 1/2| below this draws a near-critical warning.
inline constexpr double kNearCriticalBand = 1e-3;

RegimeClass classify_regime(double tau, double crit_tol = kCriticalTol);

struct RegimeReport {
  std::vector<double> fixed_points;
  bool unique = false;
  std::optional<double> x_star;
  std::optional<double> tau;
  Regime regime = Regime::Indeterminate;
  std::optional<double> centering;  // x* (constant k) or 2x* - 1 (growing k)
  std::string scaling_exponent;
  std::optional<double> predicted_variance;
  std::vector<std::string> warnings;
};

/// Full report; non-unique or degenerate cases come back Indeterminate.
RegimeReport analyze_regime(const ModelConfig& model);

/// As analyze_regime, but throws NonUniqueFixedPoint or TauNonpositive
/// instead of returning an Indeterminate report.
RegimeReport predicted_clt(const ModelConfig& model);

// ---------------------------------------------------------------------------
// Hypothesis checks

enum class Status { Holds, Fails, Unknown };
std::string_view to_string(Status status);

struct ConditionResult {
  Status status = Status::Unknown;
  std::string evidence;
};

inline constexpr std::array<std::string_view, 23> kConditionIds = {
    "A1", "A2", "B1", "B2", "B3", "C1", "C2", "D1", "D2", "E1", "E2", "F1",
    "F2", "F3", "F4", "G1", "G2", "G3", "S5", "S6", "S7", "S8", "Cor1"};

struct ConditionReport {
  std::map<std::string, ConditionResult, std::less<>> results;

  const ConditionResult& at(std::string_view id) const;
  Status status(std::string_view id) const { return at(id).status; }
};

/// Sign margin for the H' / H'' scans.
inline constexpr double kSignMargin = 1e-12;
/// Slack in comparisons between f-grid values.
inline constexpr double kGridTol = 1e-12;

ConditionReport check_conditions(const ModelConfig& model);

}  // namespace erw
