#include "erw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "erw/errors.hpp"

namespace erw {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

bool is_growing(const KOrLimit& target) { return std::holds_alternative<GrowingLimit>(target); }

}  // namespace

KOrLimit drift_target(const ModelConfig& model) {
  if (model.schedule.is_constant()) return ConstantK{model.schedule.constant_k()};
  return GrowingLimit{};
}

double fixed_point_residual(const DriftContext& ctx, KOrLimit target, double x) {
  if (const auto* c = std::get_if<ConstantK>(&target)) return eval_H(ctx, c->k, x) - x;
  return eval_g(ctx, x) - x;
}

FixedPointSet find_fixed_points(const DriftContext& ctx, KOrLimit target, int grid_size, double tol) {
  if (grid_size < 2) throw DomainError("fixed-point grid needs at least 2 intervals");
  const double lo = is_growing(target) ? 0.0 : -1.0;
  const double hi = 1.0;
  const auto h = [&](double x) { return fixed_point_residual(ctx, target, x); };
  const auto node = [&](int i) {
    return i == grid_size ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size);
  };

  std::vector<double> xs(static_cast<std::size_t>(grid_size + 1));
  std::vector<double> hs(xs.size());
  for (int i = 0; i <= grid_size; ++i) {
    xs[static_cast<std::size_t>(i)] = node(i);
    hs[static_cast<std::size_t>(i)] = h(xs[static_cast<std::size_t>(i)]);
  }

  FixedPointSet out;
  std::vector<std::pair<double, bool>> found;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (hs[i] == 0.0) found.emplace_back(xs[i], false);
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (hs[i] == 0.0 || hs[i + 1] == 0.0 || (hs[i] < 0.0) == (hs[i + 1] < 0.0)) continue;
    double a = xs[i], b = xs[i + 1];
    const bool neg_at_a = hs[i] < 0.0;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double hm = h(mid);
      if (hm == 0.0) {
        a = b = mid;
        break;
      }
      ((hm < 0.0) == neg_at_a ? a : b) = mid;
    }
    const double root = 0.5 * (a + b);
    if (std::abs(h(root)) <= kFixedPointResidual) {
      found.emplace_back(root, false);
    } else {
      out.warnings.push_back("sign change of h near x=" + fmt(root) + " is a jump, not a root");
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = hs[i];
    if (v == 0.0 || std::abs(v) >= kFixedPointResidual) continue;
    const bool left_ok = i == 0 || ((hs[i - 1] < 0.0) == (v < 0.0) && std::abs(hs[i - 1]) >= std::abs(v));
    const bool right_ok =
        i + 1 == xs.size() || ((hs[i + 1] < 0.0) == (v < 0.0) && std::abs(hs[i + 1]) >= std::abs(v));
    if (left_ok && right_ok) {
      found.emplace_back(xs[i], true);
      out.warnings.push_back("tangential near-root at x=" + fmt(xs[i]) + " (|h| < 1e-9, no sign change)");
    }
  }

  std::sort(found.begin(), found.end());
  std::vector<std::pair<double, bool>> merged;
  for (const auto& [x, tangential] : found) {
    if (!merged.empty() && x - merged.back().first <= 1e-9) {
      if (!tangential) merged.back().second = false;
      continue;
    }
    merged.emplace_back(x, tangential);
  }

  // Rounding noise around a double root produces clusters of nearby sign
  // changes. Collapse a run whose gaps stay below the residual threshold;
  // the run is tangential when h keeps its sign across it.
  const double spacing = (hi - lo) / static_cast<double>(grid_size);
  const auto flat_between = [&](double a, double b) {
    for (int j = 1; j < 8; ++j) {
      if (std::abs(h(a + (b - a) * j / 8.0)) > kFixedPointResidual) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < merged.size();) {
    std::size_t j = i;
    while (j + 1 < merged.size() && merged[j + 1].first - merged[j].first < 2 * spacing &&
           flat_between(merged[j].first, merged[j + 1].first)) {
      ++j;
    }
    if (j == i) {
      out.roots.push_back(merged[i].first);
      out.tangential.push_back(merged[i].second);
    } else {
      const double left = std::max(lo, merged[i].first - spacing);
      const double right = std::min(hi, merged[j].first + spacing);
      const double x = 0.5 * (merged[i].first + merged[j].first);
      const bool tangential = (h(left) < 0.0) == (h(right) < 0.0);
      out.roots.push_back(x);
      out.tangential.push_back(tangential);
      out.warnings.push_back("merged " + std::to_string(j - i + 1) + " numerically indistinguishable roots near x=" +
                             fmt(x) + (tangential ? " (tangential)" : ""));
    }
    i = j + 1;
  }
  return out;
}

double compute_tau(const DriftContext& ctx, KOrLimit target, double x_star) {
  if (std::abs(fixed_point_residual(ctx, target, x_star)) > kFixedPointResidual) {
    throw DomainError("x=" + fmt(x_star) + " is not a fixed point");
  }
  if (const auto* c = std::get_if<ConstantK>(&target)) return 1.0 - eval_H_prime(ctx, c->k, x_star);
  return 1.0 - (2.0 * ctx.p() - 1.0) * derivative_f(ctx.spec(), x_star, 1);
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Superdiffusive: return "Superdiffusive";
    case Regime::Critical: return "Critical";
    case Regime::Diffusive: return "Diffusive";
    case Regime::Indeterminate: return "Indeterminate";
  }
  return "?";
}

RegimeClass classify_regime(double tau, double crit_tol) {
  RegimeClass out;
  if (!(tau > 0.0)) {
    out.scaling = "none";
    out.warnings.push_back("tau=" + fmt(tau) + " is not positive; no limit theorem applies");
    return out;
  }
  if (tau > 0.5 + crit_tol) {
    out.regime = Regime::Diffusive;
    out.scaling = "sqrt(n) (S_n/n - centering) -> Gaussian";
  } else if (tau < 0.5 - crit_tol) {
    out.regime = Regime::Superdiffusive;
    out.scaling = "n^tau (S_n/n - centering) -> finite random limit a.s.";
  } else {
    out.regime = Regime::Critical;
    out.scaling = "sqrt(n/ln n) (S_n/n - centering) -> Gaussian";
  }
  if (std::abs(tau - 0.5) < kNearCriticalBand) {
    out.warnings.push_back("tau=" + fmt(tau) + " is within 1e-3 of 1/2; finite-n simulation cannot separate regimes");
  }
  return out;
}

RegimeReport analyze_regime(const ModelConfig& model) {
  model.validate();
  const DriftContext ctx = model.drift_context();
  const KOrLimit target = drift_target(model);
  const bool growing = is_growing(target);

  RegimeReport report;
  if (std::holds_alternative<KSchedule::Table>(model.schedule.kind())) {
    report.warnings.push_back("table schedule analysed as k(n) -> infinity");
  }
  FixedPointSet fps = find_fixed_points(ctx, target);
  report.fixed_points = fps.roots;
  report.warnings.insert(report.warnings.end(), fps.warnings.begin(), fps.warnings.end());
  report.unique = fps.roots.size() == 1;
  if (!report.unique) {
    report.scaling_exponent = "none";
    report.warnings.push_back(fps.roots.empty() ? "no fixed point found"
                                                : std::to_string(fps.roots.size()) + " fixed points; no prediction");
    return report;
  }

  const double x = fps.roots.front();
  report.x_star = x;
  report.centering = growing ? 2.0 * x - 1.0 : x;
  const double lo = growing ? 0.0 : -1.0;
  if (x <= lo || x >= 1.0) {
    report.scaling_exponent = "none";
    report.warnings.push_back("fixed point on the boundary; no regime claim");
    return report;
  }
  const double tau = compute_tau(ctx, target, x);
  report.tau = tau;
  RegimeClass cls = classify_regime(tau);
  report.regime = cls.regime;
  report.scaling_exponent = cls.scaling;
  report.warnings.insert(report.warnings.end(), cls.warnings.begin(), cls.warnings.end());

  const double spread = growing ? 4.0 * x * (1.0 - x) : 1.0 - x * x;
  if (cls.regime == Regime::Diffusive) {
    report.predicted_variance = spread / (2.0 * tau - 1.0);
  } else if (cls.regime == Regime::Critical) {
    report.predicted_variance = spread;
  }
  return report;
}

RegimeReport predicted_clt(const ModelConfig& model) {
  RegimeReport report = analyze_regime(model);
  if (!report.unique) {
    throw NonUniqueFixedPoint(std::to_string(report.fixed_points.size()) + " fixed points", report.fixed_points);
  }
  if (report.tau && !(*report.tau > 0.0)) throw TauNonpositive("tau=" + fmt(*report.tau) + " <= 0");
  return report;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Holds: return "Holds";
    case Status::Fails: return "Fails";
    case Status::Unknown: return "Unknown";
  }
  return "?";
}

const ConditionResult& ConditionReport::at(std::string_view id) const {
  const auto it = results.find(id);
  if (it == results.end()) throw DomainError("unknown condition id " + std::string(id));
  return it->second;
}

namespace {

ConditionResult holds(std::string e) { return {Status::Holds, std::move(e)}; }
ConditionResult fails(std::string e) { return {Status::Fails, std::move(e)}; }
ConditionResult unknown(std::string e) { return {Status::Unknown, std::move(e)}; }

// Signs of a sampled function relative to +-margin.
struct SignScan {
  int positive = 0;
  int negative = 0;
  int near_zero = 0;
  double sup_abs = 0.0;
};

template <class Fn>
SignScan scan_signs(Fn&& fn, int grid) {
  SignScan s;
  for (int i = 1; i < grid; ++i) {
    const double v = fn(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid));
    s.sup_abs = std::max(s.sup_abs, std::abs(v));
    if (v > kSignMargin) {
      ++s.positive;
    } else if (v < -kSignMargin) {
      ++s.negative;
    } else {
      ++s.near_zero;
    }
  }
  return s;
}

bool admits(Continuity have, Continuity need) {
  auto rank = [](Continuity c) {
    switch (c) {
      case Continuity::Discontinuous: return -1;
      case Continuity::C0: return 0;
      case Continuity::C1: return 1;
      case Continuity::C2: return 2;
    }
    return -1;
  };
  return rank(have) >= rank(need);
}

class Checker {
 public:
  explicit Checker(const ModelConfig& model) : model_(model), ctx_(model.drift_context()) {}

  ConditionReport run() {
    ConditionReport r;
    auto& m = r.results;
    const double p = model_.p;
    const double f0 = evaluate_f(model_.spec, 0.0);
    const double f1 = evaluate_f(model_.spec, 1.0);
    const bool a1 = p > 0.5 && f1 < p / (2.0 * p - 1.0);
    const bool a2 = p < 0.5 && f0 < (1.0 - p) / (1.0 - 2.0 * p);
    m["A1"] = a1_result(p, f1);
    m["A2"] = a2_result(p, f0);

    if (model_.schedule.is_constant()) {
      const std::int64_t k = model_.schedule.constant_k();
      constant_k_checks(m, k, a1, a2);
    } else {
      for (const char* id : {"B1", "B2", "B3", "C1", "C2", "D1", "D2", "E1", "E2"}) {
        m[id] = unknown("not applicable: stated for constant k");
      }
    }
    g_checks(m);
    if (model_.schedule.is_constant()) {
      for (const char* id : {"F1", "F2", "F3", "F4", "S5", "S6", "S7", "Cor1"}) {
        m[id] = unknown("not applicable: stated for k(n) -> infinity");
      }
    } else {
      f_checks(m);
      s_checks(m);
    }
    m["S8"] = holds("k(n) >= 1 bounds the series by sum (n+1)^-2 < infinity");
    return r;
  }

 private:
  static ConditionResult a1_result(double p, double f1) {
    if (!(p > 0.5)) return fails("requires p > 1/2, p=" + fmt(p));
    const double bound = p / (2.0 * p - 1.0);
    return f1 < bound ? holds("f(1)=" + fmt(f1) + " < p/(2p-1)=" + fmt(bound))
                      : fails("f(1)=" + fmt(f1) + " >= p/(2p-1)=" + fmt(bound));
  }

  static ConditionResult a2_result(double p, double f0) {
    if (!(p < 0.5)) return fails("requires p < 1/2, p=" + fmt(p));
    const double bound = (1.0 - p) / (1.0 - 2.0 * p);
    return f0 < bound ? holds("f(0)=" + fmt(f0) + " < (1-p)/(1-2p)=" + fmt(bound))
                      : fails("f(0)=" + fmt(f0) + " >= (1-p)/(1-2p)=" + fmt(bound));
  }

  std::vector<double> f_grid(std::int64_t k) const {
    std::vector<double> v(static_cast<std::size_t>(k + 1));
    for (std::int64_t i = 0; i <= k; ++i) {
      v[static_cast<std::size_t>(i)] = evaluate_f(model_.spec, static_cast<double>(i) / static_cast<double>(k));
    }
    return v;
  }

  // Every difference has sign `dir` (within kGridTol) and at least one is strict.
  static bool one_signed(const std::vector<double>& d, int dir) {
    bool strict = false;
    for (double v : d) {
      const double s = dir * v;
      if (s < -kGridTol) return false;
      if (s > kGridTol) strict = true;
    }
    return strict;
  }

  void constant_k_checks(std::map<std::string, ConditionResult, std::less<>>& m, std::int64_t k, bool a1,
                         bool a2) {
    const double p = model_.p;
    constexpr int grid = kFixedPointGrid;

    const SignScan d1 = scan_signs([&](double x) { return eval_H_prime(ctx_, k, x); }, grid);
    if (d1.negative == grid - 1) {
      m["B1"] = holds("H' < -1e-12 at all interior grid points");
    } else if (d1.positive > 0) {
      m["B1"] = fails("H' > 0 at " + std::to_string(d1.positive) + " grid points");
    } else if (d1.negative == 0) {
      m["B1"] = fails("H' vanishes on the grid; H is constant");
    } else {
      m["B1"] = unknown("H' <= 0 but within 1e-12 of zero at " + std::to_string(d1.near_zero) + " points");
    }

    if (k < 2) {
      m["B2"] = fails("k=1: H is affine");
    } else {
      const SignScan d2 = scan_signs([&](double x) { return eval_H_second(ctx_, k, x); }, grid);
      if (d2.positive == grid - 1) {
        m["B2"] = holds("H'' > 1e-12 on the grid (strictly convex)");
      } else if (d2.negative == grid - 1) {
        m["B2"] = holds("H'' < -1e-12 on the grid (strictly concave)");
      } else if (d2.positive > 0 && d2.negative > 0) {
        m["B2"] = fails("H'' changes sign on the grid");
      } else if (d2.positive == 0 && d2.negative == 0) {
        m["B2"] = fails("H'' vanishes on the grid");
      } else {
        m["B2"] = unknown("H'' one-signed except within 1e-12 of zero at " + std::to_string(d2.near_zero) +
                          " points");
      }
    }

    const std::vector<double> fv = f_grid(k);
    const double analytic = static_cast<double>(k) * std::abs(2.0 * p - 1.0);
    double max_dd = 0.0;
    for (std::size_t j = 0; j + 2 < fv.size(); ++j) max_dd = std::max(max_dd, std::abs(fv[j + 2] - 2 * fv[j + 1] + fv[j]));
    const double m2 = static_cast<double>(k) * static_cast<double>(k - 1) * std::abs(2.0 * p - 1.0) * max_dd / 2.0;
    const double gap = 2.0 / grid;
    if (analytic < 1.0) {
      m["B3"] = holds("k|2p-1|=" + fmt(analytic) + " < 1");
    } else if (d1.sup_abs + m2 * gap / 2.0 < 1.0) {
      m["B3"] = holds("grid sup|H'|=" + fmt(d1.sup_abs) + " plus curvature slack " + fmt(m2 * gap / 2.0) + " < 1");
    } else if (d1.sup_abs >= 1.0) {
      m["B3"] = fails("grid sup|H'|=" + fmt(d1.sup_abs) + " >= 1");
    } else {
      m["B3"] = unknown("grid sup|H'|=" + fmt(d1.sup_abs) + " < 1 but the bound between nodes reaches 1");
    }

    std::vector<double> diff(fv.size() - 1);
    for (std::size_t i = 0; i + 1 < fv.size(); ++i) diff[i] = fv[i + 1] - fv[i];
    const bool nonincreasing = one_signed(diff, -1);
    const bool nondecreasing = one_signed(diff, +1);
    m["C1"] = !a1 ? fails("A1 fails")
              : nonincreasing ? holds("f-grid nonincreasing with a strict step")
                              : fails("f-grid not nonincreasing with a strict step");
    m["C2"] = !a2 ? fails("A2 fails")
              : nondecreasing ? holds("f-grid nondecreasing with a strict step")
                              : fails("f-grid not nondecreasing with a strict step");

    if (k < 2) {
      m["D1"] = fails("k=1: no second differences");
      m["D2"] = fails("k=1: no second differences");
    } else {
      std::vector<double> dd(fv.size() - 2);
      for (std::size_t j = 0; j + 2 < fv.size(); ++j) dd[j] = fv[j + 2] + fv[j] - 2.0 * fv[j + 1];
      const bool a = a1 || a2;
      m["D1"] = !a ? fails("neither A1 nor A2 holds")
                : one_signed(dd, +1) ? holds("second differences j=0..k-2 are >= 0, one strictly")
                                     : fails("second differences not all >= 0 with a strict one");
      m["D2"] = !a ? fails("neither A1 nor A2 holds")
                : one_signed(dd, -1) ? holds("second differences j=0..k-2 are <= 0, one strictly")
                                     : fails("second differences not all <= 0 with a strict one");
    }

    const double half_width = 1.0 / (2.0 * static_cast<double>(k));
    if (!(p > 0.5 && p < 0.5 + half_width)) {
      m["E1"] = fails("p=" + fmt(p) + " outside (1/2, " + fmt(0.5 + half_width) + ")");
    } else {
      m["E1"] = a1 ? holds("p in (1/2, 1/2+1/(2k)) and f(1) < p/(2p-1)") : fails("f(1) >= p/(2p-1)");
    }
    if (!(p < 0.5 && p > 0.5 - half_width)) {
      m["E2"] = fails("p=" + fmt(p) + " outside (" + fmt(0.5 - half_width) + ", 1/2)");
    } else {
      m["E2"] = a2 ? holds("p in (1/2-1/(2k), 1/2) and f(0) < (1-p)/(1-2p)") : fails("f(0) >= (1-p)/(1-2p)");
    }
  }

  void g_checks(std::map<std::string, ConditionResult, std::less<>>& m) const {
    const ReinforcementSpec& f = model_.spec;
    const double p = model_.p;
    if (!admits(f.continuity(), Continuity::C1)) {
      m["G1"] = fails(std::string("f is ") + std::string(to_string(f.continuity())) + ", not C1");
    } else if (p > 0.5) {
      m["G1"] = f.monotonicity() == Monotonicity::StrictlyDecreasing ? holds("p > 1/2 and f strictly decreasing")
                                                                      : fails("p > 1/2 but f not strictly decreasing");
    } else if (p < 0.5) {
      m["G1"] = f.monotonicity() == Monotonicity::StrictlyIncreasing ? holds("p < 1/2 and f strictly increasing")
                                                                      : fails("p < 1/2 but f not strictly increasing");
    } else {
      m["G1"] = fails("p = 1/2");
    }

    if (!admits(f.continuity(), Continuity::C2)) {
      m["G2"] = fails(std::string("f is ") + std::string(to_string(f.continuity())) + ", not C2");
    } else if (f.convexity() == Convexity::StrictlyConvex || f.convexity() == Convexity::StrictlyConcave) {
      m["G2"] = holds(std::string("f declared ") + std::string(to_string(f.convexity())));
    } else {
      m["G2"] = fails(std::string("f declared ") + std::string(to_string(f.convexity())));
    }

    if (f.lipschitz()) {
      const double c = *f.lipschitz() * std::abs(2.0 * p - 1.0);
      m["G3"] = c < 1.0 ? holds("c|2p-1|=" + fmt(c) + " < 1") : fails("c|2p-1|=" + fmt(c) + " >= 1");
    } else if (f.continuity() == Continuity::Discontinuous) {
      m["G3"] = fails("discontinuous f is not Lipschitz");
    } else {
      m["G3"] = unknown("no Lipschitz constant declared");
    }
  }

  // Series criteria, decided analytically for power and log schedules.
  void f_checks(std::map<std::string, ConditionResult, std::less<>>& m) const {
    const ReinforcementSpec& f = model_.spec;
    const auto& kind = model_.schedule.kind();
    const bool constant_f = f.monotonicity() == Monotonicity::Constant;
    const bool discontinuous = f.continuity() == Continuity::Discontinuous;

    if (const auto* pw = std::get_if<KSchedule::Power>(&kind)) {
      const double a = std::min(pw->alpha, 1.0);
      const std::string tail = "k(n) ~ n^" + fmt(a);
      if (discontinuous) {
        m["F1"] = fails("f is not C0");
      } else if (constant_f) {
        m["F1"] = holds("f constant: every term vanishes");
      } else if (f.holder()) {
        m["F1"] = holds("Hoelder modulus gives terms O(n^-1-" + fmt(a * f.holder()->exponent / 2) + "); " + tail);
      } else {
        m["F1"] = unknown("no modulus exponent declared for f");
      }
      if (f.holder()) {
        m["F2"] = holds("sum n^-1 k(n)^-" + fmt(f.holder()->exponent / 2) + " converges; " + tail);
      } else {
        m["F2"] = discontinuous ? fails("f is not Hoelder") : unknown("no Hoelder data declared");
      }
      m["F3"] = admits(f.continuity(), Continuity::C1)
                    ? holds("f' bounded, terms O(n^-1-" + fmt(a / 2) + "); " + tail)
                    : fails("f is not C1");
      m["F4"] = admits(f.continuity(), Continuity::C2) ? holds("sum n^-1-" + fmt(a) + " converges")
                                                       : fails("f is not C2");
      return;
    }
    if (std::holds_alternative<KSchedule::Log>(kind)) {
      if (discontinuous) {
        m["F1"] = fails("f is not C0");
      } else if (constant_f) {
        m["F1"] = holds("f constant: every term vanishes");
      } else {
        m["F1"] = fails("modulus of a nonconstant f is >= c*delta; sum 1/(n sqrt(ln n)) diverges");
      }
      m["F2"] = fails("sum 1/(n (ln n)^(a/2)) diverges for a <= 1");
      if (!admits(f.continuity(), Continuity::C1)) {
        m["F3"] = fails("f is not C1");
      } else if (f.convexity() == Convexity::Affine) {
        m["F3"] = holds("f' constant: every term vanishes");
      } else if (admits(f.continuity(), Continuity::C2)) {
        m["F3"] = fails("f'' nonzero somewhere; sum 1/(n ln n) diverges");
      } else {
        m["F3"] = unknown("C1 f without a declared modulus for f'");
      }
      m["F4"] = fails("sum 1/(n ln n) diverges");
      return;
    }
    for (const char* id : {"F1", "F2", "F3", "F4"}) m[id] = unknown("table schedule: series not decidable");
  }

  void s_checks(std::map<std::string, ConditionResult, std::less<>>& m) const {
    const auto& kind = model_.schedule.kind();
    const ReinforcementSpec& f = model_.spec;
    const FixedPointSet fps = find_fixed_points(ctx_, GrowingLimit{});
    std::optional<double> tau;
    if (fps.roots.size() == 1 && fps.roots[0] > 0.0 && fps.roots[0] < 1.0 &&
        admits(f.continuity(), Continuity::C1)) {
      tau = compute_tau(ctx_, GrowingLimit{}, fps.roots[0]);
    }
    if (!tau || !(*tau > 0.0)) {
      const std::string why = !tau ? "tau unavailable (no unique interior fixed point of g, or f not C1)"
                                   : "tau=" + fmt(*tau) + " <= 0";
      for (const char* id : {"S5", "S6", "S7", "Cor1"}) m[id] = unknown(why);
      return;
    }
    const Regime regime = classify_regime(*tau).regime;
    const char* active = regime == Regime::Superdiffusive ? "S5" : regime == Regime::Critical ? "S6" : "S7";
    for (const char* id : {"S5", "S6", "S7"}) {
      if (std::string_view(id) != active) m[id] = unknown("not required at tau=" + fmt(*tau));
    }

    if (const auto* pw = std::get_if<KSchedule::Power>(&kind)) {
      const double a = std::min(pw->alpha, 1.0);
      const double need = regime == Regime::Superdiffusive ? *tau : 0.5;
      const std::string rule = "alpha=" + fmt(a) + (a > need ? " > " : " <= ") + fmt(need) + " (power-schedule rule)";
      m[active] = a > need ? holds(rule) : fails(rule);
      if (!admits(f.continuity(), Continuity::C2)) {
        m["Cor1"] = fails("f is not C2");
      } else {
        m["Cor1"] = a > need ? holds(rule + ", f in C2, unique fixed point of g")
                             : fails(rule);
      }
      return;
    }
    if (std::holds_alternative<KSchedule::Log>(kind)) {
      m[active] = fails("with k(n) ~ ln n the first series diverges");
      m["Cor1"] = fails("k(n) ~ ln n is not Theta(n^alpha)");
      return;
    }
    m[active] = unknown("table schedule: series not decidable");
    m["Cor1"] = unknown("table schedule is not of the form Theta(n^alpha)");
  }

  const ModelConfig& model_;
  DriftContext ctx_;
};

}  // namespace

ConditionReport check_conditions(const ModelConfig& model) {
  model.validate();
  return Checker(model).run();
}

}  // namespace erw
