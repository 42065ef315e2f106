#include "erw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "erw/errors.hpp"
#include "numeric_detail.hpp"

namespace erw {

std::vector<std::int64_t> ExperimentPlan::resolved_checkpoints() const {
  std::vector<std::int64_t> cps = checkpoints.empty() ? dyadic_checkpoints(horizon) : checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

void ExperimentPlan::validate() const {
  try {
    model.validate();
  } catch (const ConfigError& e) {
    throw PlanError(e.what());
  }
  if (replicates < 1) throw PlanError("replicates must be >= 1");
  if (horizon < 1) throw PlanError("horizon must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw PlanError("alpha must lie in (0,1)");
  if (workers < 0) throw PlanError("workers must be >= 0");
  for (std::int64_t c : checkpoints) {
    if (c < 1 || c > horizon) throw PlanError("checkpoints must lie in [1, horizon]");
  }
}

std::size_t SampleMatrix::column(std::int64_t n) const {
  const auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n);
  if (it == checkpoints.end() || *it != n) throw PlanError("n=" + std::to_string(n) + " is not a checkpoint");
  return static_cast<std::size_t>(it - checkpoints.begin());
}

// ---------------------------------------------------------------------------

namespace {

struct Shape {
  double variance_biased;
  double skewness;
  double kurtosis;
};

// Central sums s2..s4 about a fixed shift, over `count` values with mean
// offset d from the shift.
Shape shape_from_sums(double count, double s1, double s2, double s3, double s4) {
  const double d = s1 / count;
  const double m2 = s2 / count - d * d;
  const double m3 = s3 / count - 3 * d * s2 / count + 2 * d * d * d;
  const double m4 = s4 / count - 4 * d * s3 / count + 6 * d * d * s2 / count - 3 * d * d * d * d;
  return {m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

double jackknife_se(const std::vector<double>& leave_out) {
  const double n = static_cast<double>(leave_out.size());
  detail::CompensatedSum mean;
  for (double v : leave_out) mean.add(v);
  const double bar = mean.value() / n;
  detail::CompensatedSum ss;
  for (double v : leave_out) ss.add((v - bar) * (v - bar));
  return std::sqrt((n - 1.0) / n * ss.value());
}

}  // namespace

MomentSummary moment_summary(std::span<const double> samples) {
  const auto r = static_cast<std::int64_t>(samples.size());
  if (r < kMinReplicates) throw DomainError("moment_summary needs at least 100 samples");
  MomentSummary out;
  out.count = r;
  const double n = static_cast<double>(r);

  detail::CompensatedSum sum;
  for (double x : samples) sum.add(x);
  out.mean = sum.value() / n;

  // Power sums of deviations from the full-sample mean.
  detail::CompensatedSum s1, s2, s3, s4;
  for (double x : samples) {
    const double y = x - out.mean;
    s1.add(y);
    s2.add(y * y);
    s3.add(y * y * y);
    s4.add(y * y * y * y);
  }
  const double m2 = s2.value() / n;
  out.variance = s2.value() / (n - 1.0);
  out.se_mean = std::sqrt(out.variance / n);

  const double scale = std::max(1.0, std::abs(out.mean));
  out.shape_defined = m2 > 1e-28 * scale * scale;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> jv(samples.size()), js(samples.size()), jk(samples.size());
  if (out.shape_defined) {
    const Shape full = shape_from_sums(n, s1.value(), s2.value(), s3.value(), s4.value());
    out.skewness = full.skewness;
    out.excess_kurtosis = full.kurtosis;
  } else {
    out.skewness = nan;
    out.excess_kurtosis = nan;
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double y = samples[i] - out.mean;
    const double c = n - 1.0;
    const double t1 = s1.value() - y, t2 = s2.value() - y * y;
    const double t3 = s3.value() - y * y * y, t4 = s4.value() - y * y * y * y;
    const double d = t1 / c;
    jv[i] = (t2 - c * d * d) / (c - 1.0);
    if (out.shape_defined) {
      const Shape s = shape_from_sums(c, t1, t2, t3, t4);
      js[i] = s.skewness;
      jk[i] = s.kurtosis;
    }
  }
  out.se_variance = jackknife_se(jv);
  out.se_skewness = out.shape_defined ? jackknife_se(js) : nan;
  out.se_kurtosis = out.shape_defined ? jackknife_se(jk) : nan;
  return out;
}

double ks_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

KsResult ks_test_normal(std::span<const double> samples, double mu, double sigma2, double alpha) {
  if (!(sigma2 > 0.0)) throw DegenerateError("KS reference variance must be positive");
  if (static_cast<std::int64_t>(samples.size()) < kMinReplicates) {
    throw DomainError("KS test needs at least 100 samples");
  }
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  const double sd = std::sqrt(sigma2);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-(xs[i] - mu) / (sd * std::sqrt(2.0)));
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  KsResult out;
  out.statistic = d;
  out.critical = ks_critical_value(alpha);
  out.pass = std::sqrt(n) * d <= out.critical;
  return out;
}

StabilityTable superdiffusive_stability(const SampleMatrix& samples, double tau, double centering) {
  if (tau >= 0.5) throw RegimeError("stability analysis needs tau < 1/2");
  if (samples.replicates < 2) throw PlanError("stability analysis needs at least 2 replicates");
  StabilityTable table;
  table.slope_threshold = (tau - 0.5) / 2.0;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < samples.checkpoints.size(); ++j) {
    const std::int64_t n = samples.checkpoints[j];
    if ((n & (n - 1)) == 0) {
      table.n.push_back(n);
      cols.push_back(j);
    }
  }
  const std::int64_t r_count = samples.replicates;
  const double rr = static_cast<double>(r_count);
  auto w = [&](std::int64_t r, std::size_t c) {
    const double n = static_cast<double>(samples.checkpoints[c]);
    return std::pow(n, tau) * (static_cast<double>(samples.at(r, c)) / n - centering);
  };

  for (std::size_t c : cols) {
    detail::CompensatedSum s1;
    for (std::int64_t r = 0; r < r_count; ++r) s1.add(w(r, c));
    const double mean = s1.value() / rr;
    detail::CompensatedSum s2;
    for (std::int64_t r = 0; r < r_count; ++r) s2.add((w(r, c) - mean) * (w(r, c) - mean));
    table.w_variance.push_back(s2.value() / (rr - 1.0));
  }
  for (std::size_t j = 0; j + 1 < cols.size(); ++j) {
    StabilityRow row;
    row.n_from = table.n[j];
    row.n_to = table.n[j + 1];
    detail::CompensatedSum same, shifted;
    for (std::int64_t r = 0; r < r_count; ++r) {
      same.add(std::abs(w(r, cols[j + 1]) - w(r, cols[j])));
      shifted.add(std::abs(w(r, cols[j + 1]) - w((r + 1) % r_count, cols[j])));
    }
    row.mean_abs_increment = same.value() / rr;
    row.shifted_increment = shifted.value() / rr;
    row.ratio = row.shifted_increment > 0.0 ? row.mean_abs_increment / row.shifted_increment : 0.0;
    table.increments.push_back(row);
  }

  const std::size_t m = table.increments.size();
  if (m < 2) return table;
  const std::size_t first = m > 4 ? m - 4 : 0;
  bool all_zero = true;
  for (std::size_t j = first; j < m; ++j) all_zero = all_zero && table.increments[j].mean_abs_increment == 0.0;
  if (all_zero) {
    table.stabilizing = true;
    return table;
  }
  for (std::size_t j = first; j < m; ++j) {
    if (!(table.increments[j].ratio > 0.0)) return table;
  }
  // Least-squares slope of log2(ratio) against the dyad index.
  const double cnt = static_cast<double>(m - first);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = first; j < m; ++j) {
    const double x = static_cast<double>(j - first);
    const double y = std::log2(table.increments[j].ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  table.log2_ratio_slope = slope;
  table.stabilizing = slope < table.slope_threshold;
  return table;
}

// ---------------------------------------------------------------------------

std::optional<double> regime_scaled(const RegimeReport& regime, std::int64_t n, std::int64_t s_n) {
  if (!regime.centering || !regime.tau) return std::nullopt;
  const double dn = static_cast<double>(n);
  const double d = static_cast<double>(s_n) / dn - *regime.centering;
  switch (regime.regime) {
    case Regime::Diffusive: return std::sqrt(dn) * d;
    case Regime::Critical:
      if (n < 2) return std::nullopt;
      return std::sqrt(dn / std::log(dn)) * d;
    case Regime::Superdiffusive: return std::pow(dn, *regime.tau) * d;
    case Regime::Indeterminate: return std::nullopt;
  }
  return std::nullopt;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ERW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SampleMatrix simulate_samples(const ExperimentPlan& plan) {
  plan.validate();
  SampleMatrix out;
  out.checkpoints = plan.resolved_checkpoints();
  out.replicates = plan.replicates;
  out.s.assign(static_cast<std::size_t>(plan.replicates) * out.checkpoints.size(), 0);

  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_workers(plan.workers), plan.replicates));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (std::int64_t r = next++; r < plan.replicates && !failed; r = next++) {
        const Trajectory t = simulate(plan.model, plan.horizon,
                                      Substream{plan.master_seed, static_cast<std::uint64_t>(r + 1)}, plan.mode,
                                      out.checkpoints);
        const std::size_t row = static_cast<std::size_t>(r) * out.checkpoints.size();
        for (std::size_t j = 0; j < t.records.size(); ++j) out.s[row + j] = t.records[j].s_n;
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

bool ExperimentResult::all_pass() const {
  if (lln && !lln->pass) return false;
  if (ks && !ks->pass) return false;
  if (stability && stability->stabilizing && !*stability->stabilizing) return false;
  return true;
}

ExperimentResult analyze_samples(const ExperimentPlan& plan, SampleMatrix samples) {
  plan.validate();
  ExperimentResult res;
  res.plan = plan;
  res.regime = analyze_regime(plan.model);
  const bool predictive = res.regime.unique && res.regime.tau && res.regime.regime != Regime::Indeterminate;
  if (!predictive && !plan.allow_indeterminate) {
    throw PlanError("model has no unique fixed point with tau > 0; set allow_indeterminate to explore it");
  }
  if (samples.replicates != plan.replicates || samples.checkpoints != plan.resolved_checkpoints() ||
      samples.s.size() != static_cast<std::size_t>(samples.replicates) * samples.checkpoints.size()) {
    throw PlanError("sample matrix does not match the plan");
  }
  res.samples = std::move(samples);
  const SampleMatrix& sm = res.samples;
  const std::int64_t rc = sm.replicates;
  const double rr = static_cast<double>(rc);

  if (res.regime.tau && *res.regime.tau > 0.5 && *res.regime.tau < 0.6) {
    res.warnings.push_back("tau in (1/2, 0.6): slow convergence, expect finite-n bias in the CLT test");
  }

  std::vector<double> column(static_cast<std::size_t>(rc));
  std::vector<double> scaled(static_cast<std::size_t>(rc));
  for (std::size_t c = 0; c < sm.checkpoints.size(); ++c) {
    CheckpointStats st;
    st.n = sm.checkpoints[c];
    const double dn = static_cast<double>(st.n);
    bool have_scaled = true;
    for (std::int64_t r = 0; r < rc; ++r) {
      const std::int64_t s = sm.at(r, c);
      column[static_cast<std::size_t>(r)] = static_cast<double>(s) / dn;
      const auto v = regime_scaled(res.regime, st.n, s);
      have_scaled = have_scaled && v.has_value();
      if (v) scaled[static_cast<std::size_t>(r)] = *v;
    }
    auto mean_var = [rr](const std::vector<double>& xs) {
      detail::CompensatedSum s;
      for (double x : xs) s.add(x);
      const double m = s.value() / rr;
      detail::CompensatedSum q;
      for (double x : xs) q.add((x - m) * (x - m));
      return std::pair<double, double>{m, rr > 1 ? q.value() / (rr - 1.0) : 0.0};
    };
    std::tie(st.mean, st.variance) = mean_var(column);
    if (have_scaled && predictive) {
      const auto [m, v] = mean_var(scaled);
      st.scaled_mean = m;
      st.scaled_variance = v;
      if (res.regime.predicted_variance && *res.regime.predicted_variance > 0.0) {
        const double pv = *res.regime.predicted_variance;
        st.z_mean = m / std::sqrt(pv);
        st.z_variance = v / pv;
      }
    }
    res.checkpoints.push_back(st);
  }

  if (!predictive || rc < kMinReplicates) {
    if (rc < kMinReplicates) res.warnings.push_back("fewer than 100 replicates: no statistical verdicts");
    return res;
  }

  const std::size_t last = sm.checkpoints.size() - 1;
  const std::int64_t n_last = sm.checkpoints[last];
  for (std::int64_t r = 0; r < rc; ++r) {
    const std::int64_t s = sm.at(r, last);
    column[static_cast<std::size_t>(r)] = static_cast<double>(s) / static_cast<double>(n_last);
    scaled[static_cast<std::size_t>(r)] = regime_scaled(res.regime, n_last, s).value_or(0.0);
  }

  LlnCheck lln;
  lln.target = *res.regime.centering;
  lln.mean = res.checkpoints[last].mean;
  if (n_last <= plan.oracle_budget) {
    lln.sd = std::sqrt(exact_moments(plan.model, n_last, plan.oracle_budget).variance);
    lln.provenance = "oracle";
  } else {
    lln.sd = std::sqrt(res.checkpoints[last].variance);
    lln.provenance = "sample";
  }
  lln.tolerance = 4.0 * lln.sd / std::sqrt(rr);
  lln.pass = std::abs(lln.mean - lln.target) <= lln.tolerance;
  res.lln = lln;

  const bool gaussian = res.regime.regime == Regime::Diffusive || res.regime.regime == Regime::Critical;
  if (gaussian && regime_scaled(res.regime, n_last, 0)) {
    res.final_scaled_moments = moment_summary(scaled);
    res.ks = ks_test_normal(scaled, 0.0, *res.regime.predicted_variance, plan.alpha);
  }
  if (res.regime.regime == Regime::Superdiffusive) {
    res.stability = superdiffusive_stability(sm, *res.regime.tau, *res.regime.centering);
  }
  return res;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) { return analyze_samples(plan, simulate_samples(plan)); }

}  // namespace erw
