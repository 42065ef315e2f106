#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erw/analysis.hpp"
#include "erw/model.hpp"
#include "erw/oracle.hpp"
#include "erw/walk.hpp"

namespace erw {

struct ExperimentPlan {
  ModelConfig model;
  std::int64_t replicates = 1000;
  std::int64_t horizon = 10000;
  std::vector<std::int64_t> checkpoints;  // empty: dyadic_checkpoints(horizon)
  std::uint64_t master_seed = 0;
  double alpha = 0.01;
  int workers = 0;  // 0: ERW_THREADS, else hardware concurrency
  SimMode mode = SimMode::Collapsed;
  /// Run models without a unique fixed point (moments only, no verdicts).
  bool allow_indeterminate = false;
  /// Largest horizon for which the LLN tolerance uses the exact oracle SD.
  std::int64_t oracle_budget = kDefaultDpBudget;

  /// Sorted, deduplicated checkpoints. PlanError on any invalid field.
  std::vector<std::int64_t> resolved_checkpoints() const;
  void validate() const;
};

/// Minimum sample size for any statistical verdict.
inline constexpr std::int64_t kMinReplicates = 100;

/// S_n for every (replicate, checkpoint) pair, row-major by replicate.
struct SampleMatrix {
  std::vector<std::int64_t> checkpoints;
  std::int64_t replicates = 0;
  std::vector<std::int64_t> s;

  std::int64_t at(std::int64_t replicate_index, std::size_t checkpoint_index) const {
    return s[static_cast<std::size_t>(replicate_index) * checkpoints.size() + checkpoint_index];
  }
  std::size_t column(std::int64_t n) const;  // PlanError if n is not a checkpoint
};

struct MomentSummary {
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;  // plug-in g1; NaN when undefined
  double excess_kurtosis = 0.0;  // plug-in g2; NaN when undefined
  bool shape_defined = true;  // false for a constant sample
  double se_mean = 0.0;
  double se_variance = 0.0;
  double se_skewness = 0.0;
  double se_kurtosis = 0.0;
};

/// Moments with delete-one jackknife standard errors. DomainError below
/// kMinReplicates samples.
MomentSummary moment_summary(std::span<const double> samples);

struct KsResult {
  double statistic = 0.0;  // D
  double critical = 0.0;   // K_alpha
  bool pass = false;       // sqrt(R) D <= K_alpha
};

/// Asymptotic Kolmogorov critical value sqrt(-ln(alpha/2)/2).
double ks_critical_value(double alpha);

/// One-sample KS test against Normal(mu, sigma2). DegenerateError if
/// sigma2 <= 0, DomainError below kMinReplicates samples.
KsResult ks_test_normal(std::span<const double> samples, double mu, double sigma2, double alpha);

struct StabilityRow {
  std::int64_t n_from = 0;
  std::int64_t n_to = 0;
  double mean_abs_increment = 0.0;  // mean_r |W_r(n_to) - W_r(n_from)|
  double shifted_increment = 0.0;   // mean_r |W_r(n_to) - W_{r+1}(n_from)|
  double ratio = 0.0;               // mean_abs_increment / shifted_increment
};

struct StabilityTable {
  std::vector<std::int64_t> n;        // dyadic checkpoints used
  std::vector<double> w_variance;     // across-replicate variance of W at each n
  std::vector<StabilityRow> increments;
  std::optional<double> log2_ratio_slope;  // fitted over the last four increments
  double slope_threshold = 0.0;            // (tau - 1/2) / 2
  std::optional<bool> stabilizing;
};

/// W_n = n^tau (S_n/n - centering) at the power-of-two checkpoints. A walk
/// whose W converges per replicate has same-replicate increments that shrink
/// relative to increments between different replicates; the verdict asks the
/// log2 of that ratio to fall by more than half the rate n^(tau - 1/2).
/// RegimeError if tau >= 1/2.
StabilityTable superdiffusive_stability(const SampleMatrix& samples, double tau, double centering);

struct CheckpointStats {
  std::int64_t n = 0;
  double mean = 0.0;      // of S_n / n
  double variance = 0.0;  // of S_n / n, unbiased
  std::optional<double> scaled_mean;      // regime-scaled statistic
  std::optional<double> scaled_variance;
  std::optional<double> z_mean;           // scaled / sqrt(predicted variance)
  std::optional<double> z_variance;
};

struct LlnCheck {
  double target = 0.0;
  double mean = 0.0;
  double sd = 0.0;  // of S_N/N
  std::string provenance;  // "oracle" or "sample"
  double tolerance = 0.0;  // 4 sd / sqrt(R)
  bool pass = false;
};

struct ExperimentResult {
  ExperimentPlan plan;
  RegimeReport regime;
  SampleMatrix samples;
  std::vector<CheckpointStats> checkpoints;
  std::optional<MomentSummary> final_scaled_moments;
  std::optional<LlnCheck> lln;
  std::optional<KsResult> ks;
  std::optional<StabilityTable> stability;
  std::vector<std::string> warnings;

  /// Every verdict that was computed passed.
  bool all_pass() const;
};

/// The regime-scaled statistic at n: sqrt(n) d (diffusive), sqrt(n / ln n) d
/// (critical), n^tau d (superdiffusive), with d = S_n/n - centering.
std::optional<double> regime_scaled(const RegimeReport& regime, std::int64_t n, std::int64_t s_n);

/// Simulates every replicate on its own substream.
SampleMatrix simulate_samples(const ExperimentPlan& plan);

/// All statistics and verdicts, recomputed from stored samples.
ExperimentResult analyze_samples(const ExperimentPlan& plan, SampleMatrix samples);

ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Worker count: plan.workers, else ERW_THREADS, else hardware concurrency.
int resolve_workers(int requested);

}  // namespace erw
