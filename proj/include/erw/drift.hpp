#pragma once

#include <cstdint>
#include <vector>

#include "erw/reinforce.hpp"

namespace erw {

enum class Sampling { WithReplacement, WithoutReplacement };

/// Inputs shared by every mean-field function: f, the memory parameter p and
/// the sampling scheme. p = 1/2 is rejected unless allow_half is set.
class DriftContext {
 public:
  DriftContext(ReinforcementSpec spec, double p, Sampling sampling = Sampling::WithReplacement,
               bool allow_half = false);

  const ReinforcementSpec& spec() const noexcept { return spec_; }
  double p() const noexcept { return p_; }
  Sampling sampling() const noexcept { return sampling_; }
  bool allow_half() const noexcept { return allow_half_; }

 private:
  ReinforcementSpec spec_;
  double p_;
  Sampling sampling_;
  bool allow_half_;
};

// ---------------------------------------------------------------------------
// Probability kernels

/// C(k,i) y^i (1-y)^(k-i).
double binom_pmf(std::int64_t k, double y, std::int64_t i);

/// C(m,i) C(n-m,k-i) / C(n,k); zero outside the support.
double hypergeom_pmf(std::int64_t n, std::int64_t m, std::int64_t k, std::int64_t i);

/// Non-negligible part of a probability row: weights[j] is P(i = first + j).
struct KernelRow {
  std::int64_t first = 0;
  std::vector<double> weights;
};

/// Full binomial(k, y) row. Small k is evaluated term by term; above that the
/// row is grown outward from the mode and truncated where terms fall below
/// 1e-300 of the mode.
KernelRow binom_row(std::int64_t k, double y);
void binom_row(std::int64_t k, double y, KernelRow& out);

/// Hypergeometric row over its support max(0, k-(n-m)) .. min(k, m).
KernelRow hypergeom_row(std::int64_t n, std::int64_t m, std::int64_t k);
void hypergeom_row(std::int64_t n, std::int64_t m, std::int64_t k, KernelRow& out);

/// log C(n, k) for 0 <= k <= n.
double log_choose(std::int64_t n, std::int64_t k);

/// Generalized binomial coefficient a(a-1)...(a-i+1)/i! kept as sign and
/// log-magnitude. sign == 0 means the coefficient is exactly zero.
struct SignedLog {
  int sign = 1;
  double log_abs = 0.0;
};
SignedLog generalized_binomial(double a, std::int64_t i);

// ---------------------------------------------------------------------------
// Mean-field functions

/// g(x) = p f(x) + (1 - p)(1 - f(x)).
double eval_g(const DriftContext& ctx, double x);
/// ghat(y) = 2 g(y) - 1.
double eval_ghat(const DriftContext& ctx, double y);
/// hhat(x) = 2 g((1+x)/2) - x - 1, the growing-sample drift limit.
double eval_hhat(const DriftContext& ctx, double x);

/// Conditional mean of the next step given S_n/n = x with k samples drawn
/// with replacement. Pass k = k(n) for the growing-sample drift H_n.
double eval_H(const DriftContext& ctx, std::int64_t k, double x);
double eval_H_prime(const DriftContext& ctx, std::int64_t k, double x);
/// DegreeError for k < 2.
double eval_H_second(const DriftContext& ctx, std::int64_t k, double x);

/// h(x) = H(x) - x in the power basis.
struct PolynomialForm {
  int degree = 0;
  std::vector<double> coefficients;  // a_0 .. a_k
  double operator()(double x) const;
};

/// Exact power-basis coefficients of h for k <= 30 (DegreeError above).
PolynomialForm h_coefficients(const DriftContext& ctx, int k);

/// Without-replacement drift: the hypergeometric mixture extended to
/// non-lattice x through generalized binomial coefficients.
double eval_F_n(const DriftContext& ctx, std::int64_t k, std::int64_t n, double x);

/// Tolerance band outside [-1,1] that F_n clamps instead of rejecting.
inline constexpr double kDriftClampBand = 1e-9;

}  // namespace erw
