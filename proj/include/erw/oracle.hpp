#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "erw/model.hpp"

namespace erw {

/// Exact law of S_n: prob[m] = P(plus_count = m), S_n = 2m - n.
struct ExactPmf {
  std::int64_t n = 0;
  std::vector<double> prob;

  double at_position(std::int64_t s) const;
};

struct ExactMoments {
  double mean = 0.0;      // E[S_n / n]
  double variance = 0.0;  // Var(S_n / n)
};

inline constexpr std::int64_t kDefaultDpBudget = 2000;

struct TransitionRow {
  double up = 0.0;
  double down = 0.0;
};

/// One-step law from (n, plus_count). During the without-replacement
/// warm-up (n < k) the next step is Rademacher(q).
TransitionRow transition_row(const ModelConfig& model, std::int64_t n, std::int64_t plus_count);

/// Rows for n = warm-up .. n_max. O(n_max^2 k) time. BudgetError when
/// n_max exceeds `budget`.
std::vector<ExactPmf> exact_distribution(const ModelConfig& model, std::int64_t n_max,
                                         std::int64_t budget = kDefaultDpBudget);

/// Streams every row n = 1 .. n_max to `visit` keeping only one row in memory.
void for_each_exact_row(const ModelConfig& model, std::int64_t n_max,
                        const std::function<void(const ExactPmf&)>& visit,
                        std::int64_t budget = kDefaultDpBudget);

ExactMoments exact_moments(const ModelConfig& model, std::int64_t n,
                           std::int64_t budget = kDefaultDpBudget);

// ---------------------------------------------------------------------------
// Exact rational mode (constant k only, n <= 30).

using Rational = boost::multiprecision::cpp_rational;

struct RationalModel {
  Rational p;
  Rational q;
  std::int64_t k = 1;
  Sampling sampling = Sampling::WithReplacement;
  std::vector<Rational> f_grid;  // f(i/k), i = 0..k
};

inline constexpr std::int64_t kRationalLimit = 30;

/// P[X_{n+1} = +1 | n, plus_count] in exact arithmetic.
Rational rational_step_probability(const RationalModel& model, std::int64_t n, std::int64_t plus_count);

/// Exact rows n = warm-up .. n_max as rationals.
std::vector<std::vector<Rational>> rational_exact_distribution(const RationalModel& model, std::int64_t n_max);

}  // namespace erw
