#include "erw/oracle.hpp"

#include <cmath>
#include <sstream>

#include "erw/errors.hpp"
#include "erw/walk.hpp"
#include "numeric_detail.hpp"

namespace erw {

double ExactPmf::at_position(std::int64_t s) const {
  if ((s + n) % 2 != 0 || s < -n || s > n) return 0.0;
  return prob[static_cast<std::size_t>((s + n) / 2)];
}

namespace {

// Up-probabilities for every plus-count at a fixed n, sharing one g grid and
// one scratch kernel row.
class UpProbabilities {
 public:
  explicit UpProbabilities(const ModelConfig& model) : model_(model), ctx_(model.drift_context()) {}

  void prepare(std::int64_t n) {
    n_ = n;
    warmup_ = n < model_.warmup_length();
    if (warmup_) return;
    const std::int64_t k = k_schedule_eval(model_.schedule, n);
    if (k != k_) {
      k_ = k;
      g_.resize(static_cast<std::size_t>(k + 1));
      for (std::int64_t i = 0; i <= k; ++i) {
        g_[static_cast<std::size_t>(i)] = eval_g(ctx_, static_cast<double>(i) / static_cast<double>(k));
      }
    }
  }

  double up(std::int64_t m) {
    if (warmup_) return model_.q;
    if (model_.sampling == Sampling::WithReplacement) {
      binom_row(k_, static_cast<double>(m) / static_cast<double>(n_), row_);
    } else {
      hypergeom_row(n_, m, k_, row_);
    }
    detail::CompensatedSum sum;
    for (std::size_t j = 0; j < row_.weights.size(); ++j) {
      sum.add(g_[static_cast<std::size_t>(row_.first) + j] * row_.weights[j]);
    }
    return std::clamp(sum.value(), 0.0, 1.0);
  }

 private:
  const ModelConfig& model_;
  DriftContext ctx_;
  std::int64_t n_ = 0;
  std::int64_t k_ = -1;
  bool warmup_ = false;
  std::vector<double> g_;
  KernelRow row_;
};

void check_budget(std::int64_t n_max, std::int64_t budget) {
  if (n_max < 1) throw DomainError("oracle horizon must be >= 1");
  if (n_max > budget) {
    std::ostringstream os;
    os << "oracle horizon " << n_max << " exceeds the DP budget " << budget;
    throw BudgetError(os.str());
  }
}

}  // namespace

TransitionRow transition_row(const ModelConfig& model, std::int64_t n, std::int64_t plus_count) {
  model.validate();
  if (n < 1 || plus_count < 0 || plus_count > n) throw DomainError("unreachable oracle state");
  if (n < model.warmup_length()) return {model.q, 1.0 - model.q};
  const double up = step_probability(model, n, plus_count);
  return {up, 1.0 - up};
}

void for_each_exact_row(const ModelConfig& model, std::int64_t n_max,
                        const std::function<void(const ExactPmf&)>& visit, std::int64_t budget) {
  model.validate();
  check_budget(n_max, budget);
  ExactPmf row{1, {1.0 - model.q, model.q}};
  visit(row);
  UpProbabilities ups(model);
  ExactPmf next;
  for (std::int64_t n = 1; n < n_max; ++n) {
    ups.prepare(n);
    next.n = n + 1;
    next.prob.assign(static_cast<std::size_t>(n + 2), 0.0);
    for (std::int64_t m = 0; m <= n; ++m) {
      const double mass = row.prob[static_cast<std::size_t>(m)];
      if (mass == 0.0) continue;
      const double up = ups.up(m);
      next.prob[static_cast<std::size_t>(m + 1)] += mass * up;
      next.prob[static_cast<std::size_t>(m)] += mass * (1.0 - up);
    }
    std::swap(row, next);
    visit(row);
  }
}

std::vector<ExactPmf> exact_distribution(const ModelConfig& model, std::int64_t n_max, std::int64_t budget) {
  check_budget(n_max, budget);
  const std::int64_t first = std::min(model.warmup_length(), n_max);
  std::vector<ExactPmf> rows;
  rows.reserve(static_cast<std::size_t>(n_max - first + 1));
  for_each_exact_row(
      model, n_max,
      [&rows, first](const ExactPmf& r) {
        if (r.n >= first) rows.push_back(r);
      },
      budget);
  return rows;
}

ExactMoments exact_moments(const ModelConfig& model, std::int64_t n, std::int64_t budget) {
  ExactMoments out;
  for_each_exact_row(
      model, n,
      [&out, n](const ExactPmf& r) {
        if (r.n != n) return;
        detail::CompensatedSum m1, m2;
        const double dn = static_cast<double>(n);
        for (std::size_t m = 0; m < r.prob.size(); ++m) {
          const double x = (2.0 * static_cast<double>(m) - dn) / dn;
          m1.add(r.prob[m] * x);
          m2.add(r.prob[m] * x * x);
        }
        out.mean = m1.value();
        out.variance = std::max(0.0, m2.value() - out.mean * out.mean);
      },
      budget);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Rational rational_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return Rational(0);
  boost::multiprecision::cpp_int c = 1;
  for (std::int64_t j = 1; j <= k; ++j) {
    c *= (n - k + j);
    c /= j;
  }
  return Rational(c);
}

Rational rational_pow(const Rational& base, std::int64_t e) {
  Rational out(1);
  for (std::int64_t j = 0; j < e; ++j) out *= base;
  return out;
}

void validate_rational(const RationalModel& model) {
  if (model.k < 1) throw ConfigError("rational model needs k >= 1");
  if (model.f_grid.size() != static_cast<std::size_t>(model.k + 1)) {
    throw ConfigError("rational model needs k+1 grid values");
  }
  if (model.p <= 0 || model.p >= 1 || model.q < 0 || model.q > 1) {
    throw ConfigError("rational model parameters out of range");
  }
}

}  // namespace

Rational rational_step_probability(const RationalModel& model, std::int64_t n, std::int64_t plus_count) {
  validate_rational(model);
  const std::int64_t k = model.k;
  if (n < 1 || plus_count < 0 || plus_count > n) throw DomainError("unreachable oracle state");
  const bool without = model.sampling == Sampling::WithoutReplacement;
  if (without && n < k) return model.q;

  Rational total(0);
  for (std::int64_t i = 0; i <= k; ++i) {
    const Rational& f = model.f_grid[static_cast<std::size_t>(i)];
    const Rational g = model.p * f + (1 - model.p) * (1 - f);
    Rational weight;
    if (without) {
      weight = rational_choose(plus_count, i) * rational_choose(n - plus_count, k - i) / rational_choose(n, k);
    } else {
      weight = rational_choose(k, i) * rational_pow(Rational(plus_count), i) *
               rational_pow(Rational(n - plus_count), k - i) / rational_pow(Rational(n), k);
    }
    total += g * weight;
  }
  return total;
}

std::vector<std::vector<Rational>> rational_exact_distribution(const RationalModel& model, std::int64_t n_max) {
  validate_rational(model);
  if (n_max < 1) throw DomainError("oracle horizon must be >= 1");
  if (n_max > kRationalLimit) {
    std::ostringstream os;
    os << "rational oracle is limited to n <= " << kRationalLimit;
    throw BudgetError(os.str());
  }
  const std::int64_t first =
      model.sampling == Sampling::WithoutReplacement ? std::min(model.k, n_max) : std::int64_t{1};
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> row{1 - model.q, model.q};
  if (first == 1) rows.push_back(row);
  for (std::int64_t n = 1; n < n_max; ++n) {
    std::vector<Rational> next(static_cast<std::size_t>(n + 2), Rational(0));
    for (std::int64_t m = 0; m <= n; ++m) {
      const Rational& mass = row[static_cast<std::size_t>(m)];
      if (mass == 0) continue;
      const Rational up = rational_step_probability(model, n, m);
      next[static_cast<std::size_t>(m + 1)] += mass * up;
      next[static_cast<std::size_t>(m)] += mass * (1 - up);
    }
    row = std::move(next);
    if (n + 1 >= first) rows.push_back(row);
  }
  return rows;
}

}  // namespace erw
