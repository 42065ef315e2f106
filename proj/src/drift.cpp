#include "erw/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "erw/errors.hpp"
#include "numeric_detail.hpp"

namespace erw {

DriftContext::DriftContext(ReinforcementSpec spec, double p, Sampling sampling, bool allow_half)
    : spec_(std::move(spec)), p_(p), sampling_(sampling), allow_half_(allow_half) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "memory parameter p=" << p << " outside (0,1)";
    throw ConfigError(os.str());
  }
  if (p == 0.5 && !allow_half) throw ConfigError("p = 1/2 requires allow_half");
}

namespace {

void require_symmetric_interval(double x) {
  if (!(x >= -1.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "drift argument " << x << " outside [-1,1]";
    throw DomainError(os.str());
  }
}

double grid_point(std::int64_t i, std::int64_t k) {
  return static_cast<double>(i) / static_cast<double>(k);
}

// (1 + x) / 2, pinned to [0,1] against rounding at the endpoints.
double to_unit(double x) { return std::clamp(0.5 * (1.0 + x), 0.0, 1.0); }

}  // namespace

double eval_g(const DriftContext& ctx, double x) {
  const double f = evaluate_f(ctx.spec(), x);
  const double p = ctx.p();
  return p * f + (1.0 - p) * (1.0 - f);
}

double eval_ghat(const DriftContext& ctx, double y) { return 2.0 * eval_g(ctx, y) - 1.0; }

double eval_hhat(const DriftContext& ctx, double x) {
  require_symmetric_interval(x);
  return 2.0 * eval_g(ctx, to_unit(x)) - x - 1.0;
}

double eval_H(const DriftContext& ctx, std::int64_t k, double x) {
  if (k < 1) throw DomainError("sample size k must be positive");
  require_symmetric_interval(x);
  const KernelRow row = binom_row(k, to_unit(x));
  detail::CompensatedSum sum;
  for (std::size_t j = 0; j < row.weights.size(); ++j) {
    const std::int64_t i = row.first + static_cast<std::int64_t>(j);
    sum.add(eval_g(ctx, grid_point(i, k)) * row.weights[j]);
  }
  return std::clamp(2.0 * sum.value() - 1.0, -1.0, 1.0);
}

double eval_H_prime(const DriftContext& ctx, std::int64_t k, double x) {
  if (k < 1) throw DomainError("sample size k must be positive");
  require_symmetric_interval(x);
  const auto& f = ctx.spec();
  const KernelRow row = binom_row(k - 1, to_unit(x));
  detail::CompensatedSum sum;
  for (std::size_t j = 0; j < row.weights.size(); ++j) {
    const std::int64_t i = row.first + static_cast<std::int64_t>(j);
    const double diff = evaluate_f(f, grid_point(i + 1, k)) - evaluate_f(f, grid_point(i, k));
    sum.add(diff * row.weights[j]);
  }
  return static_cast<double>(k) * (2.0 * ctx.p() - 1.0) * sum.value();
}

double eval_H_second(const DriftContext& ctx, std::int64_t k, double x) {
  if (k < 2) throw DegreeError("second derivative of H needs k >= 2");
  require_symmetric_interval(x);
  const auto& f = ctx.spec();
  const KernelRow row = binom_row(k - 2, to_unit(x));
  detail::CompensatedSum sum;
  for (std::size_t j = 0; j < row.weights.size(); ++j) {
    const std::int64_t i = row.first + static_cast<std::int64_t>(j);
    const double diff2 = evaluate_f(f, grid_point(i + 2, k)) - 2.0 * evaluate_f(f, grid_point(i + 1, k)) +
                         evaluate_f(f, grid_point(i, k));
    sum.add(diff2 * row.weights[j]);
  }
  const double kk = static_cast<double>(k);
  return 0.5 * kk * (kk - 1.0) * (2.0 * ctx.p() - 1.0) * sum.value();
}

double PolynomialForm::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

PolynomialForm h_coefficients(const DriftContext& ctx, int k) {
  if (k < 1) throw DomainError("sample size k must be positive");
  if (k > 30) throw DegreeError("power-basis coefficients are limited to k <= 30");

  // Pascal triangle up to k; C(30,15) fits comfortably in 64 bits.
  std::vector<std::vector<std::int64_t>> binom(static_cast<std::size_t>(k + 1));
  for (int r = 0; r <= k; ++r) {
    binom[r].assign(static_cast<std::size_t>(r + 1), 1);
    for (int c = 1; c < r; ++c) binom[r][c] = binom[r - 1][c - 1] + binom[r - 1][c];
  }
  auto choose = [&](int r, int c) -> std::int64_t {
    return (c < 0 || c > r) ? 0 : binom[r][c];
  };

  std::vector<double> g(static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i) g[i] = eval_g(ctx, grid_point(i, k));
  const double scale = std::ldexp(1.0, 1 - k);

  PolynomialForm form;
  form.degree = k;
  form.coefficients.assign(static_cast<std::size_t>(k + 1), 0.0);
  for (int j = 0; j <= k; ++j) {
    detail::CompensatedSum sum;
    for (int i = 0; i <= k; ++i) {
      std::int64_t inner = 0;
      if (j == 0) {
        inner = 1;
      } else if (j == 1) {
        inner = 2 * i - k;
      } else {
        for (int l = 0; l <= j; ++l) {
          const std::int64_t term = choose(i, l) * choose(k - i, j - l);
          inner += ((j - l) % 2 == 0) ? term : -term;
        }
      }
      sum.add(g[i] * static_cast<double>(choose(k, i) * inner));
    }
    form.coefficients[j] = scale * sum.value() - ((j <= 1) ? 1.0 : 0.0);
  }
  return form;
}

double eval_F_n(const DriftContext& ctx, std::int64_t k, std::int64_t n, double x) {
  if (k < 1) throw DomainError("sample size k must be positive");
  if (k > n) {
    std::ostringstream os;
    os << "without-replacement sample size " << k << " exceeds history length " << n;
    throw DomainError(os.str());
  }
  require_symmetric_interval(x);
  const double dn = static_cast<double>(n);
  const double a = dn * to_unit(x);
  const double b = dn - a;

  // Falling-factorial prefixes: log|a(a-1)...(a-i+1)| with sign, zero flagged.
  struct Prefix {
    std::vector<double> log_abs;
    std::vector<int> sign;
  };
  auto falling = [k](double base) {
    Prefix out{std::vector<double>(static_cast<std::size_t>(k + 1), 0.0),
               std::vector<int>(static_cast<std::size_t>(k + 1), 1)};
    for (std::int64_t j = 0; j < k; ++j) {
      const double factor = base - static_cast<double>(j);
      const auto next = static_cast<std::size_t>(j + 1);
      if (factor == 0.0 || out.sign[next - 1] == 0) {
        out.sign[next] = 0;
        out.log_abs[next] = 0.0;
        continue;
      }
      out.sign[next] = factor < 0.0 ? -out.sign[next - 1] : out.sign[next - 1];
      out.log_abs[next] = out.log_abs[next - 1] + std::log(std::abs(factor));
    }
    return out;
  };
  const Prefix pa = falling(a);
  const Prefix pb = falling(b);
  double log_n_falling = 0.0;
  for (std::int64_t j = 0; j < k; ++j) log_n_falling += std::log(dn - static_cast<double>(j));

  // Each term is C(k,i) (a)_i (b)_{k-i} / (n)_k.
  detail::CompensatedSum sum;
  double log_ck = 0.0;
  for (std::int64_t i = 0; i <= k; ++i) {
    if (i > 0) log_ck += std::log(static_cast<double>(k - i + 1)) - std::log(static_cast<double>(i));
    const auto ia = static_cast<std::size_t>(i);
    const auto ib = static_cast<std::size_t>(k - i);
    const int sign = pa.sign[ia] * pb.sign[ib];
    if (sign == 0) continue;
    const double magnitude = std::exp(log_ck + pa.log_abs[ia] + pb.log_abs[ib] - log_n_falling);
    sum.add(sign * magnitude * eval_g(ctx, grid_point(i, k)));
  }
  const double value = 2.0 * sum.value() - 1.0;
  if (value < -1.0 - kDriftClampBand || value > 1.0 + kDriftClampBand) {
    std::ostringstream os;
    os << "F_n evaluated to " << value << " outside [-1,1] (k=" << k << ", n=" << n << ", x=" << x << ")";
    throw NumericalError(os.str());
  }
  return std::clamp(value, -1.0, 1.0);
}

}  // namespace erw
