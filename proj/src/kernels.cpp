// Binomial and hypergeometric probability kernels.
//
// Large-order terms use Loader's saddle-point evaluation (stirlerr/bd0),
// which keeps relative error near machine precision where a plain
// lgamma difference loses digits to cancellation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include "erw/drift.hpp"
#include "erw/errors.hpp"
#include "numeric_detail.hpp"

namespace erw {
namespace detail {

double stirlerr(double n) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    const long double ln = static_cast<long double>(n);
    const long double half_log_2pi = 0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
    return static_cast<double>(std::lgamma(ln + 1.0L) - (ln + 0.5L) * std::log(ln) + ln -
                               half_log_2pi);
  }
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

double dbinom_raw(double x, double n, double p, double q) {
  if (p == 0.0) return x == 0.0 ? 1.0 : 0.0;
  if (q == 0.0) return x == n ? 1.0 : 0.0;
  if (x == 0.0) {
    if (n == 0.0) return 1.0;
    const double lc = p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
    return std::exp(lc);
  }
  if (x == n) {
    const double lc = q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
    return std::exp(lc);
  }
  if (x < 0.0 || x > n) return 0.0;
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return std::exp(lc - 0.5 * lf);
}

namespace {

// Grow a unimodal row outward from `mode`, using ratio(i) = P(i+1)/P(i).
template <typename Ratio>
void grow_from_mode(std::int64_t lo, std::int64_t hi, std::int64_t mode, double at_mode, Ratio ratio,
                    KernelRow& row) {
  constexpr double kCutoff = 1e-300;
  auto& w = row.weights;
  w.clear();
  double v = at_mode;
  for (std::int64_t i = mode; i > lo; --i) {
    v /= ratio(i - 1);
    if (!(v > kCutoff * at_mode)) break;
    w.push_back(v);
  }
  std::reverse(w.begin(), w.end());
  row.first = mode - static_cast<std::int64_t>(w.size());
  w.push_back(at_mode);
  v = at_mode;
  for (std::int64_t j = mode; j < hi; ++j) {
    v *= ratio(j);
    if (!(v > kCutoff * at_mode)) break;
    w.push_back(v);
  }
}

}  // namespace
}  // namespace detail

namespace {

void require_probability(double y) {
  if (!(y >= 0.0 && y <= 1.0)) {
    std::ostringstream os;
    os << "success probability " << y << " outside [0,1]";
    throw DomainError(os.str());
  }
}

double small_binom_pmf(std::int64_t k, double y, std::int64_t i) {
  double c = 1.0;
  const std::int64_t r = std::min(i, k - i);
  for (std::int64_t j = 1; j <= r; ++j) c = c * static_cast<double>(k - r + j) / static_cast<double>(j);
  return c * std::pow(y, static_cast<double>(i)) * std::pow(1.0 - y, static_cast<double>(k - i));
}

constexpr std::int64_t kDirectBinomialLimit = 64;

}  // namespace

double binom_pmf(std::int64_t k, double y, std::int64_t i) {
  if (k < 0) throw DomainError("binomial order must be non-negative");
  require_probability(y);
  if (i < 0 || i > k) {
    std::ostringstream os;
    os << "binomial index " << i << " outside 0.." << k;
    throw DomainError(os.str());
  }
  if (k <= kDirectBinomialLimit) return small_binom_pmf(k, y, i);
  return detail::dbinom_raw(static_cast<double>(i), static_cast<double>(k), y, 1.0 - y);
}

double hypergeom_pmf(std::int64_t n, std::int64_t m, std::int64_t k, std::int64_t i) {
  if (n < 1 || m < 0 || m > n || k < 0) throw DomainError("invalid hypergeometric parameters");
  if (k > n) {
    std::ostringstream os;
    os << "sample size " << k << " exceeds population " << n;
    throw DomainError(os.str());
  }
  const std::int64_t lo = std::max<std::int64_t>(0, k - (n - m));
  const std::int64_t hi = std::min(k, m);
  if (i < lo || i > hi) return 0.0;
  if (k == 0 || k == n) return 1.0;
  const double dn = static_cast<double>(n);
  const double p = static_cast<double>(k) / dn;
  const double q = static_cast<double>(n - k) / dn;
  const double p1 = detail::dbinom_raw(static_cast<double>(i), static_cast<double>(m), p, q);
  const double p2 = detail::dbinom_raw(static_cast<double>(k - i), static_cast<double>(n - m), p, q);
  const double p3 = detail::dbinom_raw(static_cast<double>(k), dn, p, q);
  return p1 * p2 / p3;
}

void binom_row(std::int64_t k, double y, KernelRow& row) {
  if (k < 0) throw DomainError("binomial order must be non-negative");
  require_probability(y);
  if (y == 0.0 || k == 0) {
    row.first = 0;
    row.weights.assign(1, 1.0);
    return;
  }
  if (y == 1.0) {
    row.first = k;
    row.weights.assign(1, 1.0);
    return;
  }
  if (k <= kDirectBinomialLimit) {
    row.first = 0;
    row.weights.resize(static_cast<std::size_t>(k + 1));
    for (std::int64_t i = 0; i <= k; ++i) row.weights[static_cast<std::size_t>(i)] = small_binom_pmf(k, y, i);
    return;
  }
  const std::int64_t mode = std::min<std::int64_t>(k, static_cast<std::int64_t>(std::floor((k + 1) * y)));
  const double at_mode = binom_pmf(k, y, mode);
  const double odds = y / (1.0 - y);
  detail::grow_from_mode(
      0, k, mode, at_mode,
      [k, odds](std::int64_t i) { return static_cast<double>(k - i) / static_cast<double>(i + 1) * odds; },
      row);
}

KernelRow binom_row(std::int64_t k, double y) {
  KernelRow row;
  binom_row(k, y, row);
  return row;
}

void hypergeom_row(std::int64_t n, std::int64_t m, std::int64_t k, KernelRow& row) {
  if (n < 1 || m < 0 || m > n || k < 0) throw DomainError("invalid hypergeometric parameters");
  if (k > n) throw DomainError("sample size exceeds population");
  const std::int64_t lo = std::max<std::int64_t>(0, k - (n - m));
  const std::int64_t hi = std::min(k, m);
  if (lo == hi) {
    row.first = lo;
    row.weights.assign(1, 1.0);
    return;
  }
  std::int64_t mode = static_cast<std::int64_t>(
      std::floor(static_cast<double>(k + 1) * static_cast<double>(m + 1) / static_cast<double>(n + 2)));
  mode = std::clamp(mode, lo, hi);
  const double at_mode = hypergeom_pmf(n, m, k, mode);
  detail::grow_from_mode(
      lo, hi, mode, at_mode,
      [n, m, k](std::int64_t i) {
        return static_cast<double>(m - i) * static_cast<double>(k - i) /
               (static_cast<double>(i + 1) * static_cast<double>(n - m - k + i + 1));
      },
      row);
}

KernelRow hypergeom_row(std::int64_t n, std::int64_t m, std::int64_t k) {
  KernelRow row;
  hypergeom_row(n, m, k, row);
  return row;
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) throw DomainError("log_choose outside 0 <= k <= n");
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

SignedLog generalized_binomial(double a, std::int64_t i) {
  if (i < 0) throw DomainError("generalized binomial index must be non-negative");
  SignedLog out;
  for (std::int64_t j = 0; j < i; ++j) {
    const double factor = a - static_cast<double>(j);
    if (factor == 0.0) return SignedLog{0, -std::numeric_limits<double>::infinity()};
    if (factor < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(factor)) - std::log(static_cast<double>(j + 1));
  }
  return out;
}

}  // namespace erw
