#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace erw::detail {

double stirlerr(double n);
double bd0(double x, double np);
/// Binomial(n, p) mass at x with q = 1 - p passed separately.
double dbinom_raw(double x, double n, double p, double q);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace erw::detail
