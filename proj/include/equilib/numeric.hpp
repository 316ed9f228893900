#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace equilib {

inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays
// accurate when a new term is larger than the running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
    abs_ += std::abs(x);
    ++count_;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + carry_; }
  // Sum of |terms|; scales the rounding error bound.
  double magnitude() const { return abs_; }
  std::size_t count() const { return count_; }

  // Bound on |value() - exact sum of the added floating-point terms|.
  double rounding_bound() const {
    const double n = static_cast<double>(count_);
    return 2 * kUnitRoundoff * std::abs(value()) +
           (4 * n * kUnitRoundoff * kUnitRoundoff) * abs_;
  }

 private:
  double sum_ = 0;
  double carry_ = 0;
  double abs_ = 0;
  std::size_t count_ = 0;
};

// Outward rounding: widen x by `ops` relative units in the last place.
inline double round_up(double x, int ops = 1) {
  return x + std::abs(x) * (2 * kUnitRoundoff) * ops + std::numeric_limits<double>::denorm_min();
}
inline double round_down(double x, int ops = 1) {
  return x - std::abs(x) * (2 * kUnitRoundoff) * ops - std::numeric_limits<double>::denorm_min();
}

struct BisectionResult {
  double root;
  int iterations;
  bool bracketed;  // false when f kept one sign on the whole interval
};

// Root of a strictly decreasing function on [lo, hi]. If f has constant sign,
// returns the endpoint the root lies beyond and bracketed = false.
template <typename F>
BisectionResult bisect_decreasing(F&& f, double lo, double hi, int max_iter = 200,
                                  double x_tol = 0.0) {
  const double f_lo = f(lo);
  if (f_lo <= 0) return {lo, 0, f_lo == 0};
  const double f_hi = f(hi);
  if (f_hi >= 0) return {hi, 0, f_hi == 0};
  int it = 0;
  for (; it < max_iter; ++it) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi || hi - lo <= x_tol) break;
    const double fm = f(mid);
    if (fm == 0) return {mid, it + 1, true};
    if (fm > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo + (hi - lo) / 2, it, true};
}

}  // namespace equilib
