#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "equilib/config.hpp"
#include "equilib/force_law.hpp"
#include "equilib/numeric.hpp"

namespace equilib {

// Sum of F over the particles of a tail model, seen from a particle at
// distance `first_distance` from the tail's first particle.
struct TailSum {
  double value = 0;
  double error = 0;  // certified absolute error (0 for estimates)
  double slope = 0;  // sum of F' over the same particles (estimates only)
  std::size_t terms = 0;
};

namespace detail {

// Enclosure [lo, hi] of sum_{j>=0} F(d + j*period).
//  - always: E(d)/P <= S <= F(d) + E(d)/P   (F decreasing)
//  - F convex on [d - P/2, inf): S >= E(d)/P + F(d)/2 (trapezoid) and
//    S <= E(d - P/2)/P (midpoint).
struct Enclosure {
  double lo;
  double hi;
};

inline Enclosure arithmetic_enclosure(const ForceLaw& law, double d, double period) {
  const double f = law.force(d);
  const double e = law.potential(d);
  double lo = round_down(e / period, 20);
  double hi = round_up(round_up(f, 4) + round_up(e / period, 20), 1);
  const double half = period / 2;
  if (d - half > 0 && d - half >= law.convex_from() && d - half >= law.min_distance()) {
    const double lo_c = round_down(round_down(e / period, 20) + round_down(f / 2, 4), 1);
    const double hi_c = round_up(law.potential(d - half) / period, 20);
    lo = std::max(lo, lo_c);
    hi = std::min(hi, hi_c);
  }
  if (hi < lo) hi = lo;
  return {lo, hi};
}

}  // namespace detail

// Certified tail sum: explicit terms, period by period, until the enclosure
// of the remaining sum is narrower than `tol`. The remainder enters at its
// midpoint; half the enclosure width plus all rounding goes into `error`.
inline TailSum certified_tail_sum(const ForceLaw& law, const TailModel& tail, double first_distance,
                                  double tol, std::size_t max_terms = 50'000'000) {
  TailSum out;
  if (tail.empty()) return out;
  const std::size_t p = tail.pattern.size();
  const double period = tail.period();
  std::vector<double> prefix(p, 0.0);
  for (std::size_t r = 1; r < p; ++r) prefix[r] = prefix[r - 1] + tail.pattern[r - 1];

  CompensatedSum sum;
  double term_error = 0;
  std::size_t next_check = 0;
  for (std::size_t q = 0;; ++q) {
    const double base = first_distance + static_cast<double>(q) * period;
    if (q == next_check || q * p >= max_terms) {
      next_check = std::max<std::size_t>(1, 2 * q);
      double lo = 0, hi = 0;
      for (std::size_t r = 0; r < p; ++r) {
        const auto enc = detail::arithmetic_enclosure(law, base + prefix[r], period);
        lo += enc.lo;
        hi += enc.hi;
      }
      lo = round_down(lo, static_cast<int>(p));
      hi = round_up(hi, static_cast<int>(p));
      if (hi - lo <= tol || q * p >= max_terms) {
        const double mid = lo + (hi - lo) / 2;
        sum.add(mid);
        out.value = sum.value();
        out.error = round_up((hi - lo) / 2 + term_error + sum.rounding_bound(), 4);
        out.terms = q * p;
        return out;
      }
    }
    for (std::size_t r = 0; r < p; ++r) {
      const double d = base + prefix[r];
      const double f = law.force(d);
      sum.add(f);
      term_error += f * law.relative_error(d);
    }
  }
}

// Fast estimate for solver inner loops: explicit terms, then the
// Euler-Maclaurin remainder E(d)/P + F(d)/2 - P F'(d)/12. Also sums F'.
inline TailSum estimate_tail_sum(const ForceLaw& law, const TailModel& tail, double first_distance,
                                 double tol = 1e-15, std::size_t max_terms = 2'000'000) {
  TailSum out;
  if (tail.empty()) return out;
  const std::size_t p = tail.pattern.size();
  const double period = tail.period();
  std::vector<double> prefix(p, 0.0);
  for (std::size_t r = 1; r < p; ++r) prefix[r] = prefix[r - 1] + tail.pattern[r - 1];

  CompensatedSum value, slope;
  for (std::size_t q = 0;; ++q) {
    const double base = first_distance + static_cast<double>(q) * period;
    bool small = true;
    for (std::size_t r = 0; r < p && small; ++r) {
      const double d = base + prefix[r];
      const double f = law.force(d);
      const double fp = law.derivative(d);
      const double ratio = period / d;
      const bool em_ok = std::abs(period * fp) * ratio * ratio * 0.5 <= tol &&
                         d >= law.convex_from() && d - period / 2 > law.min_distance();
      const bool negligible = f * (1 + d / period) <= tol;
      small = em_ok || negligible;
    }
    if (small || q * p >= max_terms) {
      for (std::size_t r = 0; r < p; ++r) {
        const double d = base + prefix[r];
        const double f = law.force(d);
        const double fp = law.derivative(d);
        if (f == 0) continue;
        value.add(law.potential(d) / period + f / 2 - period * fp / 12);
        slope.add(-f / period + fp / 2);
      }
      out.value = value.value();
      out.slope = slope.value();
      out.terms = q * p;
      return out;
    }
    for (std::size_t r = 0; r < p; ++r) {
      const double d = base + prefix[r];
      value.add(law.force(d));
      slope.add(law.derivative(d));
    }
  }
}

}  // namespace equilib
