#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "equilib/errors.hpp"
#include "equilib/numeric.hpp"

namespace equilib {

// Analytic continuation of a tabulated law beyond its last sample:
// scale * d^-k (inverse power) or scale * exp(-d^k).
struct AnalyticTail {
  enum class Kind { inverse_power, exp };
  Kind kind = Kind::inverse_power;
  double k = 2;
  double scale = 1;

  double force(double d) const {
    return kind == Kind::inverse_power ? scale * std::pow(d, -k) : scale * std::exp(-std::pow(d, k));
  }
  double derivative(double d) const {
    if (kind == Kind::inverse_power) return -k * scale * std::pow(d, -k - 1);
    const double dk = std::pow(d, k);
    return -k * scale * (dk / d) * std::exp(-dk);
  }
  bool integrable() const { return kind == Kind::exp || k > 1; }
  double potential(double d) const {
    if (!integrable()) throw NotIntegrable("declared tail d^-" + std::to_string(k) + " is not integrable");
    if (kind == Kind::inverse_power) return scale * std::pow(d, 1 - k) / (k - 1);
    return scale * boost::math::tgamma(1 / k, std::pow(d, k)) / k;
  }
  double convex_from() const {
    return kind == Kind::inverse_power ? 0.0 : std::pow((k - 1) / k, 1 / k);
  }
};

// A strictly decreasing repulsive force profile F(d), its pair potential
// E(d) = integral of F over [d, inf), and the slope F'(d). Immutable.
class ForceLaw {
 public:
  enum class Kind { inverse_power, stretched_exp, tabulated };

  static ForceLaw inverse_power(double k) {
    if (!(k >= 2) || !std::isfinite(k)) {
      throw InvalidInput("inverse_power exponent must be a finite real >= 2");
    }
    ForceLaw law;
    law.kind_ = Kind::inverse_power;
    law.k_ = k;
    law.set_integer_exponent();
    return law;
  }

  static ForceLaw stretched_exp(double k) {
    if (!(k >= 1) || !std::isfinite(k)) {
      throw InvalidInput("exp exponent must be a finite real >= 1");
    }
    ForceLaw law;
    law.kind_ = Kind::stretched_exp;
    law.k_ = k;
    law.set_integer_exponent();
    return law;
  }

  // Monotone piecewise-cubic (PCHIP) interpolation of the samples. When
  // `tail` carries no scale it is matched to the last sample.
  static ForceLaw tabulated(std::vector<std::pair<double, double>> samples,
                            std::optional<AnalyticTail> tail, bool tail_scale_given = true) {
    if (samples.size() < 2) throw InvalidInput("tabulated law needs at least 2 samples");
    ForceLaw law;
    law.kind_ = Kind::tabulated;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto [d, f] = samples[i];
      if (!(d > 0) || !std::isfinite(d) || !std::isfinite(f)) {
        throw InvalidInput("tabulated samples need finite positive distances");
      }
      if (i > 0 && !(d > samples[i - 1].first)) {
        throw InvalidInput("tabulated sample distances must be strictly increasing");
      }
      law.xs_.push_back(d);
      law.ys_.push_back(f);
    }
    if (tail) {
      if (!tail_scale_given) {
        const double d_last = law.xs_.back();
        AnalyticTail unit = *tail;
        unit.scale = 1;
        tail->scale = law.ys_.back() / unit.force(d_last);
      }
      law.tail_ = tail;
    }
    law.build_slopes();
    return law;
  }

  Kind kind() const { return kind_; }
  double exponent() const { return k_; }
  const std::vector<double>& sample_distances() const { return xs_; }
  const std::vector<double>& sample_forces() const { return ys_; }
  const std::optional<AnalyticTail>& tail() const { return tail_; }

  // Smallest supported distance (0 means the open half-line).
  double min_distance() const { return kind_ == Kind::tabulated ? xs_.front() : 0.0; }
  double max_distance() const {
    return (kind_ == Kind::tabulated && !tail_) ? xs_.back() : std::numeric_limits<double>::infinity();
  }

  double force(double d) const {
    check_domain(d);
    switch (kind_) {
      case Kind::inverse_power:
        return 1 / pow_k(d);
      case Kind::stretched_exp:
        return std::exp(-pow_k(d));
      case Kind::tabulated:
        break;
    }
    if (d > xs_.back()) return tail_->force(d);
    const std::size_t i = segment(d);
    return hermite(i, d);
  }

  double derivative(double d) const {
    check_domain(d);
    switch (kind_) {
      case Kind::inverse_power:
        return -k_ / (pow_k(d) * d);
      case Kind::stretched_exp: {
        const double dk = pow_k(d);
        return -k_ * (dk / d) * std::exp(-dk);
      }
      case Kind::tabulated:
        break;
    }
    if (d > xs_.back()) return tail_->derivative(d);
    return hermite_slope(segment(d), d);
  }

  double potential(double d) const {
    check_domain(d);
    switch (kind_) {
      case Kind::inverse_power:
        return std::pow(d, 1 - k_) / (k_ - 1);
      case Kind::stretched_exp:
        return boost::math::tgamma(1 / k_, std::pow(d, k_)) / k_;
      case Kind::tabulated:
        break;
    }
    if (!tail_) throw NotIntegrable("tabulated law declares no analytic tail");
    if (d >= xs_.back()) return tail_->potential(d);
    const std::size_t i = segment(d);
    return hermite_integral_to_right(i, d) + cumulative_[i + 1] + tail_->potential(xs_.back());
  }

  // F is convex on [convex_from(), inf). Infinite if nothing is known.
  double convex_from() const {
    switch (kind_) {
      case Kind::inverse_power:
        return 0.0;
      case Kind::stretched_exp:
        return std::pow((k_ - 1) / k_, 1 / k_);
      case Kind::tabulated:
        break;
    }
    if (!tail_) return std::numeric_limits<double>::infinity();
    return std::max(xs_.back(), tail_->convex_from());
  }

  // Relative error bound of one force evaluation at distance d, including
  // the rounding of d itself.
  double relative_error(double d) const {
    const double u = kUnitRoundoff;
    switch (kind_) {
      case Kind::inverse_power:
        return (2 * k_ + 6) * u;
      case Kind::stretched_exp:
        return (std::pow(d, k_) * (k_ + 3) + 4) * u;
      case Kind::tabulated:
        break;
    }
    double rel = 64 * u;
    if (tail_ && d > xs_.back()) {
      rel += tail_->kind == AnalyticTail::Kind::exp ? std::pow(d, tail_->k) * (tail_->k + 3) * u
                                                    : (2 * tail_->k + 6) * u;
    }
    return rel;
  }

  bool integrable() const {
    if (kind_ != Kind::tabulated) return true;
    return tail_ && tail_->integrable();
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::inverse_power:
        os << "inverse_power:" << k_;
        break;
      case Kind::stretched_exp:
        os << "exp:" << k_;
        break;
      case Kind::tabulated:
        os << "tabulated[" << xs_.size() << "]";
        break;
    }
    return os.str();
  }

 private:
  ForceLaw() = default;

  void set_integer_exponent() {
    if (k_ == std::floor(k_) && k_ <= 16) int_k_ = static_cast<int>(k_);
  }

  // d^k, by repeated multiplication for small integer exponents.
  double pow_k(double d) const {
    if (int_k_ == 0) return std::pow(d, k_);
    double r = d;
    for (int i = 1; i < int_k_; ++i) r *= d;
    return r;
  }

  void check_domain(double d) const {
    if (!(d > 0) || std::isnan(d)) {
      throw DomainError("force law evaluated at non-positive distance " + std::to_string(d));
    }
    if (kind_ == Kind::tabulated && (d < xs_.front() || d > max_distance())) {
      throw DomainError("distance " + std::to_string(d) + " outside tabulated range");
    }
  }

  std::size_t segment(double d) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), d);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, xs_.size() - 2);
  }

  double hermite(std::size_t i, double x) const {
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
           (-2 * t3 + 3 * t2) * ys_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
  }

  double hermite_slope(std::size_t i, double x) const {
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * ys_[i] + (-6 * t2 + 6 * t) * ys_[i + 1]) / h +
           (3 * t2 - 4 * t + 1) * slopes_[i] + (3 * t2 - 2 * t) * slopes_[i + 1];
  }

  // Exact integral of the Hermite cubic of segment i over [x, xs_[i+1]].
  double hermite_integral_to_right(std::size_t i, double x) const {
    const double h = xs_[i + 1] - xs_[i];
    auto antiderivative = [&](double t) {
      const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
      return (t4 / 2 - t3 + t) * ys_[i] + (t4 / 4 - 2 * t3 / 3 + t2 / 2) * h * slopes_[i] +
             (-t4 / 2 + t3) * ys_[i + 1] + (t4 / 4 - t3 / 3) * h * slopes_[i + 1];
    };
    const double t = (x - xs_[i]) / h;
    return h * (antiderivative(1.0) - antiderivative(t));
  }

  // Fritsch-Butland slopes with the three-point end formula, as in the
  // usual PCHIP construction.
  void build_slopes() {
    const std::size_t n = xs_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = xs_[i + 1] - xs_[i];
      delta[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }
    slopes_.assign(n, 0.0);
    if (n == 2) {
      slopes_[0] = slopes_[1] = delta[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] > 0) {
          const double w1 = 2 * h[i] + h[i - 1];
          const double w2 = h[i] + 2 * h[i - 1];
          slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
      }
      auto end_slope = [](double h0, double h1, double d0, double d1) {
        double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0) return 0.0;
        if (d0 * d1 <= 0 && std::abs(m) > std::abs(3 * d0)) return 3 * d0;
        return m;
      };
      slopes_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
      slopes_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    cumulative_.assign(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) {
      cumulative_[i] = cumulative_[i + 1] + hermite_integral_to_right(i, xs_[i]);
    }
  }

  Kind kind_ = Kind::inverse_power;
  double k_ = 2;
  int int_k_ = 0;
  std::vector<double> xs_, ys_, slopes_, cumulative_;
  std::optional<AnalyticTail> tail_;
};

inline double eval_force(const ForceLaw& law, double d) { return law.force(d); }
inline double eval_potential(const ForceLaw& law, double d) { return law.potential(d); }
inline double eval_force_derivative(const ForceLaw& law, double d) { return law.derivative(d); }

// Integral-test bound: sum_{k>=0} F(start + k*gap) <= F(start) + E(start)/gap,
// rounded outward.
inline double tail_force_bound(const ForceLaw& law, double start, double gap_lower) {
  if (!(start > 0)) throw DomainError("tail_force_bound: start must be positive");
  if (!(gap_lower > 0)) throw DomainError("tail_force_bound: gap lower bound must be positive");
  const double f = round_up(law.force(start), 2);
  const double e = round_up(law.potential(start), 4);
  return round_up(f + round_up(e / gap_lower), 1);
}

// Smallest distance d with F(d) <= value. Used to turn force bounds into
// distance bounds.
inline double inverse_force(const ForceLaw& law, double value) {
  if (!(value > 0)) throw DomainError("inverse_force: value must be positive");
  double lo = law.min_distance() > 0 ? law.min_distance() : 1.0;
  if (law.min_distance() == 0) {
    while (law.force(lo) <= value && lo > 1e-300) lo /= 2;
  }
  if (law.force(lo) <= value) return lo;
  double hi = std::max(lo * 2, 1.0);
  while (law.force(hi) > value) {
    hi *= 2;
    if (hi > law.max_distance() || !std::isfinite(hi)) {
      throw DomainError("inverse_force: value below the law's range");
    }
  }
  const auto r = bisect_decreasing([&](double d) { return law.force(d) - value; }, lo, hi);
  return r.root;
}

struct LawReport {
  bool positive = true;
  bool strictly_decreasing = true;
  bool tail_integrable = true;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

inline LawReport verify_law(const ForceLaw& law, const std::vector<double>& grid) {
  LawReport report;
  auto fail = [&](std::string msg) { report.failures.push_back(std::move(msg)); };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      fail("grid must be sorted and positive");
      return report;
    }
  }
  if (law.kind() == ForceLaw::Kind::tabulated) {
    const auto& ys = law.sample_forces();
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (!(ys[i] > 0)) {
        report.positive = false;
        fail("sample " + std::to_string(i) + " is not positive");
        break;
      }
    }
    for (std::size_t i = 1; i < ys.size(); ++i) {
      if (!(ys[i] < ys[i - 1])) {
        report.strictly_decreasing = false;
        fail("not strictly decreasing between samples " + std::to_string(i - 1) + " and " +
             std::to_string(i));
        break;
      }
    }
  }
  std::optional<double> prev;
  for (double d : grid) {
    double f = 0;
    try {
      f = law.force(d);
    } catch (const DomainError& e) {
      fail(std::string("grid point outside supported range: ") + e.what());
      continue;
    }
    if (!(f > 0) && report.positive) {
      report.positive = false;
      fail("force not positive at d=" + std::to_string(d));
    }
    if (prev && !(f < *prev) && report.strictly_decreasing) {
      report.strictly_decreasing = false;
      fail("not strictly decreasing at d=" + std::to_string(d));
    }
    prev = f;
  }
  if (!law.integrable()) {
    report.tail_integrable = false;
    fail("tail not integrable");
  }
  return report;
}

}  // namespace equilib
