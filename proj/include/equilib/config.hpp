#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "equilib/errors.hpp"

namespace equilib {

inline constexpr double kTwoPi = 2 * std::numbers::pi;

// Analytic continuation of a line window to one side. Positions are listed
// outward from the window: the first tail particle sits at `start`, the next
// one `pattern[0]` further out, then `pattern[1]`, cycling.
struct TailModel {
  enum class Kind { none, arithmetic, periodic };

  Kind kind = Kind::none;
  double start = 0;
  std::vector<double> pattern;

  static TailModel none() { return {}; }
  static TailModel arithmetic(double first, double gap) {
    return {Kind::arithmetic, first, {gap}};
  }
  static TailModel periodic(double anchor, std::vector<double> gaps) {
    return {Kind::periodic, anchor, std::move(gaps)};
  }

  bool empty() const { return kind == Kind::none; }
  std::size_t period_length() const { return pattern.size(); }
  double period() const {
    double p = 0;
    for (double g : pattern) p += g;
    return p;
  }
  double min_gap() const { return *std::min_element(pattern.begin(), pattern.end()); }
  double max_gap() const { return *std::max_element(pattern.begin(), pattern.end()); }

  // Outward offset of tail particle j from `start`. Computed from the period
  // decomposition so that far particles do not accumulate rounding.
  double offset(std::size_t j) const {
    const std::size_t p = pattern.size();
    const std::size_t q = j / p, r = j % p;
    double prefix = 0;
    for (std::size_t i = 0; i < r; ++i) prefix += pattern[i];
    return static_cast<double>(q) * period() + prefix;
  }

  bool operator==(const TailModel&) const = default;
};

inline void validate_tail(const TailModel& tail, const char* side) {
  if (tail.empty()) return;
  if (tail.pattern.empty()) throw InvalidInput(std::string(side) + " tail: gap pattern is empty");
  if (tail.kind == TailModel::Kind::arithmetic && tail.pattern.size() != 1) {
    throw InvalidInput(std::string(side) + " tail: arithmetic tail takes exactly one gap");
  }
  if (!std::isfinite(tail.start)) throw InvalidInput(std::string(side) + " tail: start must be finite");
  for (double g : tail.pattern) {
    if (!(g > 0) || !std::isfinite(g)) {
      throw InvalidInput(std::string(side) + " tail: gaps must be positive");
    }
  }
}

// Finite window of a (possibly bi-infinite) line configuration plus tail
// models and the uniform-discreteness constants c <= gap <= C.
struct LineConfig {
  std::vector<double> window;
  TailModel left_tail;
  TailModel right_tail;
  double c = 0;
  double C = 0;

  std::size_t size() const { return window.size(); }
  bool finite() const { return left_tail.empty() && right_tail.empty(); }

  // Every gap of the represented configuration that is not repeated by a
  // tail period: window gaps, junction gaps and one copy of each pattern.
  std::vector<double> all_gaps() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < window.size(); ++i) out.push_back(window[i] - window[i - 1]);
    if (!left_tail.empty()) {
      out.push_back(window.front() - left_tail.start);
      out.insert(out.end(), left_tail.pattern.begin(), left_tail.pattern.end());
    }
    if (!right_tail.empty()) {
      out.push_back(right_tail.start - window.back());
      out.insert(out.end(), right_tail.pattern.begin(), right_tail.pattern.end());
    }
    return out;
  }

  // Fills c and C from the data when either is unset (<= 0).
  LineConfig& derive_bounds() {
    const auto g = all_gaps();
    if (g.empty()) {
      if (c <= 0) c = 1;
      if (C <= 0) C = c;
      return *this;
    }
    if (c <= 0) c = *std::min_element(g.begin(), g.end());
    if (C <= 0) C = *std::max_element(g.begin(), g.end());
    return *this;
  }

  void validate() const {
    if (window.empty()) throw InvalidInput("config: window must not be empty");
    for (std::size_t i = 0; i < window.size(); ++i) {
      if (!std::isfinite(window[i])) throw InvalidInput("config: window positions must be finite");
      if (i > 0 && !(window[i] > window[i - 1])) {
        throw InvalidInput("config: window must be strictly increasing");
      }
    }
    validate_tail(left_tail, "left");
    validate_tail(right_tail, "right");
    if (!left_tail.empty() && !(left_tail.start < window.front())) {
      throw InvalidInput("config: left tail overlaps the window");
    }
    if (!right_tail.empty() && !(right_tail.start > window.back())) {
      throw InvalidInput("config: right tail overlaps the window");
    }
    if (!(c > 0) || !(C >= c) || !std::isfinite(C)) {
      throw InvalidInput("config: need 0 < c <= C < inf");
    }
    const double slack = 1e-12;
    for (double g : all_gaps()) {
      if (g < c * (1 - slack) || g > C * (1 + slack)) {
        throw InvalidInput("config: gap " + std::to_string(g) + " outside [c, C]");
      }
    }
  }

  // Arithmetic progression with `count` window particles starting at
  // `first`, continued by arithmetic tails on both sides.
  static LineConfig trivial(double gap, std::size_t count, double first = 0.0) {
    LineConfig cfg;
    for (std::size_t i = 0; i < count; ++i) cfg.window.push_back(first + gap * static_cast<double>(i));
    cfg.left_tail = TailModel::arithmetic(first - gap, gap);
    cfg.right_tail = TailModel::arithmetic(first + gap * static_cast<double>(count), gap);
    cfg.c = cfg.C = gap;
    return cfg;
  }

  static LineConfig finite_window(std::vector<double> positions) {
    LineConfig cfg;
    cfg.window = std::move(positions);
    cfg.derive_bounds();
    return cfg;
  }
};

// Angle mapped into [0, 2*pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0;
  return r;
}

// n >= 2 particles on the unit circle, angles strictly increasing in [0, 2pi).
struct CircleConfig {
  std::vector<double> angles;

  std::size_t size() const { return angles.size(); }

  void validate() const {
    if (angles.size() < 2) throw InvalidInput("circle config needs at least 2 particles");
    for (std::size_t i = 0; i < angles.size(); ++i) {
      if (!(angles[i] >= 0) || !(angles[i] < kTwoPi)) {
        throw InvalidInput("circle angles must lie in [0, 2pi)");
      }
      if (i > 0 && !(angles[i] > angles[i - 1])) {
        throw InvalidInput("circle angles must be strictly increasing");
      }
    }
  }

  // Sorts arbitrary angles into canonical storage order.
  static CircleConfig from_angles(std::vector<double> raw) {
    for (double& a : raw) a = wrap_angle(a);
    std::sort(raw.begin(), raw.end());
    return CircleConfig{std::move(raw)};
  }

  static CircleConfig equally_spaced(std::size_t n) {
    CircleConfig cfg;
    for (std::size_t i = 0; i < n; ++i) {
      cfg.angles.push_back(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
    }
    return cfg;
  }
};

inline std::vector<double> gaps(const LineConfig& cfg) {
  std::vector<double> out;
  for (std::size_t i = 1; i < cfg.window.size(); ++i) out.push_back(cfg.window[i] - cfg.window[i - 1]);
  return out;
}

// Cyclic arcs; arc i runs counterclockwise from particle i to particle i+1.
inline std::vector<double> gaps(const CircleConfig& cfg) {
  std::vector<double> out;
  const std::size_t n = cfg.angles.size();
  for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(cfg.angles[i + 1] - cfg.angles[i]);
  if (n >= 2) out.push_back(cfg.angles.front() + kTwoPi - cfg.angles.back());
  return out;
}

struct ExtremalGaps {
  double max_value = 0;
  double min_value = 0;
  std::vector<std::size_t> max_indices;
  std::vector<std::size_t> min_indices;
  // True iff some maximal (minimal) gap has an adjacent gap strictly smaller
  // (larger).
  bool max_strict = false;
  bool min_strict = false;
};

namespace detail {

inline ExtremalGaps extremal_of(const std::vector<double>& g, bool cyclic) {
  ExtremalGaps out;
  if (g.empty()) return out;
  out.max_value = *std::max_element(g.begin(), g.end());
  out.min_value = *std::min_element(g.begin(), g.end());
  const std::size_t n = g.size();
  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> nb;
    if (i > 0) {
      nb.push_back(i - 1);
    } else if (cyclic && n > 1) {
      nb.push_back(n - 1);
    }
    if (i + 1 < n) {
      nb.push_back(i + 1);
    } else if (cyclic && n > 1) {
      nb.push_back(0);
    }
    return nb;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] == out.max_value) {
      out.max_indices.push_back(i);
      for (auto j : neighbours(i)) out.max_strict |= g[j] < g[i];
    }
    if (g[i] == out.min_value) {
      out.min_indices.push_back(i);
      for (auto j : neighbours(i)) out.min_strict |= g[j] > g[i];
    }
  }
  return out;
}

}  // namespace detail

inline ExtremalGaps extremal_gaps(const LineConfig& cfg) {
  return detail::extremal_of(gaps(cfg), false);
}
inline ExtremalGaps extremal_gaps(const CircleConfig& cfg) {
  return detail::extremal_of(gaps(cfg), true);
}

// Rotates so the first particle sits at angle 0.
inline CircleConfig canonicalize_circle(const CircleConfig& cfg) {
  CircleConfig out;
  if (cfg.angles.empty()) return out;
  const double base = cfg.angles.front();
  out.angles.reserve(cfg.angles.size());
  for (double a : cfg.angles) out.angles.push_back(a - base);
  out.angles.front() = 0.0;
  return out;
}

}  // namespace equilib
