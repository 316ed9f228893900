#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "equilib/config.hpp"
#include "equilib/force_law.hpp"
#include "equilib/numeric.hpp"
#include "equilib/tail_sum.hpp"

namespace equilib {

// Sign convention: net force is rightward positive on the line and
// counterclockwise positive on the circle. F_minus is the push received from
// the left (clockwise) side, F_plus the push from the right, so
// net = F_minus - F_plus.
struct SideForces {
  double f_minus = 0;
  double f_plus = 0;
  double net = 0;
  double error_bound = 0;
};

struct ParticleResidual {
  std::size_t index = 0;
  double f_minus = 0;
  double f_plus = 0;
  double net = 0;
  double error_bound = 0;
};

struct ResidualReport {
  std::vector<ParticleResidual> particles;
  double max_abs_net = 0;
  double max_error_bound = 0;

  bool in_equilibrium(double tolerance) const { return max_abs_net <= tolerance + max_error_bound; }
};

// Points closer than this to an exact antipode exert no tangential force.
inline constexpr double kAntipodalTolerance = 1e-12;

namespace detail {

struct OneSide {
  double value;
  double error;
};

// Window contributions in increasing distance, then the tail.
inline OneSide sum_left(const LineConfig& cfg, std::size_t i, const ForceLaw& law, double tol) {
  const double x = cfg.window[i];
  CompensatedSum sum;
  double term_err = 0;
  for (std::size_t j = i; j-- > 0;) {
    const double d = x - cfg.window[j];
    const double f = law.force(d);
    sum.add(f);
    term_err += f * law.relative_error(d);
  }
  double err = 0;
  if (!cfg.left_tail.empty()) {
    const auto t = certified_tail_sum(law, cfg.left_tail, x - cfg.left_tail.start, tol);
    sum.add(t.value);
    err += t.error;
  }
  return {sum.value(), round_up(err + term_err + sum.rounding_bound(), 2)};
}

inline OneSide sum_right(const LineConfig& cfg, std::size_t i, const ForceLaw& law, double tol) {
  const double x = cfg.window[i];
  CompensatedSum sum;
  double term_err = 0;
  for (std::size_t j = i + 1; j < cfg.window.size(); ++j) {
    const double d = cfg.window[j] - x;
    const double f = law.force(d);
    sum.add(f);
    term_err += f * law.relative_error(d);
  }
  double err = 0;
  if (!cfg.right_tail.empty()) {
    const auto t = certified_tail_sum(law, cfg.right_tail, cfg.right_tail.start - x, tol);
    sum.add(t.value);
    err += t.error;
  }
  return {sum.value(), round_up(err + term_err + sum.rounding_bound(), 2)};
}

}  // namespace detail

// One-sided forces on window particle `index`. Tails are summed until the
// enclosure of what remains is narrower than `tolerance`.
inline SideForces side_forces(const LineConfig& cfg, std::size_t index, const ForceLaw& law,
                              double tolerance = 1e-13) {
  if (index >= cfg.window.size()) throw InvalidInput("side_forces: index outside window");
  const auto left = detail::sum_left(cfg, index, law, tolerance);
  const auto right = detail::sum_right(cfg, index, law, tolerance);
  SideForces out;
  out.f_minus = left.value;
  out.f_plus = right.value;
  out.net = left.value - right.value;
  out.error_bound = round_up(left.error + right.error + kUnitRoundoff * std::abs(out.net), 2);
  return out;
}

inline ResidualReport residual_report(const LineConfig& cfg, const ForceLaw& law,
                                      double tolerance = 1e-13) {
  cfg.validate();
  ResidualReport report;
  report.particles.reserve(cfg.window.size());
  for (std::size_t i = 0; i < cfg.window.size(); ++i) {
    const auto s = side_forces(cfg, i, law, tolerance);
    report.particles.push_back({i, s.f_minus, s.f_plus, s.net, s.error_bound});
    report.max_abs_net = std::max(report.max_abs_net, std::abs(s.net));
    report.max_error_bound = std::max(report.max_error_bound, s.error_bound);
  }
  return report;
}

// Tangential forces on the unit circle. Distance is the shorter arc; the
// force pushes along that arc away from the other particle; exact antipodes
// contribute nothing.
inline ResidualReport circle_residual_report(const CircleConfig& cfg, const ForceLaw& law) {
  const std::size_t n = cfg.angles.size();
  if (n < 2) throw InvalidInput("circle config needs at least 2 particles");
  ResidualReport report;
  std::vector<double> ccw_side, cw_side;
  for (std::size_t p = 0; p < n; ++p) {
    ccw_side.clear();
    cw_side.clear();
    for (std::size_t q = 0; q < n; ++q) {
      if (q == p) continue;
      // |dq - dp| is symmetric in p and q, and 2pi - a is exact for a in
      // [pi, 2pi), so both particles of a pair see the same distance.
      const double a = std::abs(cfg.angles[q] - cfg.angles[p]);
      if (a == 0) throw DomainError("coincident particles on the circle");
      if (std::abs(a - std::numbers::pi) <= kAntipodalTolerance) continue;
      const bool short_way_direct = a < std::numbers::pi;
      const double d = short_way_direct ? a : kTwoPi - a;
      if (!(d > 0)) throw DomainError("coincident particles on the circle");
      const bool q_ahead = short_way_direct == (cfg.angles[q] > cfg.angles[p]);
      if (q_ahead) {
        ccw_side.push_back(d);
      } else {
        cw_side.push_back(d);
      }
    }
    std::sort(ccw_side.begin(), ccw_side.end());
    std::sort(cw_side.begin(), cw_side.end());
    CompensatedSum minus, plus;
    for (double d : cw_side) minus.add(law.force(d));
    for (double d : ccw_side) plus.add(law.force(d));
    ParticleResidual r{p, minus.value(), plus.value(), minus.value() - plus.value(), 0.0};
    report.max_abs_net = std::max(report.max_abs_net, std::abs(r.net));
    report.particles.push_back(r);
  }
  return report;
}

}  // namespace equilib
