#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "equilib/config.hpp"
#include "equilib/errors.hpp"
#include "equilib/force_law.hpp"
#include "equilib/line_system.hpp"
#include "equilib/residuals.hpp"
#include "equilib/solver_options.hpp"

namespace equilib {

enum class SweepDirection { left_to_right, right_to_left };

struct SweepStats {
  double max_move = 0;
  std::vector<std::size_t> flagged;
};

// One Gauss-Seidel pass: every free particle in order is moved to the root
// of its own net force. Optionally records the energy after each move.
inline SweepStats run_sweep(LineSystem& sys, SweepDirection dir, double position_tol,
                            std::vector<double>* energy_trace = nullptr) {
  SweepStats stats;
  auto visit = [&](std::size_t i) {
    const auto p = sys.place(i, position_tol);
    stats.max_move = std::max(stats.max_move, std::abs(p.new_position - p.old_position));
    if (!p.bracketed) stats.flagged.push_back(i);
    if (energy_trace) energy_trace->push_back(sys.energy());
  };
  const auto& idx = sys.free_indices();
  if (dir == SweepDirection::left_to_right) {
    for (std::size_t i : idx) visit(i);
  } else {
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) visit(*it);
  }
  return stats;
}

struct RelaxStats {
  std::size_t sweeps = 0;
  std::size_t newton_steps = 0;
  double residual = 0;
  bool reached = false;
};

// Gauss-Seidel sweeps until the residual is moderate, then Newton. Newton
// failures fall back to sweeps.
inline RelaxStats relax_system(LineSystem& sys, double target, const SolverOptions& opts,
                               std::vector<double>* energy_trace = nullptr, bool sweeps_first = true) {
  RelaxStats st;
  st.residual = sys.max_free_residual();
  if (sys.free_indices().empty()) {
    st.reached = true;
    return st;
  }
  bool forward = true;
  auto sweep = [&] {
    run_sweep(sys, forward ? SweepDirection::left_to_right : SweepDirection::right_to_left,
              opts.position_tol, energy_trace);
    forward = !forward;
    ++st.sweeps;
    st.residual = sys.max_free_residual();
  };
  if (sweeps_first) {
    const double switch_level = std::max(target, 1e-3);
    while (st.residual > switch_level && st.sweeps < opts.max_sweeps) sweep();
  }
  int stalls = 0;
  for (std::size_t it = 0; it < opts.max_outer_iters && st.residual > target; ++it) {
    if (sys.newton_step()) {
      ++st.newton_steps;
      if (energy_trace) energy_trace->push_back(sys.energy());
      const double r = sys.max_free_residual();
      stalls = r < 0.5 * st.residual ? 0 : stalls + 1;
      st.residual = r;
    } else {
      // At the rounding floor sweeps cannot help either.
      if (st.residual <= std::max(1e3 * target, 1e-9)) break;
      ++stalls;
      if (st.sweeps < opts.max_sweeps) sweep();
    }
    if (stalls >= 4) break;
  }
  st.reached = st.residual <= target;
  return st;
}

namespace detail {

inline double max_free_net(const ResidualReport& report, const std::vector<bool>& fixed) {
  double m = 0;
  for (const auto& p : report.particles) {
    if (!fixed[p.index]) m = std::max(m, std::abs(p.net));
  }
  return m;
}

inline double inner_target(const SolverOptions& opts) { return std::max(1e-14, 1e-3 * opts.residual_tol); }

}  // namespace detail

struct PinnedSegmentResult {
  std::vector<double> interior;
  LineConfig config;
  std::vector<std::size_t> fixed_indices;
  ResidualReport report;
  double max_residual = 0;
  std::size_t sweeps = 0;
  std::size_t newton_steps = 0;
  bool converged = false;
  std::vector<double> energy_trace;
};

// Minimises the energy of `n_interior` particles between two groups of
// pinned particles; each interior particle ends in force balance.
inline PinnedSegmentResult solve_pinned_segment(std::vector<double> fixed_left,
                                                std::vector<double> fixed_right, std::size_t n_interior,
                                                const ForceLaw& law, const SolverOptions& opts,
                                                bool record_energy = false) {
  opts.validate();
  if (fixed_left.empty() || fixed_right.empty()) throw InvalidPins("pins required on both sides");
  if (n_interior == 0) throw InvalidInput("n_interior must be at least 1");
  std::sort(fixed_left.begin(), fixed_left.end());
  std::sort(fixed_right.begin(), fixed_right.end());
  for (const auto* pins : {&fixed_left, &fixed_right}) {
    for (std::size_t i = 0; i < pins->size(); ++i) {
      if (!std::isfinite((*pins)[i])) throw InvalidPins("pins must be finite");
      if (i > 0 && !((*pins)[i] > (*pins)[i - 1])) throw InvalidPins("pins must be distinct");
    }
  }
  const double lo = fixed_left.back(), hi = fixed_right.front();
  if (!(lo < hi)) throw InvalidPins("left pins must lie below right pins");

  LineConfig cfg;
  std::vector<bool> fixed;
  for (double x : fixed_left) {
    cfg.window.push_back(x);
    fixed.push_back(true);
  }
  for (std::size_t k = 1; k <= n_interior; ++k) {
    cfg.window.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_interior + 1));
    fixed.push_back(false);
  }
  for (double x : fixed_right) {
    cfg.window.push_back(x);
    fixed.push_back(true);
  }

  PinnedSegmentResult out;
  LineSystem sys(cfg, fixed, law);
  if (record_energy) out.energy_trace.push_back(sys.energy());
  const auto st = relax_system(sys, detail::inner_target(opts), opts,
                               record_energy ? &out.energy_trace : nullptr);
  out.sweeps = st.sweeps;
  out.newton_steps = st.newton_steps;
  out.config = sys.config();
  out.config.derive_bounds();
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed[i]) {
      out.fixed_indices.push_back(i);
    } else {
      out.interior.push_back(out.config.window[i]);
    }
  }
  out.report = residual_report(out.config, law);
  out.max_residual = detail::max_free_net(out.report, fixed);
  out.converged = out.max_residual <= opts.residual_tol;
  if (!out.converged && !opts.allow_unconverged) {
    throw NoConvergence("pinned segment did not reach the residual tolerance", out.max_residual);
  }
  return out;
}

struct SweepResult {
  LineConfig config;
  std::vector<double> displacement;
  double max_move = 0;
  std::vector<std::size_t> flagged;
  double max_residual = 0;
};

inline std::vector<bool> fixed_mask(std::size_t size, const std::vector<std::size_t>& fixed_indices) {
  std::vector<bool> mask(size, false);
  for (std::size_t i : fixed_indices) {
    if (i >= size) throw InvalidInput("fixed index outside window");
    mask[i] = true;
  }
  return mask;
}

// One relaxation pass over the non-fixed particles of `cfg`.
inline SweepResult sweep_relax(const LineConfig& cfg, const std::vector<std::size_t>& fixed_indices,
                               const ForceLaw& law, SweepDirection dir, const SolverOptions& opts) {
  if (cfg.window.size() < 2) throw InvalidInput("sweep_relax: need at least two particles");
  for (std::size_t i = 1; i < cfg.window.size(); ++i) {
    if (cfg.window[i] == cfg.window[i - 1]) throw DomainError("sweep_relax: coincident particles");
    if (!(cfg.window[i] > cfg.window[i - 1])) throw InvalidInput("sweep_relax: window must be increasing");
  }
  auto mask = fixed_mask(cfg.window.size(), fixed_indices);
  if (!mask.front() || !mask.back()) throw InvalidInput("sweep_relax: extreme particles must be fixed");
  LineSystem sys(cfg, mask, law);
  const auto stats = run_sweep(sys, dir, opts.position_tol);
  SweepResult out;
  out.config = sys.config();
  for (std::size_t i = 0; i < cfg.window.size(); ++i) {
    out.displacement.push_back(out.config.window[i] - cfg.window[i]);
  }
  out.max_move = stats.max_move;
  out.flagged = stats.flagged;
  out.max_residual = sys.max_free_residual();
  return out;
}

struct ZeroCenteredProblem {
  double a = -1;
  double b = 1;
  std::size_t n = 1;
  ForceLaw law = ForceLaw::inverse_power(2);
};

struct ZeroCenteredResult {
  LineConfig config;
  ResidualReport report;
  double max_residual = 0;
  double left_error = 0;
  double right_error = 0;
  double left_bound = 0;
  double right_bound = 0;
  std::size_t outer_iterations = 0;
  std::size_t inner_solves = 0;
  bool converged = false;
};

// Upper bound on x_n for 0-centred configurations with x_1 <= b: the push
// F(b_k) from the origin on x_{k+1} must be balanced by the n-k-1 particles
// beyond it.
inline double zero_centered_bound(const ForceLaw& law, double b, std::size_t n) {
  double bound = b;
  for (std::size_t k = 1; k < n; ++k) {
    bound += inverse_force(law, law.force(bound) / static_cast<double>(n - k));
  }
  return bound;
}

namespace detail {

// Root of an increasing function on (lo, hi] by the Illinois variant of
// regula falsi, bisecting whenever it stalls. h_lo < 0 < h_hi.
template <typename H>
double illinois(H&& h, double lo, double h_lo, double hi, double h_hi, double f_tol, int max_iter,
                int* evaluations) {
  int side = 0;
  double best = std::abs(h_lo) < std::abs(h_hi) ? lo : hi;
  for (int it = 0; it < max_iter; ++it) {
    double t = hi - h_hi * (hi - lo) / (h_hi - h_lo);
    if (!(t > lo && t < hi) || !std::isfinite(t)) t = lo + (hi - lo) / 2;
    if (!(t > lo && t < hi)) break;
    const double ht = h(t);
    ++*evaluations;
    best = t;
    if (std::abs(ht) <= f_tol) return t;
    if (ht < 0) {
      lo = t;
      h_lo = ht;
      if (side == -1) h_hi /= 2;
      side = -1;
    } else {
      hi = t;
      h_hi = ht;
      if (side == 1) h_lo /= 2;
      side = 1;
    }
  }
  return best;
}

}  // namespace detail

// Finds a 0-centred configuration {x_-n, ..., 0, ..., x_n} with x_-1 = a and
// x_1 = b by alternately shooting on the two free endpoints.
inline ZeroCenteredResult solve_zero_centered(const ZeroCenteredProblem& problem, const SolverOptions& opts) {
  opts.validate();
  const double a = problem.a, b = problem.b;
  const std::size_t n = problem.n;
  if (!(a < 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidInput("zero-centered: need a < 0 < b");
  }
  if (n < 1) throw InvalidInput("zero-centered: need n >= 1");
  const ForceLaw& law = problem.law;

  ZeroCenteredResult out;
  if (n == 1) {
    out.config = LineConfig::finite_window({a, 0.0, b});
    out.report = residual_report(out.config, law);
    out.converged = true;
    return out;
  }

  const std::size_t size = 2 * n + 1;
  std::vector<bool> fixed(size, false);
  fixed[0] = fixed[n] = fixed[2 * n] = true;
  out.right_bound = zero_centered_bound(law, b, n);
  out.left_bound = -zero_centered_bound(law, -a, n);
  const double r_hi = out.right_bound * (1 + 1e-9) + 1e-9;
  const double l_lo = out.left_bound * (1 + 1e-9) - 1e-9;

  std::vector<double> x(size);
  auto spread = [&](double L, double R) {
    for (std::size_t k = 0; k <= n; ++k) {
      x[n - k] = L * static_cast<double>(k) / static_cast<double>(n);
      x[n + k] = R * static_cast<double>(k) / static_cast<double>(n);
    }
  };
  double L = std::max(a * static_cast<double>(n), l_lo / 2 + a / 2);
  double R = std::min(b * static_cast<double>(n), r_hi / 2 + b / 2);
  spread(L, R);

  const double target = detail::inner_target(opts);
  double last_residual = 0;
  // Equilibrium for endpoints (L, R), warm-started by rescaling each half.
  auto solve_inner = [&](double newL, double newR) {
    const double sl = newL / x[0], sr = newR / x[2 * n];
    for (std::size_t k = 0; k < n; ++k) x[k] *= sl;
    for (std::size_t k = n + 1; k < size; ++k) x[k] *= sr;
    x[0] = newL;
    x[2 * n] = newR;
    LineConfig cfg;
    cfg.window = x;
    LineSystem sys(cfg, fixed, law);
    const auto st = relax_system(sys, target, opts);
    last_residual = st.residual;
    x = sys.positions();
    ++out.inner_solves;
  };

  solve_inner(L, R);
  const int root_iters = 200;
  int evaluations = 0;
  for (std::size_t outer = 0; outer < opts.max_outer_iters; ++outer) {
    out.outer_iterations = outer + 1;
    const double e_right = x[n + 1] - b, e_left = x[n - 1] - a;
    if (std::abs(e_right) <= 0.1 * opts.position_tol && std::abs(e_left) <= 0.1 * opts.position_tol) break;
    if (std::abs(e_right) >= std::abs(e_left)) {
      auto h = [&](double r) {
        solve_inner(L, r);
        return x[n + 1] - b;
      };
      double lo, h_lo, hi, h_hi;
      if (e_right < 0) {
        lo = R;
        h_lo = e_right;
        hi = r_hi;
        h_hi = h(hi);
        if (!(h_hi > 0)) throw InfeasibleBracket("zero-centered: right endpoint bound does not bracket b");
      } else {
        hi = R;
        h_hi = e_right;
        lo = R;
        h_lo = e_right;
        for (int k = 0; k < 200 && h_lo >= 0; ++k) {
          hi = lo;
          h_hi = h_lo;
          lo = b + (lo - b) / 2;
          h_lo = h(lo);
        }
        if (!(h_lo < 0)) throw InfeasibleBracket("zero-centered: cannot bracket b from below");
      }
      R = detail::illinois(h, lo, h_lo, hi, h_hi, 0.01 * opts.position_tol, root_iters, &evaluations);
      solve_inner(L, R);
    } else {
      // x_-1 increases with L; shoot on L in [l_lo, a).
      auto h = [&](double l) {
        solve_inner(l, R);
        return x[n - 1] - a;
      };
      double lo, h_lo, hi, h_hi;
      if (e_left > 0) {
        hi = L;
        h_hi = e_left;
        lo = l_lo;
        h_lo = h(lo);
        if (!(h_lo < 0)) throw InfeasibleBracket("zero-centered: left endpoint bound does not bracket a");
      } else {
        lo = L;
        h_lo = e_left;
        hi = L;
        h_hi = e_left;
        for (int k = 0; k < 200 && h_hi <= 0; ++k) {
          lo = hi;
          h_lo = h_hi;
          hi = a + (hi - a) / 2;
          h_hi = h(hi);
        }
        if (!(h_hi > 0)) throw InfeasibleBracket("zero-centered: cannot bracket a from above");
      }
      L = detail::illinois(h, lo, h_lo, hi, h_hi, 0.01 * opts.position_tol, root_iters, &evaluations);
      solve_inner(L, R);
    }
  }

  out.config = LineConfig::finite_window(x);
  out.report = residual_report(out.config, law);
  out.max_residual = detail::max_free_net(out.report, fixed);
  out.left_error = x[n - 1] - a;
  out.right_error = x[n + 1] - b;
  out.converged = out.max_residual <= opts.residual_tol && std::abs(out.left_error) <= opts.position_tol &&
                  std::abs(out.right_error) <= opts.position_tol;
  if (!out.converged && !opts.allow_unconverged) {
    throw NoConvergence("zero-centered shooting did not meet its targets",
                        std::max({out.max_residual, last_residual}));
  }
  return out;
}

struct ExtensionResult {
  std::vector<double> positions;  // x_0 .. x_n; x_n starts the continuation
  std::vector<double> gaps;       // x_{i+1} - x_i
  double gap_lower = 0;
  double gap_upper = 0;
  bool gaps_within_bounds = false;
  double continuation_gap = 0;
  std::size_t level = 0;
  std::vector<std::size_t> levels;
  double level_disagreement = std::numeric_limits<double>::infinity();
  double level_residual = 0;
  // S_- window, the output and the arithmetic continuation beyond x_n.
  LineConfig config;
  ResidualReport report;
  double guarded_residual = 0;
  std::size_t shooting_evaluations = 0;
  bool converged = false;
};

namespace detail {

inline void check_left_half(const LineConfig& s_minus, double b_gap, double B_gap, double x0) {
  if (s_minus.window.empty()) throw InvalidInput("extend: S_minus window is empty");
  if (!s_minus.right_tail.empty()) throw InvalidInput("extend: S_minus must not have a right tail");
  for (std::size_t i = 1; i < s_minus.window.size(); ++i) {
    if (!(s_minus.window[i] - s_minus.window[i - 1] > 0)) throw InvalidInput("extend: S_minus gap <= 0");
  }
  validate_tail(s_minus.left_tail, "left");
  if (!s_minus.left_tail.empty() && !(s_minus.window.front() - s_minus.left_tail.start > 0)) {
    throw InvalidInput("extend: S_minus gap <= 0");
  }
  if (!(b_gap > 0) || !(B_gap >= b_gap) || !std::isfinite(B_gap)) {
    throw InvalidInput("extend: need 0 < b <= B");
  }
  if (!(x0 > s_minus.window.back())) throw InvalidInput("extend: x0 must lie right of S_minus");
}

inline ExtensionResult extend_right_with_gap(const LineConfig& s_minus, double b_gap, double B_gap,
                                             double x0, const ForceLaw& law, const SolverOptions& opts,
                                             double a, const std::vector<double>& initial_gaps = {}) {
  const auto& sch = opts.schedule;
  const std::size_t m = s_minus.window.size();
  const std::size_t N = sch.compare_count;
  const double target = inner_target(opts);

  ExtensionResult out;
  out.continuation_gap = a;
  const double first_gap = x0 - s_minus.window.back();
  out.gap_lower = std::min(b_gap, first_gap);
  out.gap_upper = std::max(B_gap, first_gap);

  // Current level layout: S_- window, x_0..x_{n-1}, x_n.
  std::vector<double> free_pos;
  double xn = 0;
  std::vector<double> prev_output;
  std::size_t n = std::max(sch.initial_level, N + 1);
  {
    double x = x0;
    for (std::size_t i = 0; i < n; ++i) {
      free_pos.push_back(x);
      x += i < initial_gaps.size() ? initial_gaps[i] : a;
    }
    xn = x;
  }

  double level_residual = 0;
  auto solve_level = [&](double new_xn) {
    // Affine rescale of x_0..x_{n-1} into (x_{-1}, new_xn).
    const double left = s_minus.window.back();
    const double scale = (new_xn - left) / (xn - left);
    for (double& p : free_pos) p = left + (p - left) * scale;
    xn = new_xn;
    LineConfig cfg;
    cfg.window = s_minus.window;
    cfg.window.insert(cfg.window.end(), free_pos.begin(), free_pos.end());
    cfg.window.push_back(xn);
    cfg.left_tail = s_minus.left_tail;
    cfg.right_tail = TailModel::arithmetic(xn + a, a);
    std::vector<bool> fixed(cfg.window.size(), true);
    for (std::size_t i = 0; i < free_pos.size(); ++i) fixed[m + i] = false;
    LineSystem sys(cfg, fixed, law, 1e-15);
    const auto st = relax_system(sys, target, opts, nullptr, false);
    level_residual = st.residual;
    std::copy(sys.positions().begin() + static_cast<long>(m), sys.positions().begin() + static_cast<long>(m + n),
              free_pos.begin());
    ++out.shooting_evaluations;
    return free_pos.front() - x0;
  };

  int evaluations = 0;
  while (true) {
    out.levels.push_back(n);
    // Shoot on x_n so that the balanced x_0 lands on x0.
    double h0 = solve_level(xn);
    if (std::abs(h0) > 0.01 * opts.position_tol) {
      double lo, h_lo, hi, h_hi;
      double step = a * static_cast<double>(n) / 8;
      if (h0 < 0) {
        lo = xn;
        h_lo = h0;
        hi = xn;
        h_hi = h0;
        for (int k = 0; k < 100 && h_hi <= 0; ++k, step *= 2) {
          lo = hi;
          h_lo = h_hi;
          hi = lo + step;
          h_hi = solve_level(hi);
        }
      } else {
        hi = xn;
        h_hi = h0;
        lo = xn;
        h_lo = h0;
        for (int k = 0; k < 100 && h_lo >= 0; ++k, step *= 2) {
          hi = lo;
          h_hi = h_lo;
          lo = std::max(x0 + (lo - x0) / 2, lo - step);
          h_lo = solve_level(lo);
        }
      }
      if (!(h_lo < 0 && h_hi > 0)) throw InfeasibleBracket("extend: cannot bracket the last particle");
      auto h = [&](double t) { return solve_level(t); };
      const double root = illinois(h, lo, h_lo, hi, h_hi, 0.01 * opts.position_tol, 200, &evaluations);
      solve_level(root);
    }
    std::vector<double> output(free_pos.begin(), free_pos.begin() + static_cast<long>(N + 1));
    out.level = n;
    out.level_residual = level_residual;
    if (!prev_output.empty()) {
      double diff = 0;
      for (std::size_t i = 0; i <= N; ++i) diff = std::max(diff, std::abs(output[i] - prev_output[i]));
      out.level_disagreement = diff;
    }
    prev_output = output;
    if (out.level_disagreement <= sch.agreement_tol || 2 * n > sch.max_level) break;
    // Next level: keep the solution and append arithmetic particles.
    const std::size_t next = 2 * n;
    free_pos.push_back(xn);
    for (std::size_t i = n + 1; i < next; ++i) free_pos.push_back(free_pos.back() + a);
    xn = free_pos.back() + a;
    n = next;
  }

  out.positions = free_pos;
  out.positions.push_back(xn);
  bool within = true;
  for (std::size_t i = 0; i + 1 < out.positions.size(); ++i) {
    const double g = out.positions[i + 1] - out.positions[i];
    out.gaps.push_back(g);
    if (g < out.gap_lower - sch.agreement_tol || g > out.gap_upper + sch.agreement_tol) within = false;
  }
  out.gaps_within_bounds = within;

  out.config.window = s_minus.window;
  out.config.window.insert(out.config.window.end(), out.positions.begin(), out.positions.end());
  out.config.left_tail = s_minus.left_tail;
  out.config.right_tail = TailModel::arithmetic(xn + a, a);
  out.config.derive_bounds();
  out.report = residual_report(out.config, law);
  const std::size_t guarded = n > sch.guard ? n - sch.guard : 0;
  for (std::size_t i = 0; i < guarded; ++i) {
    out.guarded_residual = std::max(out.guarded_residual, std::abs(out.report.particles[m + i].net));
  }
  out.converged = out.level_disagreement <= sch.agreement_tol && out.guarded_residual <= opts.residual_tol;
  return out;
}

}  // namespace detail

// Right extension of a left half-configuration S_-: positions x_0 = x0 <
// x_1 < ... < x_N, each in equilibrium in S_- together with the extension.
// Levels of increasing length end in an arithmetic progression of gap
// (b + B) / 2; convergence means two successive levels agree.
inline ExtensionResult extend_right(const LineConfig& s_minus, double b_gap, double B_gap, double x0,
                                    const ForceLaw& law, const SolverOptions& opts) {
  opts.validate();
  detail::check_left_half(s_minus, b_gap, B_gap, x0);
  const double a = b_gap + (B_gap - b_gap) / 2;
  auto out = detail::extend_right_with_gap(s_minus, b_gap, B_gap, x0, law, opts, a);
  if (!out.converged && !opts.allow_unconverged) {
    throw NoConvergence("extension levels did not agree", out.level_disagreement);
  }
  return out;
}

struct MultiStartExtension {
  std::vector<ExtensionResult> runs;
  std::vector<std::size_t> cluster_of;  // per run; converged runs only
  std::size_t clusters = 0;
  std::size_t converged_count = 0;
};

// Experiment mode: repeats extend_right with continuation gaps drawn from
// [b, B] and perturbed initial gaps, then clusters the guarded outputs.
inline MultiStartExtension extend_right_multistart(const LineConfig& s_minus, double b_gap, double B_gap,
                                                   double x0, const ForceLaw& law, const SolverOptions& opts,
                                                   std::size_t starts) {
  opts.validate();
  detail::check_left_half(s_minus, b_gap, B_gap, x0);
  std::mt19937_64 rng(opts.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MultiStartExtension out;
  const std::size_t N = opts.schedule.compare_count;
  const std::size_t keep = N >= opts.schedule.guard ? N - opts.schedule.guard : 0;
  std::vector<std::vector<double>> centers;
  for (std::size_t s = 0; s < starts; ++s) {
    const double a = b_gap + (B_gap - b_gap) * unit(rng);
    std::vector<double> init(opts.schedule.initial_level);
    for (double& g : init) g = a * (0.75 + 0.5 * unit(rng));
    auto run = detail::extend_right_with_gap(s_minus, b_gap, B_gap, x0, law, opts, a, init);
    std::size_t label = std::numeric_limits<std::size_t>::max();
    if (run.converged) {
      ++out.converged_count;
      const double radius = 10 * opts.schedule.agreement_tol;
      for (std::size_t c = 0; c < centers.size(); ++c) {
        double diff = 0;
        for (std::size_t i = 0; i <= keep; ++i) diff = std::max(diff, std::abs(centers[c][i] - run.positions[i]));
        if (diff <= radius) {
          label = c;
          break;
        }
      }
      if (label == std::numeric_limits<std::size_t>::max()) {
        label = centers.size();
        centers.push_back(run.positions);
      }
    }
    out.cluster_of.push_back(label);
    out.runs.push_back(std::move(run));
  }
  out.clusters = centers.size();
  return out;
}

}  // namespace equilib
