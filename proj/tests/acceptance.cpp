// Acceptance harness: one PASS/FAIL line per criterion. With an argument
// N only criterion N runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "equilib/equilib.hpp"

using namespace equilib;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ << (failures_ > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string& summary) const {
    std::ostringstream os;
    os << summary << " [" << checks_ << " checks";
    if (failures_) os << ", " << failures_ << " failed: " << messages_.str();
    os << "]";
    return {failures_ == 0, os.str()};
  }

 private:
  std::size_t checks_ = 0, failures_ = 0;
  std::ostringstream messages_;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ForceLaw kCoulomb = ForceLaw::inverse_power(2);

std::vector<ForceLaw> criterion_laws() {
  return {ForceLaw::inverse_power(2), ForceLaw::inverse_power(3), ForceLaw::stretched_exp(1)};
}

double bisect(const std::function<double(double)>& h, double lo, double hi) {
  double h_lo = h(lo);
  for (int i = 0; i < 300 && hi - lo > 0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double hm = h(mid);
    if ((hm > 0) == (h_lo > 0)) {
      lo = mid;
      h_lo = hm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Window of `periods` copies of `pattern` continued periodically both ways.
LineConfig periodic_line(const std::vector<double>& pattern, std::size_t periods) {
  LineConfig cfg;
  double x = 0;
  for (std::size_t k = 0; k < periods; ++k) {
    for (double g : pattern) {
      cfg.window.push_back(x);
      x += g;
    }
  }
  cfg.window.push_back(x);
  std::vector<double> out_left(pattern.rbegin(), pattern.rend());
  cfg.left_tail = TailModel::periodic(-out_left.front(), std::vector<double>(out_left.begin() + 1, out_left.end()));
  cfg.left_tail.pattern.push_back(out_left.front());
  cfg.right_tail = TailModel::periodic(x + pattern.front(), std::vector<double>(pattern.begin() + 1, pattern.end()));
  cfg.right_tail.pattern.push_back(pattern.front());
  cfg.derive_bounds();
  return cfg;
}

bool witnesses_non_equilibrium(const ResidualReport& rep, const Certificate& c) {
  const auto& px = rep.particles[c.x_index];
  const auto& py = rep.particles[c.y_index];
  return std::abs(px.net) > px.error_bound || std::abs(py.net) > py.error_bound;
}

// ---- 1. circle rigidity ----

Outcome circle_rigidity() {
  Checker ck;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_angle = 0, worst_residual = 0;
  std::size_t runs = 0;
  for (const auto& law : criterion_laws()) {
    for (std::size_t n = 2; n <= 16; ++n) {
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SolverOptions opts;
        opts.rng_seed = seed;
        opts.allow_unconverged = true;
        const auto r = solve_circle_equilibrium(n, law, std::nullopt, opts);
        const auto c = canonicalize_circle(r.config);
        double angle_err = 0;
        for (std::size_t i = 0; i < n; ++i) {
          angle_err = std::max(angle_err, std::abs(c.angles[i] - kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
        }
        const double residual = circle_residual_report(c, law).max_abs_net;
        worst_angle = std::max(worst_angle, angle_err);
        worst_residual = std::max(worst_residual, residual);
        const std::string tag = law.describe() + " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
        ck.expect(r.converged, tag + " not converged");
        ck.expect(angle_err < 1e-8, tag + " angle error " + fmt(angle_err));
        ck.expect(residual < 1e-10, tag + " residual " + fmt(residual));
        ++runs;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  ck.expect(elapsed < 60, "runtime " + fmt(elapsed) + " s");
  return ck.outcome(std::to_string(runs) + " runs, max angle error " + fmt(worst_angle) + ", max residual " +
                    fmt(worst_residual) + ", " + fmt(elapsed) + " s");
}

// ---- 2. extremal-gap soundness ----

Outcome extremal_gap_soundness() {
  Checker ck;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> gap(0.5, 2.0), arc(0.8, 1.2);
  std::size_t lines = 0, circles = 0;
  for (const auto& law : criterion_laws()) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> pattern(2 + trial % 4);
      for (double& g : pattern) g = gap(rng);
      const auto cfg = periodic_line(pattern, 3);
      const auto ext = extremal_gaps(cfg);
      const bool use_max = trial % 2 == 0;
      const auto& idx = use_max ? ext.max_indices : ext.min_indices;
      const auto best = use_max ? std::max_element(pattern.begin(), pattern.end())
                                : std::min_element(pattern.begin(), pattern.end());
      ck.expect(!idx.empty() && idx.front() % pattern.size() == static_cast<std::size_t>(best - pattern.begin()),
                "line extremum does not match the pattern");
      const auto c = certify_extremal_gap(cfg, law, idx.front());
      const std::string tag = law.describe() + " line " + std::to_string(trial);
      ck.expect(c.verdict == Verdict::pass, tag + " verdict " + to_string(c.verdict) + " (" + c.reason + ")");
      ck.expect(witnesses_non_equilibrium(residual_report(cfg, law), c), tag + " residual does not witness");
      ++lines;
    }
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 3 + static_cast<std::size_t>(trial % 10);
      std::vector<double> arcs(n);
      double total = 0;
      for (double& a : arcs) total += (a = arc(rng));
      CircleConfig cfg;
      double t = 0;
      for (double a : arcs) {
        cfg.angles.push_back(t);
        t += a * kTwoPi / total;
      }
      const auto ext = extremal_gaps(cfg);
      const bool use_max = trial % 2 == 0;
      const auto& idx = use_max ? ext.max_indices : ext.min_indices;
      ck.expect(idx.size() == 1, "circle extremum not unique");
      const auto c = certify_extremal_gap(cfg, law, idx.front());
      const std::string tag = law.describe() + " circle " + std::to_string(trial);
      ck.expect(c.verdict == Verdict::pass, tag + " verdict " + to_string(c.verdict) + " (" + c.reason + ")");
      ck.expect(witnesses_non_equilibrium(circle_residual_report(cfg, law), c), tag + " residual does not witness");
      ++circles;
    }
  }
  return ck.outcome(std::to_string(lines) + " periodic lines, " + std::to_string(circles) + " circles");
}

// ---- 3. trivial configurations ----

Outcome trivial_equilibrium() {
  Checker ck;
  double worst_bound = 0;
  std::size_t reports = 0;
  const std::vector<ForceLaw> laws = {ForceLaw::inverse_power(2), ForceLaw::inverse_power(3),
                                      ForceLaw::inverse_power(6), ForceLaw::inverse_power(2.5),
                                      ForceLaw::stretched_exp(1), ForceLaw::stretched_exp(2)};
  for (const auto& law : laws) {
    for (double g : {0.5, 1.0, 2.0}) {
      const auto cfg = LineConfig::trivial(g, 41, -20 * g);
      const auto rep = residual_report(cfg, law, 1e-13);
      for (const auto& p : rep.particles) {
        ck.expect(std::abs(p.net) <= p.error_bound, law.describe() + " g=" + fmt(g) + " particle " +
                                                         std::to_string(p.index) + " |net| " + fmt(std::abs(p.net)));
        ck.expect(p.error_bound <= 1e-12, law.describe() + " g=" + fmt(g) + " bound " + fmt(p.error_bound));
      }
      worst_bound = std::max(worst_bound, rep.max_error_bound);
      ++reports;
    }
  }
  return ck.outcome(std::to_string(reports) + " reports, max error bound " + fmt(worst_bound));
}

// ---- 4. sweep monotonicity ----

Outcome sweep_monotonicity() {
  Checker ck;
  SolverOptions opts;
  const double eps = 0.1;
  const auto seg = solve_pinned_segment({0}, {9}, 8, kCoulomb, opts);
  ck.expect(seg.config.window.size() == 10, "segment size");
  const auto original = seg.config.window;
  LineConfig cfg = seg.config;
  cfg.window.front() -= eps;
  cfg.c = cfg.C = 0;
  cfg.derive_bounds();
  double residual = 1;
  std::size_t sweeps = 0;
  while (sweeps < 200 && residual >= 1e-10) {
    const auto r = sweep_relax(cfg, seg.fixed_indices, kCoulomb, SweepDirection::left_to_right, opts);
    ++sweeps;
    for (std::size_t i = 1; i + 1 < original.size(); ++i) {
      const double d = r.config.window[i] - original[i];
      const std::string tag = "sweep " + std::to_string(sweeps) + " particle " + std::to_string(i);
      ck.expect(d >= -eps - opts.position_tol && d <= opts.position_tol, tag + " displacement " + fmt(d));
      ck.expect(r.config.window[i] <= cfg.window[i] + opts.position_tol, tag + " moved right");
    }
    cfg = r.config;
    cfg.c = cfg.C = 0;
    cfg.derive_bounds();
    residual = r.max_residual;
  }
  const double independent = [&] {
    const auto rep = residual_report(cfg, kCoulomb);
    double m = 0;
    for (std::size_t i = 1; i + 1 < cfg.window.size(); ++i) m = std::max(m, std::abs(rep.particles[i].net));
    return m;
  }();
  ck.expect(independent < 1e-10, "final residual " + fmt(independent));
  return ck.outcome(std::to_string(sweeps) + " sweeps, final residual " + fmt(independent));
}

// ---- 5. zero-centered targets ----

std::vector<ZeroCenteredResult> zero_centered_grid() {
  std::vector<ZeroCenteredResult> out;
  for (std::size_t n = 2; n <= 4; ++n) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double a = -2 + 1.5 * i / 4, b = 0.5 + 1.5 * j / 4;
        SolverOptions opts;
        opts.allow_unconverged = true;
        out.push_back(solve_zero_centered({a, b, n, kCoulomb}, opts));
      }
    }
  }
  return out;
}

Outcome zero_centered_targets() {
  Checker ck;
  double worst_target = 0, worst_residual = 0;
  const auto runs = zero_centered_grid();
  std::size_t k = 0;
  for (std::size_t n = 2; n <= 4; ++n) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j, ++k) {
        const double a = -2 + 1.5 * i / 4, b = 0.5 + 1.5 * j / 4;
        const auto& w = runs[k].config.window;
        const std::string tag = "n=" + std::to_string(n) + " a=" + fmt(a) + " b=" + fmt(b);
        if (w.size() != 2 * n + 1) {
          ck.expect(false, tag + " size");
          continue;
        }
        const double ea = std::abs(w[n - 1] - a), eb = std::abs(w[n + 1] - b);
        ck.expect(ea < 1e-8 && eb < 1e-8, tag + " target errors " + fmt(ea) + ", " + fmt(eb));
        ck.expect(w[n] == 0, tag + " x_0 moved");
        const auto rep = residual_report(runs[k].config, kCoulomb);
        for (const auto& p : rep.particles) {
          if (p.index == 0 || p.index == n || p.index == 2 * n) continue;
          ck.expect(std::abs(p.net) < 1e-8, tag + " residual " + fmt(p.net));
          worst_residual = std::max(worst_residual, std::abs(p.net));
        }
        worst_target = std::max({worst_target, ea, eb});
      }
    }
  }
  // Symmetric oracle: F(x - 1) = F(1) + F(2) + F(x + 1) for x = x_2.
  const auto F = [](double d) { return 1 / (d * d); };
  const double x2 = bisect([&](double x) { return F(x - 1) - F(1) - F(2) - F(x + 1); }, 1 + 1e-9, 100);
  const auto sym = solve_zero_centered({-1, 1, 2, kCoulomb}, SolverOptions{});
  const double oracle_err = std::max(std::abs(sym.config.window[4] - x2), std::abs(sym.config.window[0] + x2));
  ck.expect(oracle_err < 1e-10, "symmetric oracle error " + fmt(oracle_err));
  return ck.outcome("75 solves, max target error " + fmt(worst_target) + ", max residual " + fmt(worst_residual) +
                    ", oracle error " + fmt(oracle_err));
}

// ---- 6. extension gap bounds ----

LineConfig trivial_left_half(int count) {
  LineConfig s;
  for (int i = -count; i < 0; ++i) s.window.push_back(i);
  s.left_tail = TailModel::arithmetic(-count - 1, 1);
  s.derive_bounds();
  return s;
}

Outcome extension_gap_bounds() {
  Checker ck;
  std::ostringstream summary;
  for (double first : {1.0, 1.5, 2.0}) {
    SolverOptions opts;
    opts.allow_unconverged = first != 1.0;
    const auto r = extend_right(trivial_left_half(30), 1, 1, first - 1, kCoulomb, opts);
    const double lo = std::min(1.0, first), hi = std::max(1.0, first);
    double gmin = 1e300, gmax = 0;
    for (std::size_t i = 0; i + 1 < r.positions.size(); ++i) {
      const double g = r.positions[i + 1] - r.positions[i];
      gmin = std::min(gmin, g);
      gmax = std::max(gmax, g);
      ck.expect(g >= lo - 1e-8 && g <= hi + 1e-8, "gap " + fmt(g) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
      if (first == 1.0) ck.expect(std::abs(g - 1) < 1e-8, "trivial gap " + fmt(g));
    }
    ck.expect(r.positions.size() > 2, "empty extension");
    if (first == 1.0) ck.expect(r.converged, "trivial extension did not converge");
    summary << (first == 1.0 ? "" : "; ") << "first gap " << fmt(first) << ": " << r.positions.size() - 1
            << " gaps in [" << fmt(gmin) << ", " << fmt(gmax) << "]" << (r.converged ? "" : " (levels disagree)");
  }
  return ck.outcome(summary.str());
}

// ---- 7. uniqueness probe ----

Outcome uniqueness_probe() {
  Checker ck;
  double worst = 0;
  std::ostringstream summary;
  for (std::size_t m = 1; m <= 4; ++m) {
    ReconstructionProblem p;
    for (int i = 0; i <= 12; ++i) p.W.window.push_back(i);
    p.W.right_tail = TailModel::arithmetic(13, 1);
    p.W.derive_bounds();
    p.m = m;
    p.far_left_tail = TailModel::arithmetic(-static_cast<double>(m) - 1, 1);
    p.starts = 20;
    const auto r = reconstruct_left_tail(p, SolverOptions{});
    ck.expect(r.clusters.size() == 1, "m=" + std::to_string(m) + " clusters " + std::to_string(r.clusters.size()));
    ck.expect(r.converged_count == 20, "m=" + std::to_string(m) + " converged " + std::to_string(r.converged_count));
    for (const auto& run : r.runs) {
      if (!run.converged) continue;
      for (std::size_t k = 0; k < m; ++k) {
        const double e = std::abs(run.positions[k] + static_cast<double>(k + 1));
        worst = std::max(worst, e);
        ck.expect(e < 1e-6, "m=" + std::to_string(m) + " position error " + fmt(e));
      }
    }
    summary << (m == 1 ? "" : ", ") << "m=" << m << ": " << r.converged_count << "/20 in " << r.clusters.size()
            << " cluster";
  }
  summary << "; max position error " << fmt(worst);
  return ck.outcome(summary.str());
}

// ---- 8. Blaschke diagnostics ----

Outcome blaschke_diagnostics() {
  Checker ck;
  const std::size_t N = 100000;
  LineConfig W;
  W.window = {0};
  W.right_tail = TailModel::arithmetic(1, 1);
  W.c = W.C = 1;
  const auto s = blaschke_partial_sum(W, N, 0, false);
  long double h = 0;
  for (std::size_t k = N + 1; k >= 1; --k) h += 1.0L / static_cast<long double>(k);
  const double expected = static_cast<double>(2 * h);
  const double rel = std::abs(s.partial_sum - expected) / expected;
  ck.expect(rel < 1e-9, "integer lattice relative error " + fmt(rel));

  // Random uniformly discrete W from w_0 = 0 with gaps in [c, C].
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0, 1);
  std::size_t random_sets = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double c = 0.25 + 0.5 * unit(rng);
    const double C = c * (1 + 3 * unit(rng));
    std::uniform_real_distribution<double> gap(c, C);
    LineConfig R;
    R.window = {0};
    for (std::size_t k = 0; k < N; ++k) R.window.push_back(R.window.back() + gap(rng));
    R.c = c;
    R.C = C;
    for (std::size_t n : {10u, 1000u, 100000u}) {
      const auto b = blaschke_partial_sum(R, n, 0, false);
      ck.expect(b.dominates, "random W " + std::to_string(trial) + " N=" + std::to_string(n) + " does not dominate");
    }
    const double log_bound = 2 / C * (std::log(static_cast<double>(N)) - 1);
    ck.expect(blaschke_partial_sum(R, N, 0, false).partial_sum >= log_bound,
              "random W " + std::to_string(trial) + " below (2/C)(ln N - 1)");
    ++random_sets;
  }
  return ck.outcome("N=1e5 relative error " + fmt(rel) + ", " + std::to_string(random_sets) + " random sets dominate");
}

// ---- 9. oracle equivalence ----

struct TailEstimate {
  long double value = 0;
  double uncertainty = 0;
};

// Force from `terms` explicit tail particles plus a trapezoid remainder for
// the rest, per residue class of the period; the remainder is exact to
// within P |F'(d)| / 12.
TailEstimate explicit_tail(const ForceLaw& law, const TailModel& tail, double first_distance, std::size_t terms) {
  TailEstimate out;
  long double sum = 0, comp = 0;
  for (std::size_t j = 0; j < terms; ++j) {
    const long double y = static_cast<long double>(law.force(first_distance + tail.offset(j))) - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double P = tail.period();
  for (std::size_t r = 0; r < tail.period_length(); ++r) {
    std::size_t j = terms;
    while (j % tail.period_length() != r) ++j;
    const double d = first_distance + tail.offset(j);
    sum += law.potential(d) / P + law.force(d) / 2 - P * law.derivative(d) / 12;
    out.uncertainty += P * std::abs(law.derivative(d)) / 12;
  }
  out.value = sum;
  return out;
}

Outcome oracle_equivalence() {
  Checker ck;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> gap(0.5, 2.0);
  const auto laws = criterion_laws();
  double worst_finite = 0, worst_ratio = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto& law = laws[static_cast<std::size_t>(trial) % laws.size()];
    std::vector<double> xs = {gap(rng)};
    const int size = 3 + trial % 18;
    for (int k = 1; k < size; ++k) xs.push_back(xs.back() + gap(rng));
    const auto finite = LineConfig::finite_window(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double left = 0, right = 0;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (j < i) left += law.force(xs[i] - xs[j]);
        if (j > i) right += law.force(xs[j] - xs[i]);
      }
      const auto s = side_forces(finite, i, law);
      const double diff = std::abs(s.net - (left - right));
      worst_finite = std::max(worst_finite, diff);
      ck.expect(diff <= 1e-12, "finite trial " + std::to_string(trial) + " diff " + fmt(diff));
    }

    LineConfig tailed = finite;
    tailed.left_tail = TailModel::arithmetic(xs.front() - gap(rng), gap(rng));
    tailed.right_tail = TailModel::periodic(xs.back() + gap(rng), {gap(rng), gap(rng)});
    tailed.c = tailed.C = 0;
    tailed.derive_bounds();
    const std::size_t i = static_cast<std::size_t>(trial) % xs.size();
    const double x = xs[i];
    const auto s = side_forces(tailed, i, law, 1e-13);
    const auto lt = explicit_tail(law, tailed.left_tail, x - tailed.left_tail.start, 1'000'000);
    const auto rt = explicit_tail(law, tailed.right_tail, tailed.right_tail.start - x, 1'000'000);
    long double left = lt.value, right = rt.value;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j < i) left += law.force(x - xs[j]);
      if (j > i) right += law.force(xs[j] - x);
    }
    const double brute = static_cast<double>(left - right);
    const double diff = std::abs(s.net - brute);
    const double allowance = s.error_bound + lt.uncertainty + rt.uncertainty + kUnitRoundoff * std::abs(brute);
    worst_ratio = std::max(worst_ratio, diff / allowance);
    ck.expect(diff <= allowance, "tail trial " + std::to_string(trial) + " diff " + fmt(diff) + " > " + fmt(allowance));
  }
  return ck.outcome("max finite difference " + fmt(worst_finite) + ", max tail difference / error bound " +
                    fmt(worst_ratio));
}

// ---- 10. internal-force monotonicity ----

// Windows whose particles after the first are all in equilibrium.
void check_windows(Checker& ck, const LineConfig& cfg, const std::vector<bool>& balanced, const std::string& tag,
                   std::size_t& windows) {
  const std::size_t n = cfg.window.size();
  for (std::size_t first = 0; first + 1 < n; ++first) {
    for (std::size_t last = first + 1; last < n && balanced[last]; ++last) {
      const auto c = check_internal_force_monotonicity(cfg, kCoulomb, first, last - first + 1);
      ck.expect(c.verdict == Verdict::pass, tag + " window [" + std::to_string(first) + ", " + std::to_string(last) +
                                                "] " + to_string(c.verdict));
      ++windows;
    }
  }
}

Outcome internal_force_monotonicity() {
  Checker ck;
  std::size_t windows = 0, configs = 0;

  const auto seg = solve_pinned_segment({0}, {9}, 8, kCoulomb, SolverOptions{});
  std::vector<bool> balanced(seg.config.window.size(), true);
  balanced.front() = balanced.back() = false;
  check_windows(ck, seg.config, balanced, "pinned segment", windows);
  ++configs;

  const auto three = solve_pinned_segment({-1, 0}, {7, 8.5}, 5, kCoulomb, SolverOptions{});
  balanced.assign(three.config.window.size(), true);
  balanced[0] = balanced[1] = false;
  balanced[balanced.size() - 1] = balanced[balanced.size() - 2] = false;
  check_windows(ck, three.config, balanced, "two-pin segment", windows);
  ++configs;

  LineConfig relaxed = seg.config;
  relaxed.window.front() -= 0.1;
  for (std::size_t sweep = 0; sweep < 200; ++sweep) {
    const auto r = sweep_relax(relaxed, seg.fixed_indices, kCoulomb, SweepDirection::left_to_right, SolverOptions{});
    relaxed = r.config;
    if (r.max_residual < 1e-10) break;
  }
  relaxed.c = relaxed.C = 0;
  relaxed.derive_bounds();
  balanced.assign(relaxed.window.size(), true);
  balanced.front() = balanced.back() = false;
  check_windows(ck, relaxed, balanced, "relaxed segment", windows);
  ++configs;

  for (const auto& r : zero_centered_grid()) {
    const std::size_t n = (r.config.window.size() - 1) / 2;
    balanced.assign(r.config.window.size(), true);
    balanced[0] = balanced[n] = balanced[2 * n] = false;
    check_windows(ck, r.config, balanced, "zero-centered", windows);
    ++configs;
  }

  SolverOptions opts;
  const auto ext = extend_right(trivial_left_half(30), 1, 1, 0, kCoulomb, opts);
  balanced.assign(ext.config.window.size(), false);
  for (std::size_t i = 30; i + opts.schedule.guard < 30 + ext.positions.size(); ++i) balanced[i] = true;
  check_windows(ck, ext.config, balanced, "extension", windows);
  ++configs;

  const auto triple = check_internal_force_monotonicity(LineConfig::finite_window({0, 1, 10}), kCoulomb, 0, 3);
  ck.expect(triple.verdict == Verdict::fail, std::string("{0, 1, 10} verdict ") + to_string(triple.verdict));
  ck.expect(triple.violation && triple.violation->first == 1 && triple.violation->second == 2, "{0, 1, 10} violation pair");
  return ck.outcome(std::to_string(windows) + " windows of " + std::to_string(configs) +
                    " solver outputs pass; {0, 1, 10} fails at (1, 2)");
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"circle rigidity", circle_rigidity},
    {"extremal-gap soundness", extremal_gap_soundness},
    {"trivial-configuration equilibrium", trivial_equilibrium},
    {"sweep monotonicity", sweep_monotonicity},
    {"zero-centered targets", zero_centered_targets},
    {"extension gap bounds", extension_gap_bounds},
    {"uniqueness probe", uniqueness_probe},
    {"Blaschke diagnostics", blaschke_diagnostics},
    {"oracle equivalence", oracle_equivalence},
    {"internal-force monotonicity", internal_force_monotonicity},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  bool all = true;
  for (int i = 0; i < 10; ++i) {
    if (only && only != i + 1) continue;
    Outcome o;
    try {
      o = kCriteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("AC%-2d %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", kCriteria[i].name, o.detail.c_str());
    all &= o.pass;
  }
  return all ? 0 : 1;
}
