#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "equilib/config.hpp"
#include "equilib/errors.hpp"
#include "equilib/force_law.hpp"
#include "equilib/line_system.hpp"
#include "equilib/numeric.hpp"
#include "equilib/residuals.hpp"
#include "equilib/solver_options.hpp"
#include "equilib/tail_sum.hpp"

namespace equilib {

struct FieldValue {
  double value = 0;
  double error_bound = 0;
  // Sum of F(|p|) over the symmetric difference: bounds |f| on w >= 0.
  double magnitude_bound = 0;
};

namespace detail {

inline void check_left_set(const LineConfig& s, const char* name) {
  if (!s.right_tail.empty()) throw InvalidInput(std::string(name) + ": must not have a right tail");
  for (std::size_t i = 0; i < s.window.size(); ++i) {
    if (!(s.window[i] < 0)) throw InvalidInput(std::string(name) + ": positions must be negative");
    if (i > 0 && !(s.window[i] > s.window[i - 1])) {
      throw InvalidInput(std::string(name) + ": positions must be strictly increasing");
    }
  }
  validate_tail(s.left_tail, name);
  if (!s.left_tail.empty() && !s.window.empty() && !(s.left_tail.start < s.window.front())) {
    throw InvalidInput(std::string(name) + ": left tail overlaps the window");
  }
  if (!s.left_tail.empty() && !(s.left_tail.start < 0)) {
    throw InvalidInput(std::string(name) + ": positions must be negative");
  }
}

}  // namespace detail

// f(w) = sum over X of F(w - p) minus the same over Y, with points common
// to both windows (and identical tails) cancelled exactly.
inline FieldValue eval_difference_field(const LineConfig& X, const LineConfig& Y, double w, const ForceLaw& law,
                                        double tol = 1e-13) {
  detail::check_left_set(X, "X");
  detail::check_left_set(Y, "Y");
  if (!(w >= 0) || !std::isfinite(w)) throw InvalidInput("difference field: need finite w >= 0");
  std::vector<double> only_x, only_y;
  std::set_difference(X.window.begin(), X.window.end(), Y.window.begin(), Y.window.end(),
                      std::back_inserter(only_x));
  std::set_difference(Y.window.begin(), Y.window.end(), X.window.begin(), X.window.end(),
                      std::back_inserter(only_y));
  const bool tails_cancel = X.left_tail == Y.left_tail;

  auto side = [&](const std::vector<double>& pts, const TailModel& tail, double at, CompensatedSum& s,
                  double& err) {
    // Nearest points first.
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      const double d = at - *it;
      if (!(d > 0)) throw DomainError("difference field: w coincides with a particle");
      const double f = law.force(d);
      s.add(f);
      err += f * law.relative_error(d);
    }
    if (!tails_cancel && !tail.empty()) {
      const auto t = certified_tail_sum(law, tail, at - tail.start, tol);
      s.add(t.value);
      err += t.error;
    }
  };
  CompensatedSum sx, sy;
  double ex = 0, ey = 0;
  side(only_x, X.left_tail, w, sx, ex);
  side(only_y, Y.left_tail, w, sy, ey);
  FieldValue out;
  out.value = sx.value() - sy.value();
  out.error_bound = round_up(ex + ey + sx.rounding_bound() + sy.rounding_bound() +
                                 kUnitRoundoff * std::abs(out.value),
                             2);
  CompensatedSum mx, my;
  double slack = 0;
  side(only_x, X.left_tail, 0.0, mx, slack);
  side(only_y, Y.left_tail, 0.0, my, slack);
  out.magnitude_bound = round_up(mx.value() + my.value() + slack + mx.rounding_bound() + my.rounding_bound(), 2);
  return out;
}

// Maps the closed right half line onto [-1, 1): 1 -> 0, 0 -> -1.
inline double mobius_map(double w) {
  if (!(w >= 0)) throw InvalidInput("mobius map: need w >= 0");
  if (std::isinf(w)) return 1;
  return (w - 1) / (w + 1);
}

inline double mobius_inverse(double z) {
  if (!(z >= -1) || !(z < 1)) throw InvalidInput("mobius inverse: need -1 <= z < 1");
  return (1 + z) / (1 - z);
}

struct BlaschkeRow {
  std::size_t n = 0;
  double w = 0;
  double z = 0;
  double one_minus_z = 0;
  double cumulative = 0;
};

struct BlaschkeSummary {
  std::size_t N = 0;
  double C = 0;
  // Sum over n = 0..N of 1 - z_n = 2 / (1 + w_n).
  double partial_sum = 0;
  // Sum over n = 0..N of 1 - |z_n|; differs from partial_sum only for w_n < 1.
  double abs_partial_sum = 0;
  // Sum over n = 0..N of 2 / (1 + C n).
  double lower_bound_sum = 0;
  bool dominates = false;
  std::vector<BlaschkeRow> rows;
};

// Observed position w_n: window first, then the right tail.
inline double observed_position(const LineConfig& W, std::size_t n) {
  if (n < W.window.size()) return W.window[n];
  if (W.right_tail.empty()) throw InvalidInput("observed configuration has fewer particles than requested");
  return W.right_tail.start + W.right_tail.offset(n - W.window.size());
}

inline BlaschkeSummary blaschke_partial_sum(const LineConfig& W, std::size_t N, double C = 0, bool keep_rows = true) {
  if (W.window.empty()) throw InvalidInput("blaschke: empty configuration");
  if (!(W.window.front() >= 0)) throw InvalidInput("blaschke: observed positions must be >= 0");
  if (!(C > 0)) C = W.C;
  if (!(C > 0) || !std::isfinite(C)) throw InvalidInput("blaschke: C unknown");
  BlaschkeSummary out;
  out.N = N;
  out.C = C;
  CompensatedSum sum, abs_sum, lower;
  if (keep_rows) out.rows.reserve(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const double w = observed_position(W, n);
    const double z = mobius_map(w);
    const double omz = 2 / (1 + w);
    sum.add(omz);
    abs_sum.add(1 - std::abs(z));
    lower.add(2 / (1 + C * static_cast<double>(n)));
    if (keep_rows) out.rows.push_back({n, w, z, omz, sum.value()});
  }
  out.partial_sum = sum.value();
  out.abs_partial_sum = abs_sum.value();
  out.lower_bound_sum = lower.value();
  // Equality holds for W = {0, C, 2C, ...}; allow for the rounding of both sums.
  out.dominates = out.partial_sum >= out.lower_bound_sum * (1 - 1e-12);
  return out;
}

struct ReconstructionProblem {
  LineConfig W;              // observed window (w_0 >= 0) and its right tail
  std::size_t m = 1;         // unknown left particles
  TailModel far_left_tail;   // known particles beyond the unknowns
  ForceLaw law = ForceLaw::inverse_power(2);
  std::size_t starts = 20;
  // Balance equations at w_0 .. w_{equations-1}; 0 means m + 2, capped by
  // the window size.
  std::size_t equations = 0;
};

struct ReconstructionRun {
  std::vector<double> start;      // x_{-1}, x_{-2}, ... as initialised
  std::vector<double> positions;  // x_{-1}, x_{-2}, ... at termination
  double residual = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::string status;
  long cluster = -1;
};

struct ReconstructionCluster {
  std::vector<double> center;
  std::vector<std::size_t> members;
  double residual = 0;
};

struct ReconstructionResult {
  std::size_t m = 0;
  std::size_t equations = 0;
  std::vector<ReconstructionRun> runs;
  std::vector<ReconstructionCluster> clusters;
  std::size_t converged_count = 0;
};

namespace detail {

// Unknowns u_1 > u_2 > ... > u_m below min(0, w_0). Without a far tail:
// u_1 = top - e^{s_1}, u_{k+1} = u_k - e^{s_{k+1}}. With a far tail
// starting at T: the m + 1 segments between top and T are (top - T) times
// softmax(0, s_1, ..., s_m).
class LeftParams {
 public:
  LeftParams(std::size_t m, double top, const TailModel& far) : m_(m), top_(top), bounded_(!far.empty()) {
    if (bounded_) span_ = top - far.start;
  }

  std::vector<double> positions(const Eigen::VectorXd& s) const {
    std::vector<double> u(m_);
    const auto e = segments(s);
    double x = top_;
    for (std::size_t k = 0; k < m_; ++k) {
      x -= e[k];
      u[k] = x;
    }
    return u;
  }

  // du_k / ds_l.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& s) const {
    const auto em = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(em, em);
    const auto e = segments(s);
    if (!bounded_) {
      for (Eigen::Index k = 0; k < em; ++k) {
        for (Eigen::Index l = 0; l <= k; ++l) J(k, l) = -e[static_cast<std::size_t>(l)];
      }
      return J;
    }
    // de_i/ds_l = e_i (delta_il - p_l), p = e / span, l >= 1 in segment
    // numbering; column l - 1 of J.
    for (Eigen::Index k = 0; k < em; ++k) {
      for (Eigen::Index l = 1; l <= em; ++l) {
        const double pl = e[static_cast<std::size_t>(l)] / span_;
        double d = 0;
        for (Eigen::Index i = 0; i <= k; ++i) {
          d += e[static_cast<std::size_t>(i)] * ((i == l ? 1.0 : 0.0) - pl);
        }
        J(k, l - 1) = -d;
      }
    }
    return J;
  }

  Eigen::VectorXd from_positions(const std::vector<double>& u) const {
    Eigen::VectorXd s(static_cast<Eigen::Index>(m_));
    std::vector<double> e;
    double prev = top_;
    for (double x : u) {
      e.push_back(prev - x);
      prev = x;
    }
    if (!bounded_) {
      for (std::size_t k = 0; k < m_; ++k) s[static_cast<Eigen::Index>(k)] = std::log(e[k]);
      return s;
    }
    e.push_back(prev - (top_ - span_));
    for (std::size_t k = 1; k <= m_; ++k) s[static_cast<Eigen::Index>(k - 1)] = std::log(e[k] / e[0]);
    return s;
  }

 private:
  std::vector<double> segments(const Eigen::VectorXd& s) const {
    std::vector<double> e;
    if (!bounded_) {
      for (Eigen::Index k = 0; k < s.size(); ++k) e.push_back(std::exp(s[k]));
      return e;
    }
    double mx = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) mx = std::max(mx, s[k]);
    std::vector<double> ex{std::exp(-mx)};
    double total = ex[0];
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      ex.push_back(std::exp(s[k] - mx));
      total += ex.back();
    }
    for (double v : ex) e.push_back(span_ * v / total);
    return e;
  }

  std::size_t m_;
  double top_;
  bool bounded_;
  double span_ = 0;
};

inline LineConfig assemble(const ReconstructionProblem& p, const std::vector<double>& u) {
  LineConfig cfg;
  cfg.window.assign(u.rbegin(), u.rend());
  cfg.window.insert(cfg.window.end(), p.W.window.begin(), p.W.window.end());
  cfg.left_tail = p.far_left_tail;
  cfg.right_tail = p.W.right_tail;
  return cfg;
}

struct BalanceFunctor : Eigen::DenseFunctor<double> {
  BalanceFunctor(const ReconstructionProblem& p, const LeftParams& params, std::size_t equations)
      : Eigen::DenseFunctor<double>(static_cast<int>(p.m), static_cast<int>(equations)),
        problem(p),
        map(params),
        eqs(equations) {}

  int operator()(const InputType& s, ValueType& f) const {
    ++evaluations;
    const auto u = map.positions(s);
    const auto cfg = assemble(problem, u);
    if (!ordered(cfg)) {
      f.setConstant(1e6);
      return 0;
    }
    LineSystem sys(cfg, std::vector<bool>(cfg.window.size(), true), problem.law);
    for (std::size_t j = 0; j < eqs; ++j) f[static_cast<Eigen::Index>(j)] = sys.net_force(problem.m + j);
    return 0;
  }

  int df(const InputType& s, JacobianType& J) const {
    const auto u = map.positions(s);
    // d net(w_j) / d u_k = -F'(w_j - u_k): the unknowns sit on the left.
    Eigen::MatrixXd Ju(static_cast<Eigen::Index>(eqs), static_cast<Eigen::Index>(problem.m));
    for (std::size_t j = 0; j < eqs; ++j) {
      const double w = problem.W.window[j];
      for (std::size_t k = 0; k < problem.m; ++k) {
        const double d = w - u[k];
        Ju(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = d > 0 ? -problem.law.derivative(d) : 0.0;
      }
    }
    J = Ju * map.jacobian(s);
    return 0;
  }

  static bool ordered(const LineConfig& cfg) {
    for (std::size_t i = 1; i < cfg.window.size(); ++i) {
      if (!(cfg.window[i] > cfg.window[i - 1])) return false;
    }
    if (!cfg.left_tail.empty() && !(cfg.window.front() > cfg.left_tail.start)) return false;
    return true;
  }

  const ReconstructionProblem& problem;
  const LeftParams& map;
  std::size_t eqs;
  mutable std::size_t evaluations = 0;
};

}  // namespace detail

// Multistart least squares for the m unknown left particles that balance
// the first observed particles. Starts are arithmetic continuations of the
// observed window with independently drawn gaps; converged results are
// clustered with radius opts.position_tol.
inline ReconstructionResult reconstruct_left_tail(const ReconstructionProblem& problem, const SolverOptions& opts) {
  opts.validate();
  const auto& W = problem.W;
  if (W.window.empty()) throw InvalidInput("reconstruct: observed window is empty");
  if (!(W.window.front() >= 0)) throw InvalidInput("reconstruct: observed positions must be >= 0");
  for (std::size_t i = 1; i < W.window.size(); ++i) {
    if (!(W.window[i] > W.window[i - 1])) throw InvalidInput("reconstruct: observed window must increase");
  }
  validate_tail(W.right_tail, "right");
  validate_tail(problem.far_left_tail, "far left");
  if (problem.m == 0) throw InvalidInput("reconstruct: need m >= 1");
  if (problem.starts == 0) throw InvalidInput("reconstruct: need at least one start");
  const std::size_t eqs = problem.equations > 0 ? problem.equations : std::min(problem.m + 2, W.window.size());
  if (eqs > W.window.size()) throw InvalidInput("reconstruct: more equations than observed window particles");
  if (eqs < problem.m) throw InsufficientEquations("reconstruct: fewer balance equations than unknowns");
  const double top = std::min(0.0, W.window.front());
  if (!problem.far_left_tail.empty() && !(problem.far_left_tail.start < top)) {
    throw InvalidInput("reconstruct: far left tail must start below the unknowns");
  }

  LineConfig observed = W;
  observed.derive_bounds();
  const double c = observed.c, C = observed.C;

  ReconstructionResult out;
  out.m = problem.m;
  out.equations = eqs;
  detail::LeftParams params(problem.m, top, problem.far_left_tail);
  std::mt19937_64 rng(opts.rng_seed);
  std::uniform_real_distribution<double> gap_draw(0.75 * c, 1.25 * C);

  for (std::size_t st = 0; st < problem.starts; ++st) {
    ReconstructionRun run;
    std::vector<double> g(problem.m);
    for (double& v : g) v = gap_draw(rng);
    if (!problem.far_left_tail.empty()) {
      double total = 0;
      for (double v : g) total += v;
      const double room = top - problem.far_left_tail.start;
      const double cap = room * static_cast<double>(problem.m) / static_cast<double>(problem.m + 1);
      if (total >= cap) {
        for (double& v : g) v *= cap / total;
      }
    }
    double x = top;
    for (double v : g) {
      x -= v;
      run.start.push_back(x);
    }

    detail::BalanceFunctor functor(problem, params, eqs);
    Eigen::LevenbergMarquardt<detail::BalanceFunctor> lm(functor);
    lm.setMaxfev(static_cast<Eigen::Index>(100 * opts.max_outer_iters));
    lm.setXtol(1e-15);
    lm.setFtol(1e-30);
    lm.setGtol(0);
    Eigen::VectorXd s = params.from_positions(run.start);
    lm.minimize(s);
    run.positions = params.positions(s);
    run.evaluations = functor.evaluations;

    const auto cfg = detail::assemble(problem, run.positions);
    if (detail::BalanceFunctor::ordered(cfg)) {
      LineConfig checked = cfg;
      checked.derive_bounds();
      double worst = 0;
      for (std::size_t j = 0; j < eqs; ++j) {
        worst = std::max(worst, std::abs(side_forces(checked, problem.m + j, problem.law).net));
      }
      run.residual = worst;
      run.converged = worst <= opts.residual_tol;
    } else {
      run.residual = std::numeric_limits<double>::infinity();
    }
    run.status = run.converged ? "converged" : "no_convergence";
    if (run.converged) ++out.converged_count;
    out.runs.push_back(std::move(run));
  }

  for (std::size_t r = 0; r < out.runs.size(); ++r) {
    auto& run = out.runs[r];
    if (!run.converged) continue;
    for (std::size_t k = 0; k < out.clusters.size() && run.cluster < 0; ++k) {
      double diff = 0;
      for (std::size_t i = 0; i < problem.m; ++i) {
        diff = std::max(diff, std::abs(out.clusters[k].center[i] - run.positions[i]));
      }
      if (diff <= opts.position_tol) {
        run.cluster = static_cast<long>(k);
        out.clusters[k].members.push_back(r);
        out.clusters[k].residual = std::max(out.clusters[k].residual, run.residual);
      }
    }
    if (run.cluster < 0) {
      run.cluster = static_cast<long>(out.clusters.size());
      out.clusters.push_back({run.positions, {r}, run.residual});
    }
  }
  return out;
}

}  // namespace equilib
