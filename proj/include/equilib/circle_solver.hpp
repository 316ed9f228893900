#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "equilib/config.hpp"
#include "equilib/errors.hpp"
#include "equilib/force_law.hpp"
#include "equilib/numeric.hpp"
#include "equilib/residuals.hpp"
#include "equilib/solver_options.hpp"

namespace equilib {

// Independent uniform angles, rejecting any closer than 1e-6 to an earlier
// one, sorted and rotated so the first sits at 0.
inline CircleConfig random_circle_config(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("circle: need n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<double> angles;
  while (angles.size() < n) {
    const double t = u(rng);
    bool ok = true;
    for (double s : angles) {
      const double d = std::abs(s - t);
      if (std::min(d, kTwoPi - d) < 1e-6) ok = false;
    }
    if (ok) angles.push_back(t);
  }
  return canonicalize_circle(CircleConfig::from_angles(std::move(angles)));
}

struct CircleSolveResult {
  CircleConfig config;
  ResidualReport report;
  double max_residual = 0;
  std::size_t iterations = 0;
  std::size_t locked_pairs = 0;
  bool converged = false;
};

namespace detail {

// Total pair energy on the circle, with particle 0 pinned at angle 0.
// Antipodal pairs are kinks of the energy; pairs that reach one are locked
// rigidly (q = p + pi) and released when the force needed to hold them
// exceeds F(pi).
class CircleDescent {
 public:
  CircleDescent(const ForceLaw& law, std::vector<double> theta)
      : law_(law), th_(std::move(theta)), n_(th_.size()), partner_(n_, -1), ban_(n_ * n_, 0) {}

  const std::vector<double>& angles() const { return th_; }
  std::size_t locked_pairs() const {
    std::size_t c = 0;
    for (std::size_t p = 0; p < n_; ++p) c += partner_[p] > static_cast<long>(p) ? 1 : 0;
    return c;
  }

  // Smooth forces (locked pairs and exact antipodes excluded) and the
  // Hessian of the smooth energy.
  void forces(const std::vector<double>& th, Eigen::VectorXd& f, Eigen::MatrixXd* H) const {
    const auto n = static_cast<Eigen::Index>(n_);
    f = Eigen::VectorXd::Zero(n);
    if (H) *H = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t p = 0; p < n_; ++p) {
      for (std::size_t q = p + 1; q < n_; ++q) {
        if (partner_[p] == static_cast<long>(q)) continue;
        const double delta = th[q] - th[p];
        if (std::abs(delta - std::numbers::pi) <= kAntipodalTolerance) continue;
        const bool short_direct = delta < std::numbers::pi;
        const double d = short_direct ? delta : kTwoPi - delta;
        const double s = short_direct ? law_.force(d) : -law_.force(d);
        const auto ip = static_cast<Eigen::Index>(p), iq = static_cast<Eigen::Index>(q);
        f[iq] += s;
        f[ip] -= s;
        if (H) {
          const double w = -law_.derivative(d);
          (*H)(ip, ip) += w;
          (*H)(iq, iq) += w;
          (*H)(ip, iq) -= w;
          (*H)(iq, ip) -= w;
        }
      }
    }
  }

  double energy(const std::vector<double>& th) const {
    CompensatedSum s;
    for (std::size_t p = 0; p < n_; ++p) {
      for (std::size_t q = p + 1; q < n_; ++q) {
        const double delta = th[q] - th[p];
        s.add(law_.potential(delta < std::numbers::pi ? delta : kTwoPi - delta));
      }
    }
    return s.value();
  }

  // Column of the reduced variable that moves particle p, or -1 if fixed.
  std::vector<long> variables(std::size_t* count) const {
    std::vector<long> var(n_, -1);
    long next = 0;
    for (std::size_t p = 1; p < n_; ++p) {
      const long mate = partner_[p];
      if (mate < 0) {
        var[p] = next++;
      } else if (mate > static_cast<long>(p)) {
        var[p] = next++;
        var[static_cast<std::size_t>(mate)] = var[p];
      } else if (mate == 0) {
        var[p] = -1;
      }
    }
    *count = static_cast<std::size_t>(next);
    return var;
  }

  Eigen::VectorXd reduced_gradient(const std::vector<double>& th, const std::vector<long>& var,
                                   std::size_t m) const {
    Eigen::VectorXd f;
    forces(th, f, nullptr);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t p = 0; p < n_; ++p) {
      if (var[p] >= 0) g[var[p]] -= f[static_cast<Eigen::Index>(p)];
    }
    return g;
  }

  // Releases locked pairs whose holding force exceeds F(pi). Returns true
  // if anything was released.
  bool release_violators(const Eigen::VectorXd& f, std::size_t iteration) {
    const double limit = law_.force(std::numbers::pi) * (1 + 1e-9);
    bool released = false;
    for (std::size_t p = 0; p < n_; ++p) {
      const long mate = partner_[p];
      if (mate <= static_cast<long>(p)) continue;
      const auto q = static_cast<std::size_t>(mate);
      const double hold = p == 0 ? std::abs(f[static_cast<Eigen::Index>(q)])
                                 : 0.5 * std::abs(f[static_cast<Eigen::Index>(p)] -
                                                  f[static_cast<Eigen::Index>(q)]);
      if (hold > limit) {
        partner_[p] = partner_[q] = -1;
        ban_[p * n_ + q] = iteration + 5;
        released = true;
      }
    }
    return released;
  }

  void lock(std::size_t p, std::size_t q) {
    partner_[p] = static_cast<long>(q);
    partner_[q] = static_cast<long>(p);
    snap(th_);
  }

  bool banned(std::size_t p, std::size_t q, std::size_t iteration) const { return ban_[p * n_ + q] > iteration; }
  bool locked(std::size_t p) const { return partner_[p] >= 0; }

  // Places every locked follower exactly half a turn from its leader.
  void snap(std::vector<double>& th) const {
    for (std::size_t p = 0; p < n_; ++p) {
      const long mate = partner_[p];
      if (mate > static_cast<long>(p)) th[static_cast<std::size_t>(mate)] = th[p] + std::numbers::pi;
    }
  }

  bool ordered(const std::vector<double>& th) const {
    if (th[0] != 0.0) return false;
    for (std::size_t p = 1; p < n_; ++p) {
      if (!(th[p] - th[p - 1] > law_.min_distance())) return false;
    }
    return kTwoPi - th[n_ - 1] > law_.min_distance();
  }

  void set_angles(std::vector<double> th) { th_ = std::move(th); }
  std::size_t size() const { return n_; }

 private:
  const ForceLaw& law_;
  std::vector<double> th_;
  std::size_t n_;
  std::vector<long> partner_;
  std::vector<std::size_t> ban_;
};

}  // namespace detail

// Equilibrium of n particles on the circle by descent on the total pair
// energy: damped Newton steps, falling back to gradient steps, with
// particle 0 pinned at angle 0.
inline CircleSolveResult solve_circle_equilibrium(std::size_t n, const ForceLaw& law,
                                                  const std::optional<CircleConfig>& init,
                                                  const SolverOptions& opts) {
  opts.validate();
  if (n < 2) throw InvalidInput("circle: need n >= 2");
  CircleConfig start = init ? *init : random_circle_config(n, opts.rng_seed);
  start.validate();
  if (start.size() != n) throw InvalidInput("circle: initial configuration has the wrong size");
  start = canonicalize_circle(start);

  detail::CircleDescent state(law, start.angles);
  const double grad_target = std::max(1e-14, 1e-3 * opts.residual_tol);
  CircleSolveResult out;
  std::size_t it = 0;
  for (; it < opts.max_outer_iters; ++it) {
    const auto& th = state.angles();
    Eigen::VectorXd f;
    Eigen::MatrixXd H;
    state.forces(th, f, &H);
    std::size_t m = 0;
    auto var = state.variables(&m);
    if (m == 0) break;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t p = 0; p < n; ++p) {
      if (var[p] >= 0) g[var[p]] -= f[static_cast<Eigen::Index>(p)];
    }
    const double gnorm = g.cwiseAbs().maxCoeff();
    if (state.release_violators(f, it)) continue;
    if (gnorm <= grad_target) break;

    Eigen::MatrixXd Hr = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t p = 0; p < n; ++p) {
      if (var[p] < 0) continue;
      for (std::size_t q = 0; q < n; ++q) {
        if (var[q] < 0) continue;
        Hr(var[p], var[q]) += H(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
      }
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::VectorXd dv;
      if (attempt == 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Hr);
        if (ldlt.info() != Eigen::Success) continue;
        dv = -ldlt.solve(g);
        if (!dv.allFinite() || g.dot(dv) >= 0) continue;
      } else {
        dv = -g;
      }
      std::vector<double> delta(n, 0.0);
      for (std::size_t p = 0; p < n; ++p) {
        if (var[p] >= 0) delta[p] = dv[var[p]];
      }
      // Keep every cyclic gap above a tenth of its size.
      double alpha = 1.0;
      for (std::size_t p = 0; p < n; ++p) {
        const std::size_t q = (p + 1) % n;
        const double gap = q == 0 ? kTwoPi - th[p] : th[q] - th[p];
        const double shrink = delta[p] - (q == 0 ? 0.0 : delta[q]);
        if (shrink > 0) alpha = std::min(alpha, 0.9 * gap / shrink);
      }
      // Stop at the first antipodal kink along the step.
      std::pair<std::size_t, std::size_t> kink{0, 0};
      bool at_kink = false;
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          if (state.locked(p) || state.locked(q) || state.banned(p, q, it)) continue;
          const double d0 = th[q] - th[p] - std::numbers::pi;
          const double rate = delta[q] - delta[p];
          if (rate == 0 || d0 == 0) continue;
          const double ac = -d0 / rate;
          if (ac > 0 && ac <= alpha) {
            alpha = ac;
            kink = {p, q};
            at_kink = true;
          }
        }
      }
      const double U0 = state.energy(th);
      const double slope = g.dot(dv);
      for (int ls = 0; ls < 60; ++ls, alpha /= 2) {
        std::vector<double> trial = th;
        for (std::size_t p = 1; p < n; ++p) trial[p] += alpha * delta[p];
        state.snap(trial);
        if (!state.ordered(trial)) {
          at_kink = false;
          continue;
        }
        double U1;
        try {
          U1 = state.energy(trial);
        } catch (const DomainError&) {
          at_kink = false;
          continue;
        }
        bool ok = U1 <= U0 + 1e-4 * alpha * slope;
        if (!ok) {
          const auto g1 = state.reduced_gradient(trial, var, m);
          ok = U1 <= U0 + 1e-12 * std::abs(U0) && g1.cwiseAbs().maxCoeff() < gnorm;
        }
        if (ok) {
          state.set_angles(std::move(trial));
          if (at_kink) state.lock(kink.first, kink.second);
          accepted = true;
          break;
        }
        at_kink = false;
      }
    }
    if (!accepted) break;
  }

  out.iterations = it;
  out.locked_pairs = state.locked_pairs();
  out.config.angles = state.angles();
  out.config = canonicalize_circle(out.config);
  out.report = circle_residual_report(out.config, law);
  out.max_residual = out.report.max_abs_net;
  out.converged = out.max_residual <= opts.residual_tol;
  if (!out.converged && !opts.allow_unconverged) {
    throw NoConvergence("circle descent did not reach the residual tolerance", out.max_residual);
  }
  return out;
}

}  // namespace equilib
