#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "equilib/config.hpp"
#include "equilib/errors.hpp"
#include "equilib/force_law.hpp"
#include "equilib/numeric.hpp"
#include "equilib/tail_sum.hpp"

namespace equilib {

// A line configuration in which some window particles are fixed and the
// rest move. Forces on movers include the tails (estimated, not certified).
class LineSystem {
 public:
  LineSystem(LineConfig cfg, std::vector<bool> fixed, ForceLaw law, double tail_tol = 1e-15)
      : cfg_(std::move(cfg)), fixed_(std::move(fixed)), law_(std::move(law)), tail_tol_(tail_tol) {
    if (fixed_.size() != cfg_.window.size()) throw InvalidInput("fixed mask does not match window");
    for (std::size_t i = 0; i < fixed_.size(); ++i) {
      if (!fixed_[i]) free_.push_back(i);
    }
  }

  const LineConfig& config() const { return cfg_; }
  const ForceLaw& law() const { return law_; }
  const std::vector<double>& positions() const { return cfg_.window; }
  const std::vector<std::size_t>& free_indices() const { return free_; }
  bool is_fixed(std::size_t i) const { return fixed_[i]; }
  bool has_tails() const { return !cfg_.finite(); }
  void set_position(std::size_t i, double x) { cfg_.window[i] = x; }

  // Net force on particle i if it sat at x, all others frozen.
  double force_at(std::size_t i, double x) const {
    const auto& w = cfg_.window;
    CompensatedSum s;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j == i) continue;
      if (w[j] < x) {
        s.add(law_.force(x - w[j]));
      } else {
        s.add(-law_.force(w[j] - x));
      }
    }
    if (!cfg_.left_tail.empty()) {
      s.add(estimate_tail_sum(law_, cfg_.left_tail, x - cfg_.left_tail.start, tail_tol_).value);
    }
    if (!cfg_.right_tail.empty()) {
      s.add(-estimate_tail_sum(law_, cfg_.right_tail, cfg_.right_tail.start - x, tail_tol_).value);
    }
    return s.value();
  }

  double net_force(std::size_t i) const { return force_at(i, cfg_.window[i]); }

  Eigen::VectorXd free_forces() const {
    Eigen::VectorXd f(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) f[static_cast<Eigen::Index>(k)] = net_force(free_[k]);
    return f;
  }

  double max_free_residual() const {
    double m = 0;
    for (std::size_t i : free_) m = std::max(m, std::abs(net_force(i)));
    return m;
  }

  struct Placement {
    double old_position;
    double new_position;
    bool bracketed;
    int iterations;
  };

  // Moves particle i to the root of its own net force inside the open
  // interval between its neighbours (shrunk by a relative margin).
  Placement place(std::size_t i, double position_tol) {
    const auto& w = cfg_.window;
    if (fixed_[i]) throw InvalidInput("place: particle is fixed");
    double lo, hi;
    if (i > 0) {
      lo = w[i - 1];
    } else if (!cfg_.left_tail.empty()) {
      lo = cfg_.left_tail.start;
    } else {
      throw InvalidInput("place: free particle without a left neighbour");
    }
    if (i + 1 < w.size()) {
      hi = w[i + 1];
    } else if (!cfg_.right_tail.empty()) {
      hi = cfg_.right_tail.start;
    } else {
      throw InvalidInput("place: free particle without a right neighbour");
    }
    if (!(hi > lo)) throw DomainError("place: coincident neighbours");
    const double margin = std::max(1e-9 * (hi - lo), law_.min_distance());
    const double a = lo + margin, b = hi - margin;
    if (!(b > a)) throw DomainError("place: neighbours too close for the law's support");
    const auto r = bisect_decreasing([&](double x) { return force_at(i, x); }, a, b, 200, position_tol);
    Placement p{w[i], r.root, r.bracketed, r.iterations};
    cfg_.window[i] = r.root;
    return p;
  }

  // -dF/dx over free particles: symmetric positive definite.
  Eigen::MatrixXd stiffness() const {
    const auto& w = cfg_.window;
    const auto m = static_cast<Eigen::Index>(free_.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
    std::vector<long> slot(w.size(), -1);
    for (std::size_t k = 0; k < free_.size(); ++k) slot[free_[k]] = static_cast<long>(k);
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const std::size_t i = free_[k];
      const auto kk = static_cast<Eigen::Index>(k);
      double diag = 0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (j == i) continue;
        const double fp = law_.derivative(std::abs(w[i] - w[j]));
        diag -= fp;
        if (slot[j] >= 0) K(kk, slot[j]) += fp;
      }
      if (!cfg_.left_tail.empty()) {
        diag -= estimate_tail_sum(law_, cfg_.left_tail, w[i] - cfg_.left_tail.start, tail_tol_).slope;
      }
      if (!cfg_.right_tail.empty()) {
        diag -= estimate_tail_sum(law_, cfg_.right_tail, cfg_.right_tail.start - w[i], tail_tol_).slope;
      }
      K(kk, kk) += diag;
    }
    return K;
  }

  // Energy of all pairs with at least one free particle (finite systems).
  double energy() const {
    if (has_tails()) throw InvalidInput("energy: undefined with tails");
    const auto& w = cfg_.window;
    CompensatedSum s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        if (fixed_[i] && fixed_[j]) continue;
        s.add(law_.potential(w[j] - w[i]));
      }
    }
    return s.value();
  }

  // One damped Newton step on the free forces. Merit is the energy for
  // finite systems and half the squared force norm otherwise. Returns false
  // when no acceptable step was found.
  bool newton_step() {
    const Eigen::VectorXd f = free_forces();
    if (f.size() == 0) return false;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(stiffness());
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd dx = ldlt.solve(f);
    if (!dx.allFinite()) return false;

    const bool use_energy = !has_tails();
    const double f0 = f.cwiseAbs().maxCoeff();
    double m0 = 0;
    try {
      m0 = use_energy ? energy() : 0.5 * f.squaredNorm();
    } catch (const DomainError&) {
      return false;
    }
    const double slope = use_energy ? -f.dot(dx) : -f.squaredNorm();

    double alpha = std::min(1.0, max_step(dx));
    const std::vector<double> saved = cfg_.window;
    for (int attempt = 0; attempt < 40 && alpha > 1e-9; ++attempt, alpha /= 2) {
      for (std::size_t k = 0; k < free_.size(); ++k) {
        cfg_.window[free_[k]] = saved[free_[k]] + alpha * dx[static_cast<Eigen::Index>(k)];
      }
      if (!ordered()) continue;
      try {
        const Eigen::VectorXd f1 = free_forces();
        const double m1 = use_energy ? energy() : 0.5 * f1.squaredNorm();
        if (m1 <= m0 + 1e-4 * alpha * slope || f1.cwiseAbs().maxCoeff() < f0) return true;
      } catch (const DomainError&) {
      }
    }
    cfg_.window = saved;
    return false;
  }

 private:
  // Largest step keeping every gap at least a tenth of its current size.
  double max_step(const Eigen::VectorXd& dx) const {
    const auto& w = cfg_.window;
    std::vector<double> move(w.size(), 0.0);
    for (std::size_t k = 0; k < free_.size(); ++k) move[free_[k]] = dx[static_cast<Eigen::Index>(k)];
    double alpha = std::numeric_limits<double>::infinity();
    auto limit = [&](double gap, double shrink) {
      if (shrink > 0) alpha = std::min(alpha, 0.9 * gap / shrink);
    };
    for (std::size_t i = 1; i < w.size(); ++i) limit(w[i] - w[i - 1], move[i - 1] - move[i]);
    if (!cfg_.left_tail.empty()) limit(w.front() - cfg_.left_tail.start, -move.front());
    if (!cfg_.right_tail.empty()) limit(cfg_.right_tail.start - w.back(), move.back());
    return alpha;
  }

  bool ordered() const {
    const auto& w = cfg_.window;
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (!(w[i] - w[i - 1] > law_.min_distance())) return false;
    }
    if (!cfg_.left_tail.empty() && !(w.front() > cfg_.left_tail.start)) return false;
    if (!cfg_.right_tail.empty() && !(w.back() < cfg_.right_tail.start)) return false;
    return true;
  }

  LineConfig cfg_;
  std::vector<bool> fixed_;
  ForceLaw law_;
  double tail_tol_;
  std::vector<std::size_t> free_;
};

}  // namespace equilib
