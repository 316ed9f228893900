#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "equilib/config.hpp"
#include "equilib/errors.hpp"
#include "equilib/force_law.hpp"
#include "equilib/numeric.hpp"
#include "equilib/residuals.hpp"

namespace equilib {

enum class CertificateKind { extremal_gap_line, extremal_gap_circle, monotone_internal_forces, gap_ratio, periodic_tail };
enum class Verdict { pass, fail, inconclusive, inapplicable };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::extremal_gap_line: return "extremal_gap_line";
    case CertificateKind::extremal_gap_circle: return "extremal_gap_circle";
    case CertificateKind::monotone_internal_forces: return "monotone_internal_forces";
    case CertificateKind::gap_ratio: return "gap_ratio";
    case CertificateKind::periodic_tail: return "periodic_tail";
  }
  return "";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::inapplicable: return "inapplicable";
  }
  return "";
}

// One re-checkable comparison. For termwise rows lhs and rhs are pair
// forces at the recorded distances; for tail_domination rows they are the
// distances themselves; for summand_count rows they are counts.
struct EvidenceRow {
  std::string kind;
  std::string side;
  std::size_t term = 0;
  std::string lhs_label;
  std::string rhs_label;
  double lhs_distance = 0;
  double rhs_distance = 0;
  double lhs = 0;
  double lhs_error = 0;
  double rhs = 0;
  double rhs_error = 0;
  std::string relation;
  bool holds = false;
};

struct Certificate {
  CertificateKind kind = CertificateKind::extremal_gap_line;
  Verdict verdict = Verdict::inapplicable;
  std::string reason;
  std::vector<EvidenceRow> evidence;
  std::vector<std::string> conclusions;

  // Extremal-gap certificates. x and y are window (or circle) indices in
  // the caller's orientation; `mirrored` means left and right were swapped
  // so that x has the strictly smaller (larger) neighbouring gap.
  std::string extremum;
  std::size_t gap_index = 0;
  std::size_t x_index = 0;
  std::size_t y_index = 0;
  bool mirrored = false;
  double margin = 0;

  // Internal-force monotonicity.
  std::size_t first = 0;
  std::vector<double> internal_forces;
  std::optional<std::pair<std::size_t, std::size_t>> violation;
};

namespace detail {

struct Comparison {
  bool holds;
  bool violated;
};

inline Comparison compare(double lhs, double le, double rhs, double re, const std::string& rel) {
  const double lo_l = lhs - le, hi_l = lhs + le, lo_r = rhs - re, hi_r = rhs + re;
  if (rel == "<") return {hi_l < lo_r, lo_l >= hi_r};
  if (rel == ">") return {lo_l > hi_r, hi_l <= lo_r};
  if (rel == "<=") {
    const bool v = lo_l > hi_r;
    return {!v, v};
  }
  const bool v = hi_l < lo_r;
  return {!v, v};
}

inline bool apply(EvidenceRow& row) {
  const auto c = compare(row.lhs, row.lhs_error, row.rhs, row.rhs_error, row.relation);
  row.holds = c.holds;
  return c.violated;
}

// Force at a distance computed from two positions of magnitude `scale`,
// with a bound covering evaluation and the rounding of the distance.
inline std::pair<double, double> force_with_error(const ForceLaw& law, double d, double scale) {
  const double f = law.force(d);
  const double err = f * law.relative_error(d) + std::abs(law.derivative(d)) * 2 * kUnitRoundoff * scale;
  return {f, round_up(err, 2)};
}

struct PairedSums {
  std::vector<double> a;  // distances of x's summands, in pairing order
  std::vector<double> b;  // distances of y's summands
  std::vector<std::string> a_labels;
  std::vector<std::string> b_labels;
  std::vector<double> scale;
};

struct ChainOutcome {
  bool violated = false;
  bool strict_holds = true;
  double margin = 0;
  double sum_a = 0, sum_a_err = 0, sum_b = 0, sum_b_err = 0;
};

// Termwise rows b_i (rel) a_i; the first row is strict when `strict_first`.
inline ChainOutcome paired_rows(const ForceLaw& law, const PairedSums& s, const std::string& side,
                                const std::string& strict_rel, const std::string& weak_rel, bool strict_first,
                                std::vector<EvidenceRow>& rows) {
  ChainOutcome out;
  const std::size_t m = std::min(s.a.size(), s.b.size());
  CompensatedSum sa, sb;
  for (std::size_t i = 0; i < m; ++i) {
    EvidenceRow r;
    r.kind = "termwise";
    r.side = side;
    r.term = i + 1;
    r.lhs_label = s.b_labels[i];
    r.rhs_label = s.a_labels[i];
    r.lhs_distance = s.b[i];
    r.rhs_distance = s.a[i];
    std::tie(r.lhs, r.lhs_error) = force_with_error(law, s.b[i], s.scale[i]);
    std::tie(r.rhs, r.rhs_error) = force_with_error(law, s.a[i], s.scale[i]);
    const bool strict = strict_first && i == 0;
    r.relation = strict ? strict_rel : weak_rel;
    out.violated |= apply(r);
    if (strict) {
      out.strict_holds = r.holds;
      out.margin = std::abs(r.rhs - r.lhs);
    }
    rows.push_back(r);
  }
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    const auto [f, e] = force_with_error(law, s.a[i], s.scale[i]);
    sa.add(f);
    out.sum_a_err += e;
  }
  for (std::size_t i = 0; i < s.b.size(); ++i) {
    const auto [f, e] = force_with_error(law, s.b[i], s.scale[i]);
    sb.add(f);
    out.sum_b_err += e;
  }
  out.sum_a = sa.value();
  out.sum_b = sb.value();
  out.sum_a_err = round_up(out.sum_a_err + sa.rounding_bound(), 2);
  out.sum_b_err = round_up(out.sum_b_err + sb.rounding_bound(), 2);
  return out;
}

inline EvidenceRow sum_row(const std::string& side, const std::string& lhs_label, double lhs, double le,
                           const std::string& rhs_label, double rhs, double re, const std::string& rel) {
  EvidenceRow r;
  r.kind = "sum";
  r.side = side;
  r.lhs_label = lhs_label;
  r.rhs_label = rhs_label;
  r.lhs = lhs;
  r.lhs_error = le;
  r.rhs = rhs;
  r.rhs_error = re;
  r.relation = rel;
  apply(r);
  return r;
}

inline LineConfig reflect(const LineConfig& cfg) {
  LineConfig m;
  for (auto it = cfg.window.rbegin(); it != cfg.window.rend(); ++it) m.window.push_back(-*it);
  m.left_tail = cfg.right_tail;
  m.right_tail = cfg.left_tail;
  if (!m.left_tail.empty()) m.left_tail.start = -cfg.right_tail.start;
  if (!m.right_tail.empty()) m.right_tail.start = -cfg.left_tail.start;
  m.c = cfg.c;
  m.C = cfg.C;
  return m;
}

struct Relations {
  std::string left_strict, left_weak, right_weak;
};

inline Relations relations_for(bool maximal) {
  if (maximal) return {"<", "<=", ">="};
  return {">", ">=", "<="};
}

inline void finish(Certificate& cert, const ChainOutcome& left, const ChainOutcome& right, bool extra_violation) {
  if (left.violated || right.violated || extra_violation) {
    cert.verdict = Verdict::fail;
    cert.reason = "a comparison of the chain is violated";
  } else if (!left.strict_holds) {
    cert.verdict = Verdict::inconclusive;
    cert.reason = "strict comparison yx vs xw_1 is within rounding error";
  } else {
    cert.verdict = Verdict::pass;
  }
  cert.margin = left.margin;
  if (cert.verdict == Verdict::pass) {
    const bool mx = cert.extremum == "max";
    cert.conclusions.push_back(mx ? "F-(y) < F-(x)" : "F-(y) > F-(x)");
    cert.conclusions.push_back(mx ? "F+(y) >= F+(x)" : "F+(y) <= F+(x)");
    cert.conclusions.push_back(mx ? "net(y) < net(x): x and y are not both in equilibrium"
                                  : "net(y) > net(x): x and y are not both in equilibrium");
  }
}

inline Certificate inapplicable(CertificateKind kind, std::size_t gap_index, std::string reason) {
  Certificate c;
  c.kind = kind;
  c.verdict = Verdict::inapplicable;
  c.gap_index = gap_index;
  c.reason = std::move(reason);
  return c;
}

}  // namespace detail

// Certificate that the window gap [window[g], window[g+1]] cannot be an
// extremal gap of an equilibrium: pairs the summands of F-(x), F-(y) and of
// F+(x), F+(y) term by term. Needs infinite tails on both sides; the
// summands beyond the explicit rows are covered by one tail_domination row.
inline Certificate certify_extremal_gap(const LineConfig& config, const ForceLaw& law, std::size_t gap_index) {
  const auto kind = CertificateKind::extremal_gap_line;
  config.validate();
  if (gap_index + 1 >= config.window.size()) throw InvalidInput("certify: gap index outside window");
  if (config.left_tail.empty() || config.right_tail.empty()) {
    return detail::inapplicable(kind, gap_index, "termwise pairing needs infinite tails on both sides");
  }
  const auto all = config.all_gaps();
  const auto w = config.window;
  const double gap = w[gap_index + 1] - w[gap_index];
  const double gmax = *std::max_element(all.begin(), all.end());
  const double gmin = *std::min_element(all.begin(), all.end());
  // Gaps closer than `slack` are indistinguishable after rounding.
  const double reach = std::max({std::abs(w.front()), std::abs(w.back()),
                                 std::abs(config.left_tail.start) + 2 * config.left_tail.period(),
                                 std::abs(config.right_tail.start) + 2 * config.right_tail.period()});
  const double slack = 8 * kUnitRoundoff * reach;
  if (gmax - gmin <= slack) return detail::inapplicable(kind, gap_index, "all gaps are equal");
  const bool maximal = gap >= gmax - slack;
  if (!maximal && gap > gmin + slack) return detail::inapplicable(kind, gap_index, "gap is not extremal");

  const double left_nb = gap_index > 0 ? w[gap_index] - w[gap_index - 1] : w.front() - config.left_tail.start;
  const double right_nb =
      gap_index + 2 < w.size() ? w[gap_index + 2] - w[gap_index + 1] : config.right_tail.start - w.back();
  auto strictly_beyond = [&](double nb) {
    const double m = std::max(slack, 1e-12 * gap);
    return maximal ? nb < gap - m : nb > gap + m;
  };
  bool mirrored = false;
  if (!strictly_beyond(left_nb)) {
    if (!strictly_beyond(right_nb)) {
      return detail::inapplicable(kind, gap_index,
                                  maximal ? "no adjacent gap is strictly smaller" : "no adjacent gap is strictly larger");
    }
    mirrored = true;
  }

  const LineConfig cfg = mirrored ? detail::reflect(config) : config;
  const std::size_t g = mirrored ? w.size() - 2 - gap_index : gap_index;
  const auto& v = cfg.window;
  const double x = v[g], y = v[g + 1];

  Certificate cert;
  cert.kind = kind;
  cert.extremum = maximal ? "max" : "min";
  cert.gap_index = gap_index;
  cert.mirrored = mirrored;
  cert.x_index = mirrored ? w.size() - 1 - g : g;
  cert.y_index = mirrored ? w.size() - 2 - g : g + 1;
  const auto rel = detail::relations_for(maximal);

  // Left side: x's summands xw_1, xw_2, ...; y's summands yx, yw_1, ...
  detail::PairedSums left;
  {
    std::vector<double> ws;
    for (std::size_t j = g; j-- > 0;) ws.push_back(v[j]);
    const auto& t = cfg.left_tail;
    const std::size_t extra = 2 * t.period_length();
    for (std::size_t k = 0; k < extra; ++k) ws.push_back(t.start - t.offset(k));
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const std::string wi = "w_" + std::to_string(i + 1);
      left.a.push_back(x - ws[i]);
      left.a_labels.push_back("x" + wi);
      left.b.push_back(i == 0 ? y - x : y - ws[i - 1]);
      left.b_labels.push_back(i == 0 ? "yx" : "yw_" + std::to_string(i));
      left.scale.push_back(4 * reach);
    }
  }
  // Right side: x's summands xy, xz_1, ...; y's summands yz_1, yz_2, ...
  detail::PairedSums right;
  {
    std::vector<double> zs;
    for (std::size_t j = g + 2; j < v.size(); ++j) zs.push_back(v[j]);
    const auto& t = cfg.right_tail;
    const std::size_t extra = 2 * t.period_length();
    for (std::size_t k = 0; k < extra; ++k) zs.push_back(t.start + t.offset(k));
    for (std::size_t i = 0; i < zs.size(); ++i) {
      right.b.push_back(zs[i] - y);
      right.b_labels.push_back("yz_" + std::to_string(i + 1));
      right.a.push_back(i == 0 ? y - x : zs[i - 1] - x);
      right.a_labels.push_back(i == 0 ? "xy" : "xz_" + std::to_string(i));
      right.scale.push_back(4 * reach);
    }
  }
  const auto lo = detail::paired_rows(law, left, "left", rel.left_strict, rel.left_weak, true, cert.evidence);
  const auto ro = detail::paired_rows(law, right, "right", "", rel.right_weak, false, cert.evidence);

  // Beyond the explicit rows every comparison reduces to a tail gap against
  // the gap xy.
  bool dominated_violation = false;
  for (const auto* t : {&cfg.left_tail, &cfg.right_tail}) {
    EvidenceRow r;
    r.kind = "tail_domination";
    r.side = t == &cfg.left_tail ? "left" : "right";
    r.lhs_label = maximal ? "max tail gap" : "min tail gap";
    r.rhs_label = "xy";
    r.lhs = r.lhs_distance = maximal ? t->max_gap() : t->min_gap();
    r.rhs = r.rhs_distance = gap;
    r.lhs_error = r.rhs_error = slack;
    r.relation = maximal ? "<=" : ">=";
    dominated_violation |= detail::apply(r);
    cert.evidence.push_back(r);
  }

  const auto sx = side_forces(cfg, g, law);
  const auto sy = side_forces(cfg, g + 1, law);
  cert.evidence.push_back(detail::sum_row("left", "F-(y)", sy.f_minus, sy.error_bound, "F-(x)", sx.f_minus,
                                          sx.error_bound, rel.left_strict));
  cert.evidence.push_back(detail::sum_row("right", "F+(y)", sy.f_plus, sy.error_bound, "F+(x)", sx.f_plus,
                                          sx.error_bound, rel.right_weak));
  cert.evidence.push_back(
      detail::sum_row("net", "net(y)", sy.net, sy.error_bound, "net(x)", sx.net, sx.error_bound, rel.left_strict));
  detail::finish(cert, lo, ro, dominated_violation);
  return cert;
}

// Circle analogue: F-(p) sums over the open half circle on p's left. Arc
// g runs counterclockwise from particle g to particle g+1.
inline Certificate certify_extremal_gap(const CircleConfig& config, const ForceLaw& law, std::size_t gap_index) {
  const auto kind = CertificateKind::extremal_gap_circle;
  config.validate();
  const std::size_t n = config.size();
  if (gap_index >= n) throw InvalidInput("certify: arc index outside configuration");
  const auto arcs = gaps(config);
  const double gap = arcs[gap_index];
  const double gmax = *std::max_element(arcs.begin(), arcs.end());
  const double gmin = *std::min_element(arcs.begin(), arcs.end());
  const double slack = 8 * kUnitRoundoff * kTwoPi;
  if (gmax - gmin <= slack) return detail::inapplicable(kind, gap_index, "all gaps are equal");
  const bool maximal = gap >= gmax - slack;
  if (!maximal && gap > gmin + slack) return detail::inapplicable(kind, gap_index, "gap is not extremal");
  if (!(gap < std::numbers::pi - kAntipodalTolerance)) {
    return detail::inapplicable(kind, gap_index, "arc spans at least a half circle");
  }
  auto strictly_beyond = [&](double nb) {
    const double m = std::max(slack, 1e-12 * gap);
    return maximal ? nb < gap - m : nb > gap + m;
  };
  bool mirrored = false;
  if (!strictly_beyond(arcs[(gap_index + n - 1) % n])) {
    if (!strictly_beyond(arcs[(gap_index + 1) % n])) {
      return detail::inapplicable(kind, gap_index,
                                  maximal ? "no adjacent gap is strictly smaller" : "no adjacent gap is strictly larger");
    }
    mirrored = true;
  }

  const auto& th = config.angles;
  auto ccw = [&](std::size_t p, std::size_t q) {
    const double a = th[q] - th[p];
    return a > 0 ? a : a + kTwoPi;
  };
  // Distance from p to q travelling towards p's left (clockwise unless
  // mirrored), and towards its right.
  auto to_left = [&](std::size_t p, std::size_t q) { return mirrored ? ccw(p, q) : ccw(q, p); };
  auto to_right = [&](std::size_t p, std::size_t q) { return mirrored ? ccw(q, p) : ccw(p, q); };
  const std::size_t xi = mirrored ? (gap_index + 1) % n : gap_index;
  const std::size_t yi = mirrored ? gap_index : (gap_index + 1) % n;

  Certificate cert;
  cert.kind = kind;
  cert.extremum = maximal ? "max" : "min";
  cert.gap_index = gap_index;
  cert.mirrored = mirrored;
  cert.x_index = xi;
  cert.y_index = yi;
  const auto rel = detail::relations_for(maximal);
  const double half = std::numbers::pi - kAntipodalTolerance;

  // Particles of the open half circle on p's side, nearest first.
  auto half_circle = [&](std::size_t p, bool left_side) {
    std::vector<std::pair<double, std::size_t>> out;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == p) continue;
      const double d = left_side ? to_left(p, q) : to_right(p, q);
      if (d < half) out.push_back({d, q});
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto label_of = [&](std::size_t q, bool left_side) {
    if (q == xi) return std::string("x");
    if (q == yi) return std::string("y");
    // w_k is k steps to x's left, z_k is k steps to y's right.
    const std::size_t steps = left_side ? (mirrored ? (q + n - xi) % n : (xi + n - q) % n)
                                        : (mirrored ? (yi + n - q) % n : (q + n - yi) % n);
    return std::string(left_side ? "w_" : "z_") + std::to_string(steps);
  };

  detail::PairedSums left, right;
  for (const auto& [d, q] : half_circle(xi, true)) {
    left.a.push_back(d);
    left.a_labels.push_back("x" + label_of(q, true));
  }
  for (const auto& [d, q] : half_circle(yi, true)) {
    left.b.push_back(d);
    left.b_labels.push_back("y" + label_of(q, true));
  }
  for (const auto& [d, q] : half_circle(xi, false)) {
    right.a.push_back(d);
    right.a_labels.push_back("x" + label_of(q, false));
  }
  for (const auto& [d, q] : half_circle(yi, false)) {
    right.b.push_back(d);
    right.b_labels.push_back("y" + label_of(q, false));
  }
  left.scale.assign(std::max(left.a.size(), left.b.size()), 2 * kTwoPi);
  right.scale.assign(std::max(right.a.size(), right.b.size()), 2 * kTwoPi);

  const auto lo = detail::paired_rows(law, left, "left", rel.left_strict, rel.left_weak, true, cert.evidence);
  const auto ro = detail::paired_rows(law, right, "right", "", rel.right_weak, false, cert.evidence);

  // The side claimed larger must have at least as many summands.
  bool count_violation = false;
  for (const auto* s : {&left, &right}) {
    EvidenceRow r;
    r.kind = "summand_count";
    r.side = s == &left ? "left" : "right";
    r.lhs_label = s == &left ? "#F-(y)" : "#F+(y)";
    r.rhs_label = s == &left ? "#F-(x)" : "#F+(x)";
    r.lhs = static_cast<double>(s->b.size());
    r.rhs = static_cast<double>(s->a.size());
    r.relation = s == &left ? rel.left_weak : rel.right_weak;
    count_violation |= detail::apply(r);
    cert.evidence.push_back(r);
  }

  cert.evidence.push_back(detail::sum_row("left", "F-(y)", lo.sum_b, lo.sum_b_err, "F-(x)", lo.sum_a, lo.sum_a_err,
                                          rel.left_strict));
  cert.evidence.push_back(detail::sum_row("right", "F+(y)", ro.sum_b, ro.sum_b_err, "F+(x)", ro.sum_a, ro.sum_a_err,
                                          rel.right_weak));
  cert.evidence.push_back(detail::sum_row("net", "net(y)", lo.sum_b - ro.sum_b, lo.sum_b_err + ro.sum_b_err, "net(x)",
                                          lo.sum_a - ro.sum_a, lo.sum_a_err + ro.sum_a_err, rel.left_strict));
  detail::finish(cert, lo, ro, count_violation);
  return cert;
}

// Signed net forces on window[first .. first+count-1] from those particles
// only; passes iff they are nondecreasing left to right.
inline Certificate check_internal_force_monotonicity(const LineConfig& config, const ForceLaw& law, std::size_t first,
                                                     std::size_t count) {
  if (count < 2 || first + count > config.window.size()) {
    throw InvalidInput("monotonicity: window range must select at least 2 particles of the window");
  }
  Certificate cert;
  cert.kind = CertificateKind::monotone_internal_forces;
  cert.first = first;
  const auto& w = config.window;
  std::vector<double> err(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    CompensatedSum s;
    double e = 0;
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      const double a = w[first + i], b = w[first + j];
      const auto [f, fe] = detail::force_with_error(law, std::abs(a - b), std::abs(a) + std::abs(b));
      s.add(b < a ? f : -f);
      e += fe;
    }
    cert.internal_forces.push_back(s.value());
    err[i] = round_up(e + s.rounding_bound(), 2);
  }
  cert.verdict = Verdict::pass;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    EvidenceRow r;
    r.kind = "adjacent_pair";
    r.term = first + i;
    r.lhs_label = "f_" + std::to_string(first + i);
    r.rhs_label = "f_" + std::to_string(first + i + 1);
    r.lhs = cert.internal_forces[i];
    r.lhs_error = err[i];
    r.rhs = cert.internal_forces[i + 1];
    r.rhs_error = err[i + 1];
    r.relation = "<=";
    const bool violated = detail::apply(r);
    if (violated && !cert.violation) {
      cert.violation = std::make_pair(first + i, first + i + 1);
      cert.verdict = Verdict::fail;
      cert.reason = "internal forces decrease between particles " + std::to_string(first + i) + " and " +
                    std::to_string(first + i + 1);
    }
    cert.evidence.push_back(r);
  }
  if (cert.verdict == Verdict::pass) cert.conclusions.push_back("internal forces are nondecreasing");
  return cert;
}

struct GapRatioReport {
  double max_ratio = 1;
  std::size_t numerator_gap = 0;
  std::size_t denominator_gap = 0;
};

// Largest ratio between consecutive window gaps, in either orientation.
inline GapRatioReport gap_ratio_report(const LineConfig& config) {
  if (config.window.size() < 3) throw InvalidInput("gap ratio: need at least 3 particles");
  const auto g = gaps(config);
  GapRatioReport out;
  out.max_ratio = 0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    for (const auto& [num, den] : {std::pair{i, i + 1}, std::pair{i + 1, i}}) {
      const double r = g[num] / g[den];
      if (r > out.max_ratio) {
        out.max_ratio = r;
        out.numerator_gap = num;
        out.denominator_gap = den;
      }
    }
  }
  return out;
}

enum class Side { left, right };

struct PeriodicTail {
  std::size_t period = 0;
  // Gaps of one period, listed outward from the window interior.
  std::vector<double> pattern;
  // Tail model continuing the window periodically on that side.
  TailModel continuation;
};

// Smallest p <= max_period such that the outermost 2p window gaps on `side`
// repeat with period p within `tol`.
inline std::optional<PeriodicTail> detect_periodic_tail(const LineConfig& config, Side side, std::size_t max_period,
                                                        double tol) {
  if (max_period == 0) throw InvalidInput("detect period: max_period must be positive");
  auto g = gaps(config);
  if (g.size() < 3 * max_period) throw InvalidInput("detect period: window has fewer than 3 * max_period gaps");
  // Outward order: index 0 is the outermost gap.
  if (side == Side::right) std::reverse(g.begin(), g.end());
  for (std::size_t p = 1; p <= max_period; ++p) {
    bool ok = true;
    for (std::size_t i = 0; i < p && ok; ++i) ok = std::abs(g[i] - g[i + p]) <= tol;
    if (!ok) continue;
    PeriodicTail out;
    out.period = p;
    for (std::size_t i = p; i-- > 0;) out.pattern.push_back(g[i]);
    // The continuation repeats the pattern from its first gap outward.
    std::vector<double> cont(out.pattern.begin() + 1, out.pattern.end());
    cont.push_back(out.pattern.front());
    if (side == Side::right) {
      out.continuation = TailModel::periodic(config.window.back() + out.pattern.front(), cont);
    } else {
      out.continuation = TailModel::periodic(config.window.front() - out.pattern.front(), cont);
    }
    if (p == 1) out.continuation.kind = TailModel::Kind::arithmetic;
    return out;
  }
  return std::nullopt;
}

}  // namespace equilib
