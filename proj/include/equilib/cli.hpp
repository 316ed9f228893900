#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "equilib/certificates.hpp"
#include "equilib/circle_solver.hpp"
#include "equilib/diagnostics.hpp"
#include "equilib/io.hpp"
#include "equilib/line_solvers.hpp"
#include "equilib/residuals.hpp"
#include "equilib/svg.hpp"

namespace equilib::cli {

using io::json;

enum ExitCode : int { kOk = 0, kInternal = 1, kValidation = 2, kNoConvergence = 3 };

enum class LogLevel { error, info, debug };

inline LogLevel log_level_from_env() {
  const char* v = std::getenv("EQUILIB_LOG");
  if (!v || !*v) return LogLevel::error;
  const std::string s = v;
  if (s == "error") return LogLevel::error;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  throw InvalidInput("EQUILIB_LOG: expected error, info or debug, got '" + s + "'");
}

class Logger {
 public:
  Logger(LogLevel level, std::ostream& sink) : level_(level), sink_(sink) {}
  void info(const std::string& msg) const { emit(LogLevel::info, "info", msg); }
  void debug(const std::string& msg) const { emit(LogLevel::debug, "debug", msg); }
  void error(const std::string& msg) const { emit(LogLevel::error, "error", msg); }

 private:
  void emit(LogLevel at, const char* tag, const std::string& msg) const {
    if (static_cast<int>(at) <= static_cast<int>(level_)) sink_ << "[" << tag << "] " << msg << '\n';
  }
  LogLevel level_;
  std::ostream& sink_;
};

// Everything a task hands back for serialization.
struct TaskOutput {
  json output = json::object();
  bool converged = true;
  std::size_t iterations = 0;
  std::string csv;
  std::optional<io::AnyConfig> plot_config;
  std::optional<ResidualReport> plot_report;
  std::string table;
};

struct Flags {
  std::string problem, out, csv, svg, law;
  std::optional<std::uint64_t> seed, n;
  std::optional<double> tol, a, b;
  bool table = false;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("io_error", "failed writing '" + path + "'");
}

inline const json& param(const io::Problem& p, const std::string& key) {
  return io::require(p.params, key, "params");
}

inline bool has_param(const io::Problem& p, const std::string& key) {
  return p.params.contains(key) && !p.params[key].is_null();
}

inline double number_param(const io::Problem& p, const std::string& key) {
  return io::as_number(param(p, key), "params." + key);
}

inline std::size_t count_param(const io::Problem& p, const std::string& key) {
  return io::as_count(param(p, key), "params." + key);
}

inline std::size_t count_param_or(const io::Problem& p, const std::string& key, std::size_t fallback) {
  return io::count_or(p.params, key, fallback, "params");
}

// Solvers report instead of throwing; the exit code carries convergence.
inline SolverOptions run_options(const io::Problem& p) {
  SolverOptions o = p.options;
  o.allow_unconverged = true;
  return o;
}

inline json report_json(const LineConfig& cfg, const ResidualReport& r) {
  return {{"config", io::to_json(cfg)}, {"residual_report", io::to_json(r)}};
}

inline std::string table_of(const Certificate& c) {
  std::ostringstream os;
  os << "certificate: " << to_string(c.kind) << "\nverdict:     " << to_string(c.verdict) << '\n';
  if (!c.reason.empty()) os << "reason:      " << c.reason << '\n';
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %-6s %5s  %-14s %23s %-2s %-14s %23s  %s\n", "kind", "side", "term", "lhs",
                "value", "", "rhs", "value", "holds");
  os << buf;
  for (const auto& e : c.evidence) {
    std::snprintf(buf, sizeof buf, "%-16s %-6s %5zu  %-14s %23.16e %-2s %-14s %23.16e  %s\n", e.kind.c_str(),
                  e.side.c_str(), e.term, e.lhs_label.c_str(), e.lhs, e.relation.c_str(), e.rhs_label.c_str(), e.rhs,
                  e.holds ? "yes" : "no");
    os << buf;
  }
  for (const auto& s : c.conclusions) os << "=> " << s << '\n';
  return os.str();
}

inline std::size_t default_gap(const io::AnyConfig& cfg) {
  const auto ex = std::visit([](const auto& c) { return extremal_gaps(c); }, cfg);
  const auto g = std::visit([](const auto& c) { return gaps(c); }, cfg);
  const bool cyclic = std::holds_alternative<CircleConfig>(cfg);
  auto strict_one = [&](const std::vector<std::size_t>& idx, bool maximal) -> std::optional<std::size_t> {
    for (auto i : idx) {
      const std::size_t n = g.size();
      const bool has_l = i > 0 || cyclic, has_r = i + 1 < n || cyclic;
      const double l = has_l ? g[(i + n - 1) % n] : g[i], r = has_r ? g[(i + 1) % n] : g[i];
      if (maximal ? (l < g[i] || r < g[i]) : (l > g[i] || r > g[i])) return i;
    }
    return std::nullopt;
  };
  if (ex.max_strict) {
    if (auto i = strict_one(ex.max_indices, true)) return *i;
  }
  if (ex.min_strict) {
    if (auto i = strict_one(ex.min_indices, false)) return *i;
  }
  return 0;
}

// ---- tasks ----

inline TaskOutput solve_circle(const io::Problem& p, const Logger& log) {
  const auto& law = io::require_law(p);
  std::optional<CircleConfig> init;
  if (p.config) {
    if (!std::holds_alternative<CircleConfig>(*p.config)) throw InvalidInput("config: expected a circle configuration");
    init = std::get<CircleConfig>(*p.config);
  }
  std::size_t n = 0;
  if (has_param(p, "n")) {
    n = count_param(p, "n");
  } else if (init) {
    n = init->size();
  } else {
    throw InvalidInput("params.n: required");
  }
  log.info("solve-circle: n=" + std::to_string(n) + " law=" + law.describe());
  const auto r = solve_circle_equilibrium(n, law, init, run_options(p));
  TaskOutput t;
  const auto canon = canonicalize_circle(r.config);
  t.output = {{"config", io::to_json(canon)},
              {"residual_report", io::to_json(r.report)},
              {"max_residual", io::number(r.max_residual)},
              {"locked_pairs", r.locked_pairs}};
  t.converged = r.converged;
  t.iterations = r.iterations;
  t.csv = io::positions_csv(canon.angles, "angle");
  t.plot_config = canon;
  t.plot_report = circle_residual_report(canon, law);
  return t;
}

inline TaskOutput solve_segment(const io::Problem& p, const Logger& log) {
  const auto& law = io::require_law(p);
  const auto left = io::as_numbers(param(p, "fixed_left"), "params.fixed_left");
  const auto right = io::as_numbers(param(p, "fixed_right"), "params.fixed_right");
  const auto n = count_param(p, "n_interior");
  log.info("solve-segment: n_interior=" + std::to_string(n));
  const auto r = solve_pinned_segment(left, right, n, law, run_options(p));
  TaskOutput t;
  t.output = report_json(r.config, r.report);
  t.output["interior"] = io::numbers(r.interior);
  t.output["fixed_indices"] = r.fixed_indices;
  t.output["max_residual"] = io::number(r.max_residual);
  t.output["newton_steps"] = r.newton_steps;
  t.converged = r.converged;
  t.iterations = r.sweeps;
  t.csv = io::positions_csv(r.config.window, "position");
  t.plot_config = r.config;
  t.plot_report = r.report;
  return t;
}

inline TaskOutput relax(const io::Problem& p, const Logger& log) {
  const auto& law = io::require_law(p);
  LineConfig cfg = io::require_line(p);
  const auto opts = run_options(p);
  std::vector<std::size_t> fixed = {0, cfg.window.size() - 1};
  if (has_param(p, "fixed")) fixed = io::as_counts(param(p, "fixed"), "params.fixed");
  const auto dir_name = io::string_or(p.params, "direction", "left-to-right", "params");
  SweepDirection dir;
  if (dir_name == "left-to-right") {
    dir = SweepDirection::left_to_right;
  } else if (dir_name == "right-to-left") {
    dir = SweepDirection::right_to_left;
  } else {
    throw InvalidInput("params.direction: expected left-to-right or right-to-left");
  }
  const std::size_t max_sweeps = count_param_or(p, "sweeps", opts.max_sweeps);
  if (max_sweeps == 0) throw InvalidInput("params.sweeps: must be positive");
  const auto original = cfg.window;
  json history = json::array();
  std::vector<std::size_t> flagged;
  double residual = 0;
  std::size_t done = 0;
  while (done < max_sweeps) {
    const auto s = sweep_relax(cfg, fixed, law, dir, opts);
    ++done;
    cfg = s.config;
    residual = s.max_residual;
    flagged = s.flagged;
    std::vector<double> offset(cfg.window.size());
    for (std::size_t i = 0; i < offset.size(); ++i) offset[i] = cfg.window[i] - original[i];
    history.push_back({{"sweep", done},
                       {"max_move", io::number(s.max_move)},
                       {"max_residual", io::number(s.max_residual)},
                       {"displacement", io::numbers(offset)}});
    log.debug("relax: sweep " + std::to_string(done) + " residual " + io::format_number(residual));
    if (residual <= opts.residual_tol || s.max_move <= opts.position_tol) break;
  }
  cfg.c = cfg.C = 0;
  cfg.derive_bounds();
  const auto report = residual_report(cfg, law);
  TaskOutput t;
  t.output = report_json(cfg, report);
  t.output["fixed_indices"] = fixed;
  t.output["direction"] = dir_name;
  t.output["sweeps"] = history;
  t.output["flagged"] = flagged;
  t.output["max_residual"] = io::number(residual);
  t.converged = residual <= opts.residual_tol;
  t.iterations = done;
  t.csv = io::positions_csv(cfg.window, "position");
  t.plot_config = cfg;
  t.plot_report = report;
  return t;
}

inline TaskOutput zero_centered(const io::Problem& p, const Logger& log) {
  ZeroCenteredProblem zp;
  zp.law = io::require_law(p);
  zp.a = number_param(p, "a");
  zp.b = number_param(p, "b");
  zp.n = count_param(p, "n");
  log.info("zero-centered: n=" + std::to_string(zp.n));
  const auto r = solve_zero_centered(zp, run_options(p));
  TaskOutput t;
  t.output = report_json(r.config, r.report);
  t.output["max_residual"] = io::number(r.max_residual);
  t.output["left_error"] = io::number(r.left_error);
  t.output["right_error"] = io::number(r.right_error);
  t.output["left_bound"] = io::number(r.left_bound);
  t.output["right_bound"] = io::number(r.right_bound);
  t.output["inner_solves"] = r.inner_solves;
  t.converged = r.converged;
  t.iterations = r.outer_iterations;
  t.csv = io::positions_csv(r.config.window, "position");
  t.plot_config = r.config;
  t.plot_report = r.report;
  return t;
}

inline json extension_json(const ExtensionResult& r) {
  return {{"positions", io::numbers(r.positions)},
          {"gaps", io::numbers(r.gaps)},
          {"gap_lower", io::number(r.gap_lower)},
          {"gap_upper", io::number(r.gap_upper)},
          {"gaps_within_bounds", r.gaps_within_bounds},
          {"continuation_gap", io::number(r.continuation_gap)},
          {"level", r.level},
          {"levels", r.levels},
          {"level_disagreement", io::number(r.level_disagreement)},
          {"level_residual", io::number(r.level_residual)},
          {"guarded_residual", io::number(r.guarded_residual)},
          {"shooting_evaluations", r.shooting_evaluations},
          {"converged", r.converged}};
}

inline TaskOutput extend(const io::Problem& p, const Logger& log) {
  const auto& law = io::require_law(p);
  const auto& s_minus = io::require_line(p);
  const double x0 = number_param(p, "x0");
  const double b_gap = io::number_or(p.params, "b_gap", s_minus.c, "params");
  const double B_gap = io::number_or(p.params, "B_gap", s_minus.C, "params");
  const std::size_t starts = count_param_or(p, "starts", 1);
  if (starts == 0) throw InvalidInput("params.starts: must be positive");
  TaskOutput t;
  if (starts == 1) {
    log.info("extend: single run");
    const auto r = extend_right(s_minus, b_gap, B_gap, x0, law, run_options(p));
    t.output = extension_json(r);
    t.output["config"] = io::to_json(r.config);
    t.output["residual_report"] = io::to_json(r.report);
    t.converged = r.converged;
    t.iterations = r.levels.size();
    t.csv = io::positions_csv(r.positions, "position");
    t.plot_config = r.config;
    t.plot_report = r.report;
    return t;
  }
  log.info("extend: " + std::to_string(starts) + " starts");
  const auto m = extend_right_multistart(s_minus, b_gap, B_gap, x0, law, run_options(p), starts);
  json runs = json::array();
  for (std::size_t i = 0; i < m.runs.size(); ++i) {
    auto j = extension_json(m.runs[i]);
    j["cluster"] = m.runs[i].converged ? json(m.cluster_of[i]) : json(nullptr);
    runs.push_back(j);
  }
  t.output = {{"runs", runs}, {"clusters", m.clusters}, {"converged_count", m.converged_count}, {"starts", starts}};
  t.converged = m.converged_count > 0;
  t.iterations = starts;
  io::CsvWriter w({"run", "index", "position"});
  for (std::size_t i = 0; i < m.runs.size(); ++i) {
    for (std::size_t k = 0; k < m.runs[i].positions.size(); ++k) w.row(i, k, m.runs[i].positions[k]);
  }
  t.csv = w.str();
  if (!m.runs.empty()) {
    t.plot_config = m.runs.front().config;
    t.plot_report = m.runs.front().report;
  }
  return t;
}

inline void attach_report(TaskOutput& t, const io::AnyConfig& cfg, const ForceLaw& law) {
  t.plot_config = cfg;
  if (const auto* line = std::get_if<LineConfig>(&cfg)) {
    t.plot_report = residual_report(*line, law);
  } else {
    t.plot_report = circle_residual_report(std::get<CircleConfig>(cfg), law);
  }
}

inline TaskOutput certify_gap(const io::Problem& p, const Logger& log) {
  const auto& law = io::require_law(p);
  if (!p.config) throw InvalidInput("config: required");
  const auto& cfg = *p.config;
  std::visit([](const auto& c) { c.validate(); }, cfg);
  const std::size_t gap = has_param(p, "gap") ? count_param(p, "gap") : default_gap(cfg);
  log.info("certify-gap: gap " + std::to_string(gap));
  const auto cert = std::visit([&](const auto& c) { return certify_extremal_gap(c, law, gap); }, cfg);
  TaskOutput t;
  t.output = {{"certificate", io::to_json(cert)}};
  t.csv = io::evidence_csv(cert);
  t.table = table_of(cert);
  attach_report(t, cfg, law);
  return t;
}

inline TaskOutput check_monotone(const io::Problem& p, const Logger&) {
  const auto& law = io::require_law(p);
  const auto& cfg = io::require_line(p);
  const std::size_t first = count_param_or(p, "first", 0);
  const std::size_t count = count_param_or(p, "count", cfg.window.size() > first ? cfg.window.size() - first : 0);
  const auto cert = check_internal_force_monotonicity(cfg, law, first, count);
  TaskOutput t;
  t.output = {{"certificate", io::to_json(cert)}};
  t.csv = io::evidence_csv(cert);
  t.table = table_of(cert);
  attach_report(t, cfg, law);
  return t;
}

inline TaskOutput gap_ratio(const io::Problem& p, const Logger&) {
  const auto& cfg = io::require_line(p);
  const auto r = gap_ratio_report(cfg);
  const auto g = gaps(cfg);
  TaskOutput t;
  t.output = {{"max_ratio", io::number(r.max_ratio)},
              {"numerator_gap", r.numerator_gap},
              {"denominator_gap", r.denominator_gap},
              {"gaps", io::numbers(g)}};
  t.csv = io::positions_csv(g, "gap");
  t.plot_config = cfg;
  return t;
}

inline TaskOutput detect_period(const io::Problem& p, const Logger&) {
  const auto& cfg = io::require_line(p);
  const auto side_name = io::string_or(p.params, "side", "right", "params");
  Side side;
  if (side_name == "left") {
    side = Side::left;
  } else if (side_name == "right") {
    side = Side::right;
  } else {
    throw InvalidInput("params.side: expected left or right");
  }
  const std::size_t gap_count = cfg.window.size() - 1;
  const std::size_t max_period = count_param_or(p, "max_period", std::max<std::size_t>(1, std::min<std::size_t>(8, gap_count / 3)));
  const double tol = io::number_or(p.params, "tol", 1e-9, "params");
  const auto r = detect_periodic_tail(cfg, side, max_period, tol);
  TaskOutput t;
  t.output = {{"side", side_name}, {"max_period", max_period}, {"tol", tol}, {"found", r.has_value()}};
  if (r) {
    t.output["period"] = r->period;
    t.output["pattern"] = io::numbers(r->pattern);
    t.output["continuation"] = io::to_json(r->continuation);
    t.csv = io::positions_csv(r->pattern, "gap");
  } else {
    t.output["period"] = nullptr;
    t.csv = io::positions_csv({}, "gap");
  }
  t.plot_config = cfg;
  return t;
}

inline TaskOutput residuals(const io::Problem& p, const Logger&) {
  const auto& law = io::require_law(p);
  if (!p.config) throw InvalidInput("config: required");
  const double tol = io::number_or(p.params, "tol", 1e-13, "params");
  if (!(tol > 0)) throw InvalidInput("params.tol: must be positive");
  TaskOutput t;
  ResidualReport report;
  if (const auto* line = std::get_if<LineConfig>(&*p.config)) {
    report = residual_report(*line, law, tol);
  } else {
    report = circle_residual_report(std::get<CircleConfig>(*p.config), law);
  }
  t.output = {{"residual_report", io::to_json(report)},
              {"tol", tol},
              {"within_tolerance", report.max_abs_net <= p.options.residual_tol + report.max_error_bound}};
  t.csv = io::residuals_csv(report);
  t.plot_config = *p.config;
  t.plot_report = report;
  return t;
}

inline TaskOutput diff_field(const io::Problem& p, const Logger&) {
  const auto& law = io::require_law(p);
  const auto X = io::parse_line_config(param(p, "X"), "params.X");
  const auto Y = io::parse_line_config(param(p, "Y"), "params.Y");
  std::vector<double> ws;
  const auto& w = param(p, "w");
  if (w.is_array()) {
    ws = io::as_numbers(w, "params.w");
  } else if (w.is_object()) {
    const double from = io::as_number(io::require(w, "from", "params.w"), "params.w.from");
    const double to = io::as_number(io::require(w, "to", "params.w"), "params.w.to");
    const auto count = io::as_count(io::require(w, "count", "params.w"), "params.w.count");
    if (count < 1 || !(to >= from)) throw InvalidInput("params.w: need count >= 1 and to >= from");
    for (std::size_t i = 0; i < count; ++i) {
      ws.push_back(count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  } else {
    ws = {io::as_number(w, "params.w")};
  }
  json rows = json::array();
  io::CsvWriter csv({"w", "f", "error_bound", "magnitude_bound"});
  for (double x : ws) {
    const auto f = eval_difference_field(X, Y, x, law);
    rows.push_back({{"w", x},
                    {"f", io::number(f.value)},
                    {"error_bound", io::number(f.error_bound)},
                    {"magnitude_bound", io::number(f.magnitude_bound)}});
    csv.row(x, f.value, f.error_bound, f.magnitude_bound);
  }
  TaskOutput t;
  t.output = {{"values", rows}};
  t.csv = csv.str();
  return t;
}

inline TaskOutput blaschke(const io::Problem& p, const Logger& log) {
  const auto& W = io::require_line(p);
  const std::size_t N = count_param(p, "N");
  const double C = io::number_or(p.params, "C", 0, "params");
  constexpr std::size_t kInlineRows = 1000;
  const auto s = blaschke_partial_sum(W, N, C, true);
  log.info("blaschke: N=" + std::to_string(N));
  TaskOutput t;
  t.output = {{"N", s.N},
              {"C", io::number(s.C)},
              {"partial_sum", io::number(s.partial_sum)},
              {"abs_partial_sum", io::number(s.abs_partial_sum)},
              {"lower_bound_sum", io::number(s.lower_bound_sum)},
              {"dominates", s.dominates}};
  if (N <= kInlineRows) {
    json rows = json::array();
    for (const auto& r : s.rows) {
      rows.push_back({{"n", r.n},
                      {"w", io::number(r.w)},
                      {"z", io::number(r.z)},
                      {"one_minus_z", io::number(r.one_minus_z)},
                      {"cumulative", io::number(r.cumulative)}});
    }
    t.output["rows"] = rows;
  }
  t.csv = io::blaschke_csv(s);
  return t;
}

inline TaskOutput reconstruct(const io::Problem& p, const Logger& log) {
  ReconstructionProblem rp;
  rp.law = io::require_law(p);
  rp.W = io::require_line(p);
  rp.m = count_param(p, "m");
  rp.starts = count_param_or(p, "starts", rp.starts);
  rp.equations = count_param_or(p, "equations", 0);
  if (has_param(p, "far_left_tail")) rp.far_left_tail = io::parse_tail(param(p, "far_left_tail"), "params.far_left_tail");
  log.info("reconstruct: m=" + std::to_string(rp.m) + " starts=" + std::to_string(rp.starts));
  const auto r = reconstruct_left_tail(rp, run_options(p));
  json runs = json::array();
  io::CsvWriter csv({"run", "unknown", "start", "position", "cluster", "converged", "residual"});
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const auto& run = r.runs[i];
    runs.push_back({{"start", io::numbers(run.start)},
                    {"positions", io::numbers(run.positions)},
                    {"residual", io::number(run.residual)},
                    {"evaluations", run.evaluations},
                    {"converged", run.converged},
                    {"status", run.status},
                    {"cluster", run.cluster >= 0 ? json(run.cluster) : json(nullptr)}});
    for (std::size_t k = 0; k < run.positions.size(); ++k) {
      csv.row(i, k + 1, run.start[k], run.positions[k], run.cluster >= 0 ? std::to_string(run.cluster) : std::string(),
              run.converged, run.residual);
    }
  }
  json clusters = json::array();
  for (const auto& c : r.clusters) {
    clusters.push_back({{"center", io::numbers(c.center)}, {"members", c.members}, {"residual", io::number(c.residual)}});
  }
  TaskOutput t;
  t.output = {{"m", r.m},
              {"equations", r.equations},
              {"starts", rp.starts},
              {"converged_count", r.converged_count},
              {"clusters", clusters},
              {"runs", runs}};
  t.converged = r.converged_count > 0;
  t.iterations = rp.starts;
  t.csv = csv.str();
  t.plot_config = rp.W;
  return t;
}

inline TaskOutput dispatch(const io::Problem& p, const Logger& log) {
  const auto& name = p.task;
  if (name == "solve-circle") return solve_circle(p, log);
  if (name == "solve-segment") return solve_segment(p, log);
  if (name == "relax") return relax(p, log);
  if (name == "zero-centered") return zero_centered(p, log);
  if (name == "extend") return extend(p, log);
  if (name == "certify-gap") return certify_gap(p, log);
  if (name == "check-monotone") return check_monotone(p, log);
  if (name == "gap-ratio") return gap_ratio(p, log);
  if (name == "detect-period") return detect_period(p, log);
  if (name == "residuals") return residuals(p, log);
  if (name == "diff-field") return diff_field(p, log);
  if (name == "blaschke") return blaschke(p, log);
  if (name == "reconstruct") return reconstruct(p, log);
  throw InvalidInput("task: unknown task '" + name + "'");
}

inline bool reports_convergence(const std::string& task) {
  for (const char* t : {"solve-circle", "solve-segment", "relax", "zero-centered", "extend", "reconstruct"}) {
    if (task == t) return true;
  }
  return false;
}

inline io::Problem assemble_problem(const std::string& task, const Flags& f) {
  io::Problem p;
  if (!f.problem.empty()) {
    p = io::parse_problem_text(read_file(f.problem));
    if (p.task != task) throw InvalidInput("task: problem file is for '" + p.task + "', not '" + task + "'");
  } else {
    p.task = task;
  }
  if (!f.law.empty()) p.law = io::parse_law_spec(f.law);
  if (f.seed) p.options.rng_seed = *f.seed;
  if (f.tol) p.options.residual_tol = *f.tol;
  if (f.n) p.params["n"] = *f.n;
  if (f.a) p.params["a"] = *f.a;
  if (f.b) p.params["b"] = *f.b;
  if (!f.csv.empty()) p.outputs.csv = f.csv;
  if (!f.svg.empty()) p.outputs.svg = f.svg;
  p.options.validate();
  return p;
}

inline void emit(const json& doc, const Flags& f, std::ostream& out) {
  const auto text = doc.dump(2) + "\n";
  if (f.out.empty()) {
    out << text;
  } else {
    write_file(f.out, text);
  }
}

inline std::string render_svg(const TaskOutput& t, const std::string& task) {
  if (!t.plot_config) throw InvalidInput("svg: no plot available for task '" + task + "'");
  if (const auto* line = std::get_if<LineConfig>(&*t.plot_config)) return svg::render_gap_plot(*line, t.plot_report);
  return svg::render_circle_plot(std::get<CircleConfig>(*t.plot_config), t.plot_report);
}

}  // namespace detail

// Runs one subcommand. JSON goes to `out` (or --out), logs and usage
// messages to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium configurations of repelling particles on the line and the circle", "equilib"};
  app.require_subcommand(1, 1);
  Flags f;
  for (const auto& name : io::task_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " task");
    sub->add_option("--problem", f.problem, "problem file (JSON)");
    sub->add_option("--out", f.out, "write the JSON result here instead of stdout");
    sub->add_option("--csv", f.csv, "write a CSV table here");
    sub->add_option("--svg", f.svg, "write an SVG plot here");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--tol", f.tol, "residual tolerance");
    sub->add_option("--n", f.n, "particle count");
    sub->add_option("--law", f.law, "force law as KIND:PARAM, e.g. inverse_power:2 or exp:1");
    sub->add_option("--a", f.a, "target x_{-1}");
    sub->add_option("--b", f.b, "target x_1");
    sub->add_flag("--table", f.table, "print certificates as a table");
  }

  std::vector<const char*> argv = {"equilib"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    out << io::error_object("usage", e.what()).dump(2) << '\n';
    return kValidation;
  }
  const std::string task = app.get_subcommands().front()->get_name();

  std::optional<io::Problem> problem;
  try {
    const Logger log(log_level_from_env(), err);
    problem = detail::assemble_problem(task, f);
    const auto t = detail::dispatch(*problem, log);
    json doc = {{"schema_version", io::kSchemaVersion},
                {"task", task},
                {"input", io::to_json(*problem)},
                {"options", io::to_json(problem->options)},
                {"converged", t.converged},
                {"iterations", t.iterations},
                {"output", t.output}};
    if (!problem->outputs.svg.empty()) detail::write_file(problem->outputs.svg, detail::render_svg(t, task));
    if (!problem->outputs.csv.empty()) detail::write_file(problem->outputs.csv, t.csv);
    if (f.table) {
      if (t.table.empty()) throw InvalidInput("--table: only available for certify-gap and check-monotone");
      if (!f.out.empty()) detail::write_file(f.out, doc.dump(2) + "\n");
      out << t.table;
    } else {
      detail::emit(doc, f, out);
    }
    if (!t.converged && detail::reports_convergence(task)) {
      log.error(task + ": did not converge");
      return kNoConvergence;
    }
    return kOk;
  } catch (const NoConvergence& e) {
    json doc = {{"schema_version", io::kSchemaVersion}, {"task", task}, {"converged", false}};
    if (problem) doc["input"] = io::to_json(*problem);
    doc["error"] = io::error_object(e.kind(), e.what())["error"];
    doc["error"]["last_residual"] = io::number(e.last_residual());
    try {
      detail::emit(doc, f, out);
    } catch (const Error&) {
      out << doc.dump(2) << '\n';
    }
    return kNoConvergence;
  } catch (const Error& e) {
    out << io::error_object(e.kind(), e.what()).dump(2) << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    out << io::error_object("invalid_input", e.what()).dump(2) << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    out << io::error_object("internal_error", e.what()).dump(2) << '\n';
    return kInternal;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace equilib::cli
