#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "equilib/certificates.hpp"
#include "equilib/config.hpp"
#include "equilib/diagnostics.hpp"
#include "equilib/errors.hpp"
#include "equilib/force_law.hpp"
#include "equilib/residuals.hpp"
#include "equilib/solver_options.hpp"

namespace equilib::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {
      "solve-circle",  "solve-segment", "relax",     "zero-centered", "extend",   "certify-gap", "check-monotone",
      "gap-ratio",     "detect-period", "residuals", "diff-field",    "blaschke", "reconstruct"};
  return names;
}

inline bool is_task(const std::string& name) {
  for (const auto& t : task_names()) {
    if (t == name) return true;
  }
  return false;
}

// Non-finite values serialize as null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

// Shortest round-trip decimal form, used for CSV cells.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

// ---- field access with path-qualified errors ----

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InvalidInput(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw InvalidInput(path.empty() ? key + ": required" : path + "." + key + ": required");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw InvalidInput(path + ": expected a number");
  return j.get<double>();
}

inline std::uint64_t as_count(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw InvalidInput(path + ": expected a non-negative integer");
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw InvalidInput(path + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> as_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw InvalidInput(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<std::size_t> as_counts(const json& j, const std::string& path) {
  if (!j.is_array()) throw InvalidInput(path + ": expected an array of indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_count(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : as_number(*it, join(path, key));
}

inline std::uint64_t count_or(const json& j, const std::string& key, std::uint64_t fallback, const std::string& path) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : as_count(*it, join(path, key));
}

inline std::string string_or(const json& j, const std::string& key, std::string fallback, const std::string& path) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : as_string(*it, join(path, key));
}

// ---- force laws ----

inline ForceLaw make_law(const std::string& kind, double k, const std::string& path) {
  if (kind == "inverse_power") return ForceLaw::inverse_power(k);
  if (kind == "exp") return ForceLaw::stretched_exp(k);
  throw InvalidInput(path + ": unknown law kind '" + kind + "'");
}

// "inverse_power:2" or "exp:1".
inline ForceLaw parse_law_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidInput("law: expected KIND:PARAM, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon), param = spec.substr(colon + 1);
  std::size_t used = 0;
  double k = 0;
  try {
    k = std::stod(param, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != param.size()) throw InvalidInput("law: bad parameter '" + param + "'");
  return make_law(kind, k, "law");
}

inline AnalyticTail parse_analytic_tail(const json& j, const std::string& path, bool& scale_given) {
  AnalyticTail t;
  const auto kind = as_string(require(j, "kind", path), join(path, "kind"));
  if (kind == "inverse_power") {
    t.kind = AnalyticTail::Kind::inverse_power;
  } else if (kind == "exp") {
    t.kind = AnalyticTail::Kind::exp;
  } else {
    throw InvalidInput(join(path, "kind") + ": unknown tail kind '" + kind + "'");
  }
  t.k = as_number(require(j, "k", path), join(path, "k"));
  if (!(t.k > 0) || !std::isfinite(t.k)) throw InvalidInput(join(path, "k") + ": must be positive");
  scale_given = j.contains("scale") && !j["scale"].is_null();
  t.scale = scale_given ? as_number(j["scale"], join(path, "scale")) : 1.0;
  if (!(t.scale > 0)) throw InvalidInput(join(path, "scale") + ": must be positive");
  return t;
}

inline ForceLaw parse_law(const json& j, const std::string& path = "law") {
  if (j.is_string()) return parse_law_spec(j.get<std::string>());
  const auto kind = as_string(require(j, "kind", path), join(path, "kind"));
  if (kind != "tabulated") return make_law(kind, as_number(require(j, "k", path), join(path, "k")), path);
  const auto& samples = require(j, "samples", path);
  if (!samples.is_array()) throw InvalidInput(join(path, "samples") + ": expected an array of [d, F] pairs");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto p = join(path, "samples") + "[" + std::to_string(i) + "]";
    const auto xy = as_numbers(samples[i], p);
    if (xy.size() != 2) throw InvalidInput(p + ": expected [d, F]");
    pts.emplace_back(xy[0], xy[1]);
  }
  std::optional<AnalyticTail> tail;
  bool scale_given = true;
  if (j.contains("tail") && !j["tail"].is_null()) tail = parse_analytic_tail(j["tail"], join(path, "tail"), scale_given);
  return ForceLaw::tabulated(std::move(pts), tail, scale_given);
}

inline json to_json(const ForceLaw& law) {
  switch (law.kind()) {
    case ForceLaw::Kind::inverse_power:
      return {{"kind", "inverse_power"}, {"k", law.exponent()}};
    case ForceLaw::Kind::stretched_exp:
      return {{"kind", "exp"}, {"k", law.exponent()}};
    case ForceLaw::Kind::tabulated:
      break;
  }
  json samples = json::array();
  for (std::size_t i = 0; i < law.sample_distances().size(); ++i) {
    samples.push_back({law.sample_distances()[i], law.sample_forces()[i]});
  }
  json j = {{"kind", "tabulated"}, {"samples", samples}};
  if (const auto& t = law.tail()) {
    j["tail"] = {{"kind", t->kind == AnalyticTail::Kind::exp ? "exp" : "inverse_power"}, {"k", t->k}, {"scale", t->scale}};
  }
  return j;
}

// ---- configurations ----

inline TailModel parse_tail(const json& j, const std::string& path) {
  if (j.is_null()) return {};
  const auto kind = as_string(require(j, "kind", path), join(path, "kind"));
  if (kind == "none") return {};
  const double start = as_number(require(j, "start", path), join(path, "start"));
  if (kind == "arithmetic") return TailModel::arithmetic(start, as_number(require(j, "gap", path), join(path, "gap")));
  if (kind == "periodic") return TailModel::periodic(start, as_numbers(require(j, "gaps", path), join(path, "gaps")));
  throw InvalidInput(join(path, "kind") + ": unknown tail kind '" + kind + "'");
}

inline json to_json(const TailModel& t) {
  switch (t.kind) {
    case TailModel::Kind::none:
      return nullptr;
    case TailModel::Kind::arithmetic:
      return {{"kind", "arithmetic"}, {"start", t.start}, {"gap", t.pattern.at(0)}};
    case TailModel::Kind::periodic:
      return {{"kind", "periodic"}, {"start", t.start}, {"gaps", t.pattern}};
  }
  return nullptr;
}

// Missing c or C are derived from the gaps.
inline LineConfig parse_line_config(const json& j, const std::string& path = "config") {
  LineConfig cfg;
  cfg.window = as_numbers(require(j, "window", path), join(path, "window"));
  if (j.contains("left_tail")) cfg.left_tail = parse_tail(j["left_tail"], join(path, "left_tail"));
  if (j.contains("right_tail")) cfg.right_tail = parse_tail(j["right_tail"], join(path, "right_tail"));
  cfg.c = number_or(j, "c", 0, path);
  cfg.C = number_or(j, "C", 0, path);
  if (cfg.window.empty()) throw InvalidInput(join(path, "window") + ": must not be empty");
  cfg.derive_bounds();
  return cfg;
}

inline json to_json(const LineConfig& cfg) {
  json j = {{"window", numbers(cfg.window)}, {"c", number(cfg.c)}, {"C", number(cfg.C)}};
  if (!cfg.left_tail.empty()) j["left_tail"] = to_json(cfg.left_tail);
  if (!cfg.right_tail.empty()) j["right_tail"] = to_json(cfg.right_tail);
  return j;
}

inline CircleConfig parse_circle_config(const json& j, const std::string& path = "config") {
  auto cfg = CircleConfig::from_angles(as_numbers(require(j, "angles", path), join(path, "angles")));
  cfg.validate();
  return cfg;
}

inline json to_json(const CircleConfig& cfg) { return {{"angles", numbers(cfg.angles)}}; }

using AnyConfig = std::variant<LineConfig, CircleConfig>;

inline AnyConfig parse_config(const json& j, const std::string& path = "config") {
  if (!j.is_object()) throw InvalidInput(path + ": expected an object");
  if (j.contains("angles")) return parse_circle_config(j, path);
  if (j.contains("window")) return parse_line_config(j, path);
  throw InvalidInput(path + ": expected 'window' or 'angles'");
}

inline json to_json(const AnyConfig& cfg) {
  return std::visit([](const auto& c) { return to_json(c); }, cfg);
}

// ---- options ----

inline SolverOptions parse_options(const json& j, const std::string& path = "options") {
  SolverOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw InvalidInput(path + ": expected an object");
  o.residual_tol = number_or(j, "residual_tol", o.residual_tol, path);
  o.position_tol = number_or(j, "position_tol", o.position_tol, path);
  o.max_sweeps = count_or(j, "max_sweeps", o.max_sweeps, path);
  o.max_outer_iters = count_or(j, "max_outer_iters", o.max_outer_iters, path);
  o.rng_seed = count_or(j, "rng_seed", o.rng_seed, path);
  if (j.contains("allow_unconverged")) {
    if (!j["allow_unconverged"].is_boolean()) throw InvalidInput(join(path, "allow_unconverged") + ": expected a boolean");
    o.allow_unconverged = j["allow_unconverged"].get<bool>();
  }
  if (j.contains("schedule") && !j["schedule"].is_null()) {
    const auto& s = j["schedule"];
    const auto sp = join(path, "schedule");
    if (!s.is_object()) throw InvalidInput(sp + ": expected an object");
    auto& t = o.schedule;
    t.initial_level = count_or(s, "initial_level", t.initial_level, sp);
    t.max_level = count_or(s, "max_level", t.max_level, sp);
    t.compare_count = count_or(s, "compare_count", t.compare_count, sp);
    t.guard = count_or(s, "guard", t.guard, sp);
    t.agreement_tol = number_or(s, "agreement_tol", t.agreement_tol, sp);
  }
  o.validate();
  return o;
}

inline json to_json(const SolverOptions& o) {
  const auto& t = o.schedule;
  return {{"residual_tol", o.residual_tol},
          {"position_tol", o.position_tol},
          {"max_sweeps", o.max_sweeps},
          {"max_outer_iters", o.max_outer_iters},
          {"rng_seed", o.rng_seed},
          {"allow_unconverged", o.allow_unconverged},
          {"schedule",
           {{"initial_level", t.initial_level},
            {"max_level", t.max_level},
            {"compare_count", t.compare_count},
            {"guard", t.guard},
            {"agreement_tol", t.agreement_tol}}}};
}

// ---- problem files ----

struct Outputs {
  std::string csv;
  std::string svg;
};

struct Problem {
  int schema_version = kSchemaVersion;
  std::string task;
  std::optional<ForceLaw> law;
  std::optional<AnyConfig> config;
  SolverOptions options;
  json params = json::object();
  Outputs outputs;
};

inline Problem parse_problem(const json& j) {
  if (!j.is_object()) throw InvalidInput("problem: expected a JSON object");
  Problem p;
  const auto& version = require(j, "schema_version", "");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
    throw InvalidInput("schema_version: must be 1");
  }
  p.task = as_string(require(j, "task", ""), "task");
  if (!is_task(p.task)) throw InvalidInput("task: unknown task '" + p.task + "'");
  if (j.contains("law") && !j["law"].is_null()) p.law = parse_law(j["law"]);
  if (j.contains("config") && !j["config"].is_null()) p.config = parse_config(j["config"]);
  if (j.contains("options")) p.options = parse_options(j["options"]);
  if (j.contains("params") && !j["params"].is_null()) {
    if (!j["params"].is_object()) throw InvalidInput("params: expected an object");
    p.params = j["params"];
  }
  if (j.contains("outputs") && !j["outputs"].is_null()) {
    const auto& o = j["outputs"];
    if (!o.is_object()) throw InvalidInput("outputs: expected an object");
    p.outputs.csv = string_or(o, "csv", "", "outputs");
    p.outputs.svg = string_or(o, "svg", "", "outputs");
  }
  return p;
}

inline Problem parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("problem: malformed JSON: ") + e.what());
  }
  return parse_problem(j);
}

inline json to_json(const Problem& p) {
  json j = {{"schema_version", p.schema_version}, {"task", p.task}, {"options", to_json(p.options)},
            {"params", p.params}};
  if (p.law) j["law"] = to_json(*p.law);
  if (p.config) j["config"] = to_json(*p.config);
  json outputs = json::object();
  if (!p.outputs.csv.empty()) outputs["csv"] = p.outputs.csv;
  if (!p.outputs.svg.empty()) outputs["svg"] = p.outputs.svg;
  if (!outputs.empty()) j["outputs"] = outputs;
  return j;
}

inline const ForceLaw& require_law(const Problem& p) {
  if (!p.law) throw InvalidInput("law: required");
  return *p.law;
}

inline const LineConfig& require_line(const Problem& p) {
  if (!p.config) throw InvalidInput("config: required");
  if (!std::holds_alternative<LineConfig>(*p.config)) throw InvalidInput("config: expected a line configuration");
  return std::get<LineConfig>(*p.config);
}

// ---- results ----

inline json to_json(const ResidualReport& r) {
  json rows = json::array();
  for (const auto& p : r.particles) {
    rows.push_back({{"index", p.index},
                    {"f_minus", number(p.f_minus)},
                    {"f_plus", number(p.f_plus)},
                    {"net", number(p.net)},
                    {"error_bound", number(p.error_bound)}});
  }
  return {{"particles", rows}, {"max_abs_net", number(r.max_abs_net)}, {"max_error_bound", number(r.max_error_bound)}};
}

inline json to_json(const EvidenceRow& e) {
  return {{"kind", e.kind},
          {"side", e.side},
          {"term", e.term},
          {"lhs_label", e.lhs_label},
          {"rhs_label", e.rhs_label},
          {"lhs_distance", number(e.lhs_distance)},
          {"rhs_distance", number(e.rhs_distance)},
          {"lhs", number(e.lhs)},
          {"lhs_error", number(e.lhs_error)},
          {"rhs", number(e.rhs)},
          {"rhs_error", number(e.rhs_error)},
          {"relation", e.relation},
          {"holds", e.holds}};
}

inline json to_json(const Certificate& c) {
  json evidence = json::array();
  for (const auto& e : c.evidence) evidence.push_back(to_json(e));
  json j = {{"kind", to_string(c.kind)},
            {"verdict", to_string(c.verdict)},
            {"reason", c.reason},
            {"conclusions", c.conclusions},
            {"evidence", evidence}};
  if (c.kind == CertificateKind::monotone_internal_forces) {
    j["first"] = c.first;
    j["internal_forces"] = numbers(c.internal_forces);
    j["violation"] = c.violation ? json{c.violation->first, c.violation->second} : json(nullptr);
  } else {
    j["extremum"] = c.extremum;
    j["gap_index"] = c.gap_index;
    j["x_index"] = c.x_index;
    j["y_index"] = c.y_index;
    j["mirrored"] = c.mirrored;
    j["margin"] = number(c.margin);
  }
  return j;
}

inline json error_object(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

// ---- CSV ----

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }

  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "true" : "false"; }
  static std::string cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  static std::string cell(const char* s) { return cell(std::string(s)); }

  std::ostringstream os_;
};

inline std::string positions_csv(const std::vector<double>& xs, const char* column) {
  CsvWriter w({"index", column});
  for (std::size_t i = 0; i < xs.size(); ++i) w.row(i, xs[i]);
  return w.str();
}

inline std::string residuals_csv(const ResidualReport& r) {
  CsvWriter w({"index", "F_minus", "F_plus", "net", "error_bound"});
  for (const auto& p : r.particles) w.row(p.index, p.f_minus, p.f_plus, p.net, p.error_bound);
  return w.str();
}

inline std::string evidence_csv(const Certificate& c) {
  CsvWriter w({"kind", "side", "term", "lhs_label", "rhs_label", "lhs_distance", "rhs_distance", "lhs", "lhs_error",
               "rhs", "rhs_error", "relation", "holds"});
  for (const auto& e : c.evidence) {
    w.row(e.kind, e.side, e.term, e.lhs_label, e.rhs_label, e.lhs_distance, e.rhs_distance, e.lhs, e.lhs_error, e.rhs,
          e.rhs_error, e.relation, e.holds);
  }
  return w.str();
}

inline std::string blaschke_csv(const BlaschkeSummary& s) {
  CsvWriter w({"n", "w_n", "z_n", "one_minus_z_n", "cumulative"});
  for (const auto& r : s.rows) w.row(r.n, r.w, r.z, r.one_minus_z, r.cumulative);
  return w.str();
}

}  // namespace equilib::io
