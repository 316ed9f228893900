#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include "equilib/config.hpp"
#include "equilib/residuals.hpp"

namespace equilib::svg {

namespace detail {

inline std::string fixed(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", x == 0 ? 0.0 : x);
  return buf;
}

inline std::string label(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

inline void header(std::ostringstream& os, int width, int height) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << ' ' << height << "\" width=\""
     << width << "\" height=\"" << height << "\">\n"
     << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
        "markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#c0392b\"/>"
        "</marker></defs>\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
}

inline void arrow(std::ostringstream& os, std::size_t index, double x1, double y1, double x2, double y2) {
  os << "<line class=\"force\" data-index=\"" << index << "\" x1=\"" << fixed(x1) << "\" y1=\"" << fixed(y1)
     << "\" x2=\"" << fixed(x2) << "\" y2=\"" << fixed(y2)
     << "\" stroke=\"#c0392b\" stroke-width=\"2\" marker-end=\"url(#arrow)\"/>\n";
}

inline double arrow_scale(const std::optional<ResidualReport>& report, double max_length) {
  if (!report || !(report->max_abs_net > 0)) return 0;
  return max_length / report->max_abs_net;
}

}  // namespace detail

// Particles of the window as dots on an axis, gap lengths above, net-force
// arrows below (rightward positive, longest arrow 60 px).
inline std::string render_gap_plot(const LineConfig& cfg, const std::optional<ResidualReport>& report = std::nullopt) {
  constexpr int kWidth = 800, kHeight = 240;
  constexpr double kLeft = 60, kRight = 740, kAxis = 120;
  std::ostringstream os;
  detail::header(os, kWidth, kHeight);
  const auto& x = cfg.window;
  const double lo = x.empty() ? 0 : x.front(), hi = x.empty() ? 1 : x.back();
  auto map = [&](double p) { return hi > lo ? kLeft + (p - lo) / (hi - lo) * (kRight - kLeft) : (kLeft + kRight) / 2; };

  os << "<line class=\"axis\" x1=\"" << detail::fixed(kLeft - 30) << "\" y1=\"" << detail::fixed(kAxis) << "\" x2=\""
     << detail::fixed(kRight + 30) << "\" y2=\"" << detail::fixed(kAxis) << "\" stroke=\"#888\""
     << "/>\n";
  if (!cfg.left_tail.empty()) {
    os << "<text class=\"tail\" x=\"" << detail::fixed(kLeft - 40) << "\" y=\"" << detail::fixed(kAxis + 4)
       << "\" text-anchor=\"end\" font-size=\"12\">...</text>\n";
  }
  if (!cfg.right_tail.empty()) {
    os << "<text class=\"tail\" x=\"" << detail::fixed(kRight + 40) << "\" y=\"" << detail::fixed(kAxis + 4)
       << "\" font-size=\"12\">...</text>\n";
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    os << "<text class=\"gap\" data-index=\"" << i << "\" x=\"" << detail::fixed((map(x[i]) + map(x[i + 1])) / 2)
       << "\" y=\"" << detail::fixed(kAxis - 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
       << detail::label(x[i + 1] - x[i]) << "</text>\n";
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << "<circle class=\"particle\" data-index=\"" << i << "\" cx=\"" << detail::fixed(map(x[i])) << "\" cy=\""
       << detail::fixed(kAxis) << "\" r=\"5\" fill=\"#2c3e50\"/>\n";
  }
  if (report) {
    const double s = detail::arrow_scale(report, 60);
    for (const auto& p : report->particles) {
      if (p.index >= x.size()) continue;
      const double cx = map(x[p.index]);
      detail::arrow(os, p.index, cx, kAxis + 30, cx + p.net * s, kAxis + 30);
    }
  }
  os << "</svg>\n";
  return os.str();
}

// Particles on the unit circle (angle 0 to the right, counterclockwise),
// arc lengths outside, tangential net-force arrows (ccw positive).
inline std::string render_circle_plot(const CircleConfig& cfg,
                                      const std::optional<ResidualReport>& report = std::nullopt) {
  constexpr int kSize = 400;
  constexpr double kCenter = 200, kRadius = 140;
  std::ostringstream os;
  detail::header(os, kSize, kSize);
  os << "<circle class=\"orbit\" cx=\"" << detail::fixed(kCenter) << "\" cy=\"" << detail::fixed(kCenter)
     << "\" r=\"" << detail::fixed(kRadius) << "\" fill=\"none\" stroke=\"#888\"/>\n";
  const auto& th = cfg.angles;
  const auto g = gaps(cfg);
  auto px = [&](double a, double r) { return kCenter + r * std::cos(a); };
  auto py = [&](double a, double r) { return kCenter - r * std::sin(a); };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double mid = th[i] + g[i] / 2;
    os << "<text class=\"gap\" data-index=\"" << i << "\" x=\"" << detail::fixed(px(mid, kRadius + 24)) << "\" y=\""
       << detail::fixed(py(mid, kRadius + 24) + 4) << "\" text-anchor=\"middle\" font-size=\"11\">"
       << detail::label(g[i]) << "</text>\n";
  }
  for (std::size_t i = 0; i < th.size(); ++i) {
    os << "<circle class=\"particle\" data-index=\"" << i << "\" cx=\"" << detail::fixed(px(th[i], kRadius))
       << "\" cy=\"" << detail::fixed(py(th[i], kRadius)) << "\" r=\"5\" fill=\"#2c3e50\"/>\n";
  }
  if (report) {
    const double s = detail::arrow_scale(report, 40);
    for (const auto& p : report->particles) {
      if (p.index >= th.size()) continue;
      const double a = th[p.index], len = p.net * s;
      const double x0 = px(a, kRadius), y0 = py(a, kRadius);
      detail::arrow(os, p.index, x0, y0, x0 - len * std::sin(a), y0 - len * std::cos(a));
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace equilib::svg
