#ifndef A2DMM_PLOT_HPP_
#define A2DMM_PLOT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "a2dmm/engine.hpp"

namespace a2dmm {

struct PlotSeries {
  std::string label;
  const Trace* trace;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Line chart of log10(e^t) against t, one polyline per series.
///
/// Non-finite and non-positive errors are skipped. The y range snaps to whole
/// decades so every tick is a power of ten.
inline void write_error_svg(std::ostream& os, const std::vector<PlotSeries>& series,
                            const std::string& title = "error vs iteration") {
  constexpr double width = 800, height = 500, left = 80, right = 180, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  static const std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  double tmax = 1.0;
  double lmin = std::numeric_limits<double>::infinity();
  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (const auto& r : s.trace->records) {
      tmax = std::max(tmax, static_cast<double>(r.t));
      if (std::isfinite(r.error) && r.error > 0.0) {
        lmin = std::min(lmin, std::log10(r.error));
        lmax = std::max(lmax, std::log10(r.error));
      }
    }
  }
  if (!std::isfinite(lmin)) {
    lmin = -1.0;
    lmax = 1.0;
  }
  lmin = std::floor(lmin);
  lmax = std::ceil(lmax);
  if (lmax <= lmin) lmax = lmin + 1.0;

  auto px = [&](double t) { return left + plot_w * t / tmax; };
  auto py = [&](double l) { return top + plot_h * (lmax - l) / (lmax - lmin); };

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << detail::xml_escape(title) << "</text>\n";
  out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h << "\"/>\n";
  out << "</g>\n";

  // Decade ticks on the log axis.
  const int decades = static_cast<int>(lmax - lmin);
  const int stride = std::max(1, decades / 10);
  out << "<g class=\"y-ticks\" font-size=\"12\">\n";
  for (int k = static_cast<int>(lmin); k <= static_cast<int>(lmax); k += stride) {
    const double y = py(k);
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
        << "\" stroke=\"black\"/>";
    out << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << k << "</text>\n";
  }
  out << "</g>\n";
  out << "<g class=\"x-ticks\" font-size=\"12\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double t = tmax * k / 5.0;
    out << "<line x1=\"" << px(t) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(t) << "\" y2=\""
        << top + plot_h + 5 << "\" stroke=\"black\"/>";
    out << "<text x=\"" << px(t) << "\" y=\"" << top + plot_h + 20 << "\" text-anchor=\"middle\">"
        << std::lround(t) << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-size=\"14\">iteration t</text>\n";
  out << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\" data-scale=\"log10\">log10 error</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % colors.size()];
    out << "<polyline class=\"series\" data-label=\"" << detail::xml_escape(series[k].label)
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& r : series[k].trace->records) {
      if (!(std::isfinite(r.error) && r.error > 0.0)) continue;
      out << (first ? "" : " ") << px(static_cast<double>(r.t)) << ',' << py(std::log10(r.error));
      first = false;
    }
    out << "\"/>\n";
    const double ly = top + 20.0 + 20.0 * static_cast<double>(k);
    out << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 40 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    out << "<text x=\"" << left + plot_w + 45 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << detail::xml_escape(series[k].label) << "</text>\n";
  }
  out << "</svg>\n";
  os << out.str();
}

}  // namespace a2dmm

#endif  // A2DMM_PLOT_HPP_
