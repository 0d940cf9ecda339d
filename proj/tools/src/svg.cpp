#include "ctsev_cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ctsev::cli {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;  // legend column
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

const char* color(std::size_t i) { return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]; }

struct Frame {
  double x_min, x_max, y_min, y_max;
  double plot_w() const { return kWidth - kLeft - kRight; }
  double plot_h() const { return kHeight - kTop - kBottom; }
  double px(double x) const { return kLeft + (x - x_min) / (x_max - x_min) * plot_w(); }
  double py(double y) const { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h(); }
};

void open_svg(std::ostringstream& svg, const ChartText& text) {
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\">\n";
  if (!text.metadata.empty()) svg << "  <metadata>" << xml_escape(text.metadata) << "</metadata>\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "  <text x=\"" << num(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(text.title) << "</text>\n";
}

void axes(std::ostringstream& svg, const Frame& f, const ChartText& text, bool x_ticks) {
  const double x0 = kLeft, y0 = kTop + f.plot_h(), x1 = kLeft + f.plot_w();
  svg << "  <g stroke=\"#333\" stroke-width=\"1\">\n"
      << "    <line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0)
      << "\"/>\n"
      << "    <line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y0)
      << "\"/>\n  </g>\n";
  svg << "  <g font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = f.y_min + (f.y_max - f.y_min) * i / 5.0;
    svg << "    <text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
        << "</text>\n";
    svg << "    <line x1=\"" << num(x0) << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << num(x1) << "\" y2=\""
        << num(f.py(y)) << "\" stroke=\"#e5e5e5\"/>\n";
  }
  if (x_ticks) {
    for (int i = 0; i <= 5; ++i) {
      const double x = f.x_min + (f.x_max - f.x_min) * i / 5.0;
      svg << "    <text x=\"" << num(f.px(x)) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << tick(x)
          << "</text>\n";
    }
  }
  svg << "  </g>\n";
  svg << "  <text x=\"" << num(kLeft + f.plot_w() / 2) << "\" y=\"" << num(kHeight - 18)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(text.x_label) << "</text>\n";
  svg << "  <text transform=\"translate(18," << num(kTop + f.plot_h() / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(text.y_label) << "</text>\n";
}

void legend(std::ostringstream& svg, const std::vector<std::string>& names) {
  const double x = kWidth - kRight + 16;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(i);
    svg << "  <rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"12\" fill=\"" << color(i)
        << "\"/>\n"
        << "  <text x=\"" << num(x + 18) << "\" y=\"" << num(y + 1) << "\" font-size=\"12\">" << xml_escape(names[i])
        << "</text>\n";
  }
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_bar_chart(const ChartText& text, const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series) {
  std::ostringstream svg;
  open_svg(svg, text);
  const Frame f{0.0, 1.0, 0.0, 1.0};
  axes(svg, f, text, false);

  const double group_w = f.plot_w() / static_cast<double>(std::max<std::size_t>(1, categories.size()));
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, series.size()));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c) + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = std::clamp(c < series[s].values.size() ? series[s].values[c] : 0.0, 0.0, 1.0);
      const double top = f.py(v);
      svg << "  <rect x=\"" << num(gx + bar_w * static_cast<double>(s)) << "\" y=\"" << num(top) << "\" width=\""
          << num(bar_w * 0.95) << "\" height=\"" << num(f.py(0.0) - top) << "\" fill=\"" << color(s)
          << "\"><title>" << xml_escape(series[s].name + " " + categories[c] + " = " + tick(v)) << "</title></rect>\n";
    }
    svg << "  <text x=\"" << num(gx + group_w * 0.4) << "\" y=\"" << num(f.py(0.0) + 16)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(categories[c]) << "</text>\n";
  }
  std::vector<std::string> names;
  for (const auto& s : series) names.push_back(s.name);
  legend(svg, names);
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_line_chart(const ChartText& text, const std::vector<LineSeries>& series, double x_min, double x_max,
                           double y_min, double y_max, bool diagonal) {
  std::ostringstream svg;
  open_svg(svg, text);
  if (!(x_max > x_min)) x_max = x_min + 1.0;
  if (!(y_max > y_min)) y_max = y_min + 1.0;
  const Frame f{x_min, x_max, y_min, y_max};
  axes(svg, f, text, true);
  if (diagonal) {
    svg << "  <line x1=\"" << num(f.px(x_min)) << "\" y1=\"" << num(f.py(y_min)) << "\" x2=\"" << num(f.px(x_max))
        << "\" y2=\"" << num(f.py(y_max)) << "\" stroke=\"#999\" stroke-dasharray=\"4,3\"/>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& pts = series[s].points;
    if (pts.empty()) continue;
    svg << "  <polyline fill=\"none\" stroke=\"" << color(s) << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0) svg << ' ';
      svg << num(f.px(pts[i].first)) << ',' << num(f.py(pts[i].second));
    }
    svg << "\"/>\n";
    if (series[s].markers) {
      for (const auto& [x, y] : pts) {
        svg << "  <circle cx=\"" << num(f.px(x)) << "\" cy=\"" << num(f.py(y)) << "\" r=\"2\" fill=\"" << color(s)
            << "\"/>\n";
      }
    }
  }
  std::vector<std::string> names;
  for (const auto& s : series) names.push_back(s.name);
  legend(svg, names);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ctsev::cli
