#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ctsev::cli {

struct BarSeries {
  std::string name;
  std::vector<double> values;  // one per category
};

struct LineSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool markers = false;
};

struct ChartText {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string metadata;  // embedded verbatim (escaped) in <metadata>
};

// Grouped bar chart, y axis fixed to [0, 1].
std::string svg_bar_chart(const ChartText& text, const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series);

// Line chart over [x_min, x_max] x [y_min, y_max]; `diagonal` adds the
// chance line for ROC plots.
std::string svg_line_chart(const ChartText& text, const std::vector<LineSeries>& series, double x_min, double x_max,
                           double y_min, double y_max, bool diagonal = false);

std::string xml_escape(const std::string& s);

}  // namespace ctsev::cli
