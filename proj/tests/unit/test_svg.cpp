#include <gtest/gtest.h>

#include <string>

#include "ctsev_cli/svg.hpp"

namespace ctsev::cli {
namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Svg, EscapesMarkup) {
  EXPECT_EQ(xml_escape("a<b>&\"c'"), "a&lt;b&gt;&amp;&quot;c&apos;");
  EXPECT_EQ(xml_escape("plain"), "plain");
}

TEST(Svg, BarChartIsWellFormed) {
  const ChartText text{"Per K <metrics>", "K", "rate", R"({"seed":1,"name":"a&b"})"};
  const std::string svg = svg_bar_chart(text, {"63", "50", "10"},
                                        {{"TPR", {0.5, 0.6, 0.7}}, {"AUC", {0.9, 1.0, 0.0}}});
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_EQ(count(svg, "<svg "), 1u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<metadata>"), 1u);
  EXPECT_NE(svg.find("&quot;seed&quot;:1"), std::string::npos);
  EXPECT_NE(svg.find("a&amp;b"), std::string::npos);
  EXPECT_NE(svg.find("Per K &lt;metrics&gt;"), std::string::npos);
  EXPECT_EQ(svg.find("<metrics>"), std::string::npos);
  EXPECT_GE(count(svg, "<rect"), 6u);
  EXPECT_EQ(count(svg, "<text"), count(svg, "</text>"));
}

TEST(Svg, LineChartDrawsSeriesAndDiagonal) {
  const ChartText text{"ROC", "FPR", "TPR", "{}"};
  const LineSeries roc{"pooled", {{0, 0}, {0.2, 0.8}, {1, 1}}, true};
  const std::string with = svg_line_chart(text, {roc}, 0, 1, 0, 1, true);
  const std::string without = svg_line_chart(text, {roc}, 0, 1, 0, 1, false);
  EXPECT_NE(with.find("<polyline"), std::string::npos);
  EXPECT_GT(with.size(), without.size());
  EXPECT_GE(count(with, "<circle"), 3u);
  EXPECT_NE(with.find("pooled"), std::string::npos);
}

}  // namespace
}  // namespace ctsev::cli
