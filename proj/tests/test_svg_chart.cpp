#include <algorithm>
#include <stdexcept>

#include "doctest.h"
#include "qualsim/svg_chart.hpp"

using namespace qualsim::chart;

namespace {

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("svg") {

TEST_CASE("bar chart draws one bar per entry, in order") {
  std::vector<Bar> bars;
  for (int i = 0; i < 45; ++i) bars.push_back({"A" + std::to_string(i), -0.5 * i});
  const auto svg = bar_chart(bars, {"t", "x", "y"});
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<rect x=") == 45);
  CHECK(svg.find(">A0<") < svg.find(">A1<"));
  CHECK(svg.find(">A43<") < svg.find(">A44<"));
  CHECK_THROWS_AS(bar_chart({}, {}), std::invalid_argument);
}

TEST_CASE("labels are escaped") {
  const std::vector<Bar> bars{{"Bosnia & <Herzegovina>", 1.0}};
  const auto svg = bar_chart(bars, {"a \"title\"", "", ""});
  CHECK(svg.find("Bosnia &amp; &lt;Herzegovina&gt;") != std::string::npos);
  CHECK(svg.find("a &quot;title&quot;") != std::string::npos);
}

TEST_CASE("scatter chart") {
  const std::vector<Point> points{{0.0, 0.0, "a"}, {50.0, -10.0, "b"}, {92.7, -18.7, "c"}};
  const auto svg = scatter_chart(points, {"t", "x", "y"});
  CHECK(count(svg, "<circle") == 3);
  CHECK_THROWS_AS(scatter_chart({}, {}), std::invalid_argument);
}

TEST_CASE("two-series line chart") {
  const std::vector<Series> series{{"old", {{5e3, 1608.4}, {1e4, 1608.1}, {1e6, 1608.0}}},
                                   {"new", {{5e3, 1625.6}, {1e4, 1626.0}, {1e6, 1626.2}}}};
  const auto svg = line_chart(series, {"t", "x", "y"});
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find("old (left scale)") != std::string::npos);
  CHECK(svg.find("new (right scale)") != std::string::npos);
  CHECK_THROWS_AS(line_chart(std::vector<Series>{series[0]}, {}), std::invalid_argument);
  const std::vector<Series> empty{{"old", {}}, {"new", {}}};
  CHECK_THROWS_AS(line_chart(empty, {}), std::invalid_argument);
}

TEST_CASE("nice ticks cover the range") {
  const auto t = nice_ticks(-18.7, 0.3);
  CHECK(t.front() <= -18.7);
  CHECK(t.back() >= 0.3);
  CHECK(std::find(t.begin(), t.end(), 0.0) != t.end());
  CHECK(nice_ticks(0, 100, 5) == std::vector<double>{0, 20, 40, 60, 80, 100});
}

}
