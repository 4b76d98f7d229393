#include "compreg/ternary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "compreg/errors.hpp"

namespace compreg {

Point2 ternary_xy(const Composition& z) {
  if (z.dim() != 3)
    throw UnsupportedDimension("ternary coordinates require 3 parts");
  const double root3_2 = std::sqrt(3.0) / 2.0;
  return {z[1] + 0.5 * z[2], root3_2 * z[2]};
}

namespace {
double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}
}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<Point2> hull_peel(const std::vector<Point2>& pts, double level) {
  if (pts.empty()) throw EmptyData("hull_peel: no points");
  if (!(level > 0.0 && level <= 1.0))
    throw InvalidArgument("hull_peel: level must be in (0, 1]");
  const auto needed =
      static_cast<std::size_t>(std::ceil(level * static_cast<double>(pts.size())));
  std::vector<Point2> remaining = pts;
  while (true) {
    auto hull = convex_hull(remaining);
    // Count survivors if this layer were removed (duplicates of a hull vertex
    // all leave together, matching the hull's set semantics).
    std::set<Point2> layer(hull.begin(), hull.end());
    std::vector<Point2> inner;
    inner.reserve(remaining.size());
    for (const auto& p : remaining)
      if (!layer.count(p)) inner.push_back(p);
    if (inner.size() < needed || inner.size() < 3) return hull;
    remaining = std::move(inner);
  }
}

namespace {

Point2 svg_xy(const Point2& t) {
  // Triangle side 440 px, margins for labels; SVG y grows downward.
  const double x0 = 60.0, y0 = 460.0, side = 440.0;
  return {x0 + side * t[0], y0 - side * t[1]};
}

void append_polyline(std::string& svg, const std::vector<Point2>& poly,
                     const char* color, bool close) {
  if (poly.empty()) return;
  svg += "  <path d=\"";
  char buf[64];
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 p = svg_xy(poly[i]);
    std::snprintf(buf, sizeof buf, "%c%.2f %.2f ", i == 0 ? 'M' : 'L', p[0], p[1]);
    svg += buf;
  }
  if (close) svg += "Z";
  svg += "\" fill=\"";
  svg += close ? color : "none";
  svg += close ? "\" fill-opacity=\"0.25" : "";
  svg += "\" stroke=\"";
  svg += color;
  svg += "\" stroke-width=\"1.5\"/>\n";
}

}  // namespace

std::string ternary_svg(const TernaryOverlay& overlay) {
  const double root3_2 = std::sqrt(3.0) / 2.0;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"520\" "
      "viewBox=\"0 0 560 520\">\n"
      "  <rect width=\"560\" height=\"520\" fill=\"white\"/>\n";
  // Gridlines at steps of 0.2 parallel to each edge.
  for (int s = 1; s < 5; ++s) {
    const double f = 0.2 * s;
    append_polyline(svg, {{f, 0.0}, {f / 2.0, root3_2 * f}}, "#cccccc", false);
    append_polyline(svg, {{1.0 - f, 0.0}, {0.5 + f / 2.0, root3_2 * (1.0 - f)}},
                    "#cccccc", false);
    append_polyline(svg,
                    {{f / 2.0, root3_2 * f}, {1.0 - f / 2.0, root3_2 * f}},
                    "#cccccc", false);
  }
  {
    const Point2 a = svg_xy({0.0, 0.0}), b = svg_xy({1.0, 0.0}),
                 c = svg_xy({0.5, root3_2});
    char fbuf[256];
    std::snprintf(fbuf, sizeof fbuf,
                  "  <path d=\"M%.2f %.2f L%.2f %.2f L%.2f %.2f Z\" "
                  "fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n",
                  a[0], a[1], b[0], b[1], c[0], c[1]);
    svg += fbuf;
  }
  const char* colors[] = {"#1b6ca8", "#c23b22", "#2e8540", "#8a4fbf", "#b8860b"};
  for (std::size_t i = 0; i < overlay.polygons.size(); ++i)
    append_polyline(svg, overlay.polygons[i], colors[i % 5], true);
  char buf[256];
  for (std::size_t i = 0; i < overlay.points.size(); ++i) {
    const Point2 p = svg_xy(overlay.points[i].first);
    std::snprintf(buf, sizeof buf,
                  "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>\n"
                  "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"13\" "
                  "font-family=\"sans-serif\">%s</text>\n",
                  p[0], p[1], colors[i % 5], p[0] + 7.0, p[1] + 4.0,
                  overlay.points[i].second.c_str());
    svg += buf;
  }
  const Point2 ca = svg_xy({0.0, 0.0}), cb = svg_xy({1.0, 0.0}),
               cc = svg_xy({0.5, root3_2});
  std::snprintf(buf, sizeof buf,
                "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"15\" "
                "font-family=\"sans-serif\" text-anchor=\"end\">%s</text>\n",
                ca[0] - 6.0, ca[1] + 16.0, overlay.corner_labels[0].c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"15\" "
                "font-family=\"sans-serif\">%s</text>\n",
                cb[0] + 6.0, cb[1] + 16.0, overlay.corner_labels[1].c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"15\" "
                "font-family=\"sans-serif\" text-anchor=\"middle\">%s</text>\n",
                cc[0], cc[1] - 10.0, overlay.corner_labels[2].c_str());
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace compreg
