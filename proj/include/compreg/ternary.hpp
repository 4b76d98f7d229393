#pragma once

#include <array>
#include <string>
#include <vector>

#include "compreg/composition.hpp"

namespace compreg {

using Point2 = std::array<double, 2>;

/// Barycentric map of a 3-part composition onto the equilateral triangle with
/// corners (0,0), (1,0), (1/2, sqrt(3)/2) for parts 1, 2, 3.
Point2 ternary_xy(const Composition& z);

/// Convex hull (monotone chain), counter-clockwise, no repeated last point.
/// Degenerate inputs collapse: 1 point -> that point, collinear -> segment.
std::vector<Point2> convex_hull(std::vector<Point2> pts);

/// Smallest peeled hull containing at least `level` of the points: hull
/// layers are removed from the outside while the interior still holds the
/// required fraction, then the hull of the survivors is returned.
std::vector<Point2> hull_peel(const std::vector<Point2>& pts, double level);

/// A labeled point or polygon overlay for the ternary SVG.
struct TernaryOverlay {
  std::vector<std::pair<Point2, std::string>> points;
  std::vector<std::vector<Point2>> polygons;
  std::array<std::string, 3> corner_labels{"part1", "part2", "part3"};
};

/// Minimal self-contained SVG: triangle frame, gridlines every 0.2, labeled
/// points and region polygons.
std::string ternary_svg(const TernaryOverlay& overlay);

}  // namespace compreg
