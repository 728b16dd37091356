#pragma once

#include <complex>
#include <span>
#include <vector>

namespace delaysync {

using Complex = std::complex<double>;

/// Vertices of the convex hull of a planar point set, counterclockwise,
/// starting from the lowest-leftmost point. Collinear boundary points are
/// dropped. A single (possibly repeated) point yields one vertex and a
/// collinear set yields its two extreme points.
std::vector<Complex> convex_hull(std::span<const Complex> points,
                                 double collinear_tol = 1e-10);

/// Inside-or-on-boundary test for a counterclockwise convex polygon.
/// One- and two-vertex "polygons" are treated as a point and a segment.
bool point_in_convex_polygon(std::span<const Complex> hull, Complex z,
                             double tol = 1e-9);

/// Euclidean distance from z to the polygon boundary (edges and vertices).
double distance_to_boundary(std::span<const Complex> hull, Complex z);

/// Input points together with their complex conjugates.
std::vector<Complex> conjugate_closure(std::span<const Complex> points);

/// Arithmetic mean of the vertices; interior for any nondegenerate polygon.
Complex vertex_centroid(std::span<const Complex> hull);

}  // namespace delaysync
