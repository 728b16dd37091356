#include "delaysync/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace delaysync {

namespace {

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

double distance_to_segment(Complex a, Complex b, Complex z) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  double t = ((z - a) * std::conj(ab)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace

std::vector<Complex> convex_hull(std::span<const Complex> points, double collinear_tol) {
  std::vector<Complex> pts(points.begin(), points.end());
  if (pts.empty()) return {};
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });

  // Cross products scale with the square of the extent of the set.
  double extent = 0.0;
  for (const auto& p : pts) extent = std::max(extent, std::abs(p - pts.front()));
  const double tol = collinear_tol * std::max(1.0, extent * extent);

  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](Complex a, Complex b) { return std::abs(a - b) <= collinear_tol; }),
            pts.end());
  if (pts.size() == 1) return pts;

  std::vector<Complex> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= tol) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, upper_start = k + 1; i-- > 0;) {
    while (k >= upper_start && cross(hull[k - 2], hull[k - 1], pts[i]) <= tol) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 2) {
    // Collinear input collapses to the two extremes.
    return {pts.front(), pts.back()};
  }
  return hull;
}

bool point_in_convex_polygon(std::span<const Complex> hull, Complex z, double tol) {
  if (hull.empty()) throw std::invalid_argument("point_in_convex_polygon: empty polygon");
  if (hull.size() == 1) return std::abs(z - hull[0]) <= tol;
  if (hull.size() == 2) return distance_to_segment(hull[0], hull[1], z) <= tol;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    const double len = std::abs(b - a);
    if (len == 0.0) continue;
    // Signed distance of z to the left of edge a->b.
    if (cross(a, b, z) / len < -tol) return false;
  }
  return true;
}

double distance_to_boundary(std::span<const Complex> hull, Complex z) {
  if (hull.empty()) throw std::invalid_argument("distance_to_boundary: empty polygon");
  if (hull.size() == 1) return std::abs(z - hull[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    best = std::min(best, distance_to_segment(hull[i], hull[(i + 1) % hull.size()], z));
  }
  return best;
}

std::vector<Complex> conjugate_closure(std::span<const Complex> points) {
  std::vector<Complex> out(points.begin(), points.end());
  for (const auto& p : points) out.push_back(std::conj(p));
  return out;
}

Complex vertex_centroid(std::span<const Complex> hull) {
  if (hull.empty()) throw std::invalid_argument("vertex_centroid: empty polygon");
  Complex sum{0.0, 0.0};
  for (const auto& v : hull) sum += v;
  return sum / static_cast<double>(hull.size());
}

}  // namespace delaysync
