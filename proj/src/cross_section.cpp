#include "gammarod/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gammarod/errors.hpp"
#include "gammarod/quadrature.hpp"

namespace gammarod {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double o = cross(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(o) <= 1e-14 * scale) return 0;
  return o > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orient_sign(a, b, c), o2 = orient_sign(a, b, d);
  const int o3 = orient_sign(c, d, a), o4 = orient_sign(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

}  // namespace

PolygonSection::PolygonSection(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw InvalidGeometry("polygon needs at least 3 vertices");
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.x()) || !std::isfinite(v.y())) {
      throw InvalidGeometry("polygon vertex is not finite");
    }
  }
  double a = signed_area(vertices_);
  double diam = diameter();
  if (!(std::abs(a) > 1e-14 * diam * diam)) throw InvalidGeometry("polygon has zero area");
  if (a < 0) std::reverse(vertices_.begin(), vertices_.end());
  for (std::size_t i = 0; i < n; ++i) {
    if ((vertices_[(i + 1) % n] - vertices_[i]).norm() <= 1e-14 * diam) {
      throw InvalidGeometry("polygon has repeated vertices");
    }
  }
  // Nonadjacent edges must not touch.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                             vertices_[(j + 1) % n])) {
        throw InvalidGeometry("polygon is self-intersecting");
      }
    }
  }
}

PolygonSection PolygonSection::rectangle(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw InvalidGeometry("rectangle sides must be positive");
  return PolygonSection({{-a / 2, -b / 2}, {a / 2, -b / 2}, {a / 2, b / 2}, {-a / 2, b / 2}});
}

PolygonSection PolygonSection::disk(double r, int n_vertices) {
  return ellipse(r, r, n_vertices);
}

PolygonSection PolygonSection::ellipse(double a, double b, int n_vertices) {
  if (!(a > 0) || !(b > 0) || n_vertices < 3) {
    throw InvalidGeometry("ellipse needs positive semi-axes and at least 3 vertices");
  }
  std::vector<Vec2> v(n_vertices);
  for (int i = 0; i < n_vertices; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / n_vertices;
    v[i] = {a * std::cos(phi), b * std::sin(phi)};
  }
  return PolygonSection(std::move(v));
}

bool PolygonSection::contains(const Vec2& p) const {
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double PolygonSection::distance_to_boundary(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    d = std::min(d, point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return d;
}

double PolygonSection::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
      d = std::max(d, (vertices_[i] - vertices_[j]).norm());
    }
  }
  return d;
}

Vec2 RigidTransform::apply(const Vec2& x) const {
  const double c = std::cos(angle), s = std::sin(angle);
  const Vec2 y = x + translation;
  return {c * y.x() - s * y.y(), s * y.x() + c * y.y()};
}

double monomial_integral(const PolygonSection& poly, int a, int b) {
  // Green: int x^a y^b dA = closed integral of x^(a+1) y^b / (a+1) dy.
  const Rule1D rule = gauss_legendre((a + b + 2) / 2 + 1);
  const auto& v = poly.vertices();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    const double dy = q.y() - p.y();
    if (dy == 0.0) continue;
    double edge = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const Vec2 x = p + rule.points[k] * (q - p);
      edge += rule.weights[k] * std::pow(x.x(), a + 1) * std::pow(x.y(), b);
    }
    sum += edge * dy;
  }
  return sum / (a + 1);
}

SectionProperties compute_moments(const PolygonSection& poly) {
  SectionProperties sp;
  sp.area = monomial_integral(poly, 0, 0);
  sp.centroid = Vec2(monomial_integral(poly, 1, 0), monomial_integral(poly, 0, 1)) / sp.area;
  sp.I2 = monomial_integral(poly, 2, 0);
  sp.I3 = monomial_integral(poly, 0, 2);
  sp.I23 = monomial_integral(poly, 1, 1);
  sp.polar = sp.I2 + sp.I3;
  return sp;
}

NormalizedSection normalize_section(const PolygonSection& poly) {
  const SectionProperties sp0 = compute_moments(poly);
  RigidTransform tf;
  tf.translation = -sp0.centroid;
  std::vector<Vec2> shifted;
  shifted.reserve(poly.size());
  for (const auto& v : poly.vertices()) shifted.push_back(v + tf.translation);
  const SectionProperties sp = compute_moments(PolygonSection(shifted));
  const double scale = sp.I2 + sp.I3;
  const double diff = sp.I2 - sp.I3;
  if (std::abs(diff) <= 1e-13 * scale) {
    tf.angle = std::abs(sp.I23) <= 1e-13 * scale ? 0.0 : std::numbers::pi / 4;
  } else {
    // I23 after rotating by phi is 0.5 sin(2 phi)(I2 - I3) + cos(2 phi) I23.
    tf.angle = 0.5 * std::atan(-2.0 * sp.I23 / diff);
  }
  if (tf.angle == 0.0) return {PolygonSection(std::move(shifted)), tf};
  std::vector<Vec2> out;
  out.reserve(poly.size());
  for (const auto& v : poly.vertices()) out.push_back(tf.apply(v));
  return {PolygonSection(std::move(out)), tf};
}

}  // namespace gammarod
