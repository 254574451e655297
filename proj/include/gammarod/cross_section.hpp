#pragma once

#include <Eigen/Core>
#include <vector>

namespace gammarod {

using Vec2 = Eigen::Vector2d;

/// Simple polygon, counterclockwise.
class PolygonSection {
 public:
  /// Validates simplicity and positive area; clockwise input is reversed.
  explicit PolygonSection(std::vector<Vec2> vertices);

  static PolygonSection rectangle(double a, double b);  // side lengths, centered
  static PolygonSection disk(double r, int n_vertices);
  static PolygonSection ellipse(double a, double b, int n_vertices);  // semi-axes

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  bool contains(const Vec2& p) const;
  double distance_to_boundary(const Vec2& p) const;
  double diameter() const;

 private:
  std::vector<Vec2> vertices_;
};

struct SectionProperties {
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();
  double I2 = 0.0;   // int x2^2
  double I3 = 0.0;   // int x3^2
  double I23 = 0.0;  // int x2 x3
  double polar = 0.0;
};

/// x_normalized = Rot(angle) * (x + translation).
struct RigidTransform {
  Vec2 translation = Vec2::Zero();
  double angle = 0.0;
  Vec2 apply(const Vec2& x) const;
};

struct NormalizedSection {
  PolygonSection section;
  RigidTransform transform;
};

/// Exact integral of x^a y^b over the polygon.
double monomial_integral(const PolygonSection& poly, int a, int b);

SectionProperties compute_moments(const PolygonSection& poly);

/// Centroid to origin, principal axes to coordinate axes. Rotation angle in
/// (-pi/4, pi/4]; equal moments with vanishing product moment keep identity.
NormalizedSection normalize_section(const PolygonSection& poly);

}  // namespace gammarod
