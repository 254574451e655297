#include <gtest/gtest.h>

#include <cmath>

#include "gammarod/errors.hpp"
#include "gammarod/mesh.hpp"

using namespace gammarod;

namespace {

void check_quality(const PolygonSection& poly, double target) {
  const TriMesh m = triangulate(poly, target);
  double area = 0;
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    EXPECT_GT(m.triangle_area(t), 0.0);
    area += m.triangle_area(t);
  }
  double exact = 0;
  const auto& v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    exact += 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  EXPECT_NEAR(area, exact, 1e-10 * exact);
  EXPECT_GE(m.min_angle() * 180 / M_PI, 20.0 - 1e-9);
  EXPECT_LE(m.max_edge(), 1.5 * target + 1e-12);
  EXPECT_FALSE(m.boundary_edges.empty());
}

}  // namespace

TEST(Mesh, Square) { check_quality(PolygonSection::rectangle(1, 1), 0.05); }
TEST(Mesh, Disk) { check_quality(PolygonSection::disk(1.0, 256), 0.06); }
TEST(Mesh, Ellipse) { check_quality(PolygonSection::ellipse(1.0, 0.5, 128), 0.05); }
TEST(Mesh, LShape) {
  check_quality(PolygonSection({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}), 0.1);
}

TEST(Mesh, BoundaryEdgesCoverPerimeter) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.1);
  double perimeter = 0;
  for (const auto& e : m.boundary_edges) perimeter += (m.nodes[e[0]] - m.nodes[e[1]]).norm();
  EXPECT_NEAR(perimeter, 4.0, 1e-12);
}

TEST(Mesh, Errors) {
  EXPECT_THROW(triangulate(PolygonSection::rectangle(1, 1), 0.0), RefinementError);
  EXPECT_THROW(triangulate(PolygonSection::rectangle(1, 1), 5.0), RefinementError);
  // 11 degree corner cannot meet a 20 degree minimum angle.
  EXPECT_THROW(triangulate(PolygonSection({{0, 0}, {1, 0}, {0.0, 0.2}}), 0.05), RefinementError);
}

TEST(Mesh, CoarseSquareTiling) {
  const TriMesh m = triangulate(PolygonSection::rectangle(1, 1), 0.5);
  EXPECT_GE(m.triangles.size(), 8u);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
}

TEST(Mesh, DiskAreaConverges) {
  const TriMesh m = triangulate(PolygonSection::disk(1.0, 512), 0.05);
  EXPECT_NEAR(m.total_area() / M_PI, 1.0, 2e-3);
}

TEST(Mesh, MomentsAgreeWithMeshQuadrature) {
  const PolygonSection e = PolygonSection::ellipse(1.0, 0.5, 64);
  const TriMesh m = triangulate(e, 0.05);
  double I2 = 0;
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const auto& tri = m.triangles[t];
    // Exact for quadratics: edge-midpoint rule.
    for (int k = 0; k < 3; ++k) {
      const Vec2 mid = 0.5 * (m.nodes[tri[k]] + m.nodes[tri[(k + 1) % 3]]);
      I2 += m.triangle_area(t) / 3 * mid.x() * mid.x();
    }
  }
  EXPECT_NEAR(I2, compute_moments(e).I2, 1e-12);
}
