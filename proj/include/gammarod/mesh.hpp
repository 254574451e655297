#pragma once

#include <array>
#include <vector>

#include "gammarod/cross_section.hpp"

namespace gammarod {

struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<std::array<int, 2>> boundary_edges;

  double triangle_area(int t) const;
  double total_area() const;
  double max_edge() const;
  double min_angle() const;  // radians
};

struct MeshOptions {
  double min_angle_deg = 20.0;
  double max_edge_factor = 1.5;
  int max_insertions = 2000000;
};

/// Conforming Delaunay triangulation refined to max edge <= 1.5*target and
/// min angle >= 20 degrees.
TriMesh triangulate(const PolygonSection& poly, double target_edge_length,
                    const MeshOptions& opts = {});

}  // namespace gammarod
