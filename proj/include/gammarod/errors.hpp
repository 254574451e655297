#pragma once

#include <stdexcept>
#include <string>

namespace gammarod {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Polygon is degenerate, self-intersecting or otherwise unusable.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Triangulation could not meet its size/angle targets.
class RefinementError : public Error {
 public:
  using Error::Error;
};

/// Cell system singular beyond the expected nullspace.
class MeshError : public Error {
 public:
  using Error::Error;
};

class MaterialPositivityError : public Error {
 public:
  using Error::Error;
};

/// Curvature of the centerline vanishes and no frame was supplied.
class DegenerateCurvature : public Error {
 public:
  using Error::Error;
};

/// Thickness too large: Jacobian of the tube map or of the recovery
/// deformation degenerates.
class GeometryRegimeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IncompatibleLoads : public Error {
 public:
  using Error::Error;
};

}  // namespace gammarod
