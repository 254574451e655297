#pragma once

#include <Eigen/Core>
#include <array>

namespace gammarod {

using Mat3 = Eigen::Matrix3d;

struct IsotropicMaterial {
  double lambda = 0.0;
  double mu = 0.0;

  static IsotropicMaterial from_young_poisson(double E, double nu);
  /// Young's modulus mu(3 lambda + 2 mu)/(lambda + mu).
  double young() const;
  bool admissible() const { return mu > 0.0 && 3.0 * lambda + 2.0 * mu > 0.0; }
};

/// b[h][k](i, j) = b^{hk}_{ij}, zero-based indices.
struct ElasticityTensor {
  std::array<std::array<Mat3, 3>, 3> b;

  /// sum b^{hk}_{ij} G_ih H_jk
  double bilinear(const Mat3& G, const Mat3& H) const;
};

/// 2 mu |sym G|^2 + lambda (tr G)^2
double q3_apply(const IsotropicMaterial& mat, const Mat3& G);
double q3_apply(const ElasticityTensor& b, const Mat3& G);

/// Saint-Venant-Kirchhoff density with E = F^T F - I:
/// (lambda/8)(tr E)^2 + (mu/4)|E|^2.
double svk_energy(const IsotropicMaterial& mat, const Mat3& F);

/// Second derivative of svk_energy at the identity.
ElasticityTensor b_tensor(const IsotropicMaterial& mat);

/// Lame parameters scaled by s(x) = 1 + g1 x1/L + g2 x2 + g3 x3, where
/// (x2, x3) are section coordinates before the curvature rotation.
class MaterialField {
 public:
  MaterialField() = default;
  explicit MaterialField(IsotropicMaterial base, double length = 1.0,
                         std::array<double, 3> grading = {0.0, 0.0, 0.0});

  IsotropicMaterial at(double x1, double x2, double x3) const;
  double scale(double x1, double x2, double x3) const;
  bool homogeneous() const;
  bool section_homogeneous() const { return grading_[1] == 0.0 && grading_[2] == 0.0; }
  const IsotropicMaterial& base() const { return base_; }
  const std::array<double, 3>& grading() const { return grading_; }

 private:
  IsotropicMaterial base_{};
  double length_ = 1.0;
  std::array<double, 3> grading_{0.0, 0.0, 0.0};
};

}  // namespace gammarod
