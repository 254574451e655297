#include "gammarod/material.hpp"

#include "gammarod/errors.hpp"

namespace gammarod {

IsotropicMaterial IsotropicMaterial::from_young_poisson(double E, double nu) {
  if (!(E > 0) || !(nu > -1.0) || !(nu < 0.5)) {
    throw ConfigError("Young's modulus must be positive and Poisson's ratio in (-1, 0.5)");
  }
  return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

double IsotropicMaterial::young() const { return mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu); }

double ElasticityTensor::bilinear(const Mat3& G, const Mat3& H) const {
  double s = 0.0;
  for (int h = 0; h < 3; ++h) {
    for (int k = 0; k < 3; ++k) {
      const Mat3& B = b[h][k];
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) s += B(i, j) * G(i, h) * H(j, k);
      }
    }
  }
  return s;
}

double q3_apply(const IsotropicMaterial& mat, const Mat3& G) {
  const Mat3 s = 0.5 * (G + G.transpose());
  const double tr = G.trace();
  return 2.0 * mat.mu * s.squaredNorm() + mat.lambda * tr * tr;
}

double q3_apply(const ElasticityTensor& b, const Mat3& G) { return b.bilinear(G, G); }

double svk_energy(const IsotropicMaterial& mat, const Mat3& F) {
  const Mat3 E = F.transpose() * F - Mat3::Identity();
  const double tr = E.trace();
  return mat.lambda / 8.0 * tr * tr + mat.mu / 4.0 * E.squaredNorm();
}

ElasticityTensor b_tensor(const IsotropicMaterial& mat) {
  ElasticityTensor t;
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int h = 0; h < 3; ++h) {
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          t.b[h][k](i, j) = mat.lambda * d(i, h) * d(j, k) +
                            mat.mu * (d(i, j) * d(h, k) + d(i, k) * d(j, h));
        }
      }
    }
  }
  return t;
}

MaterialField::MaterialField(IsotropicMaterial base, double length, std::array<double, 3> grading)
    : base_(base), length_(length), grading_(grading) {
  if (!base_.admissible()) {
    throw MaterialPositivityError("material needs mu > 0 and 3 lambda + 2 mu > 0");
  }
  if (!(length_ > 0)) throw ConfigError("material grading length must be positive");
}

double MaterialField::scale(double x1, double x2, double x3) const {
  return 1.0 + grading_[0] * x1 / length_ + grading_[1] * x2 + grading_[2] * x3;
}

IsotropicMaterial MaterialField::at(double x1, double x2, double x3) const {
  const double s = scale(x1, x2, x3);
  return {base_.lambda * s, base_.mu * s};
}

bool MaterialField::homogeneous() const {
  return grading_[0] == 0.0 && grading_[1] == 0.0 && grading_[2] == 0.0;
}

}  // namespace gammarod
