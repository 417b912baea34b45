#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "nctk/error.hpp"

namespace nctk {

using cplx = std::complex<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Real symmetric positive definite matrix (length² scales such as λ).
/// Validated on construction; inverse and determinant are cached.
class PosDefSymMatrix {
 public:
  explicit PosDefSymMatrix(const RealMatrix& m, double sym_tol = 1e-12);

  static PosDefSymMatrix identity(int n, double scale = 1.0);

  int dim() const { return static_cast<int>(m_.rows()); }
  const RealMatrix& matrix() const { return m_; }
  const RealMatrix& inverse() const { return inv_; }
  double determinant() const { return det_; }
  double min_eigenvalue() const { return min_eig_; }

  PosDefSymMatrix scaled(double s) const { return PosDefSymMatrix(m_ * s); }

 private:
  RealMatrix m_;
  RealMatrix inv_;
  double det_ = 0.0;
  double min_eig_ = 0.0;
};

/// Real antisymmetric matrix; exactly antisymmetrized on construction.
class AntisymMatrix {
 public:
  explicit AntisymMatrix(const RealMatrix& m, double tol = 1e-12);

  static AntisymMatrix zero(int n) { return AntisymMatrix(RealMatrix::Zero(n, n)); }
  /// θ·ε on each consecutive 2-plane, with ε_{12} = +1.
  static AntisymMatrix canonical(const RealVector& thetas);

  int dim() const { return static_cast<int>(m_.rows()); }
  const RealMatrix& matrix() const { return m_; }
  bool is_zero() const { return m_.cwiseAbs().maxCoeff() == 0.0; }

 private:
  RealMatrix m_;
};

/// Constant conjugate field together with ħ (quantum-scaled A = ħ Ā).
struct FieldConfig {
  AntisymMatrix A;
  double hbar = 1.0;
};

}  // namespace nctk
