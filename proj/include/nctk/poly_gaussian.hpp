#pragma once

#include <string>

#include "nctk/polynomial.hpp"

namespace nctk {

/// f(x) = scalar · P(x) · exp(−½ xᵀ M x + cᵀ x), M complex symmetric.
/// Closed under products, shifts, linear substitutions and the *_λ product.
class PolyGaussian {
 public:
  explicit PolyGaussian(int dim = 0);
  PolyGaussian(ComplexMatrix quad, ComplexVector lin, cplx scalar, Polynomial poly);

  static PolyGaussian from_polynomial(const Polynomial& p);
  static PolyGaussian constant(int dim, cplx c);

  int dim() const { return static_cast<int>(lin_.size()); }
  const ComplexMatrix& quad() const { return quad_; }
  const ComplexVector& lin() const { return lin_; }
  cplx scalar() const { return scalar_; }
  const Polynomial& poly() const { return poly_; }

  /// True when M = 0 and c = 0 (a plain polynomial).
  bool is_polynomial() const;

  cplx eval(const ComplexVector& x) const;
  /// Evaluation at a real or complex point.
  template <class Derived>
  cplx operator()(const Eigen::MatrixBase<Derived>& x) const {
    return eval(ComplexVector(x.template cast<cplx>()));
  }

  PolyGaussian scaled(cplx s) const;
  PolyGaussian conj() const;
  /// Pointwise product.
  PolyGaussian times(const PolyGaussian& o) const;
  PolyGaussian times(const Polynomial& p) const;
  /// ∂f/∂x_k.
  PolyGaussian derivative(int k) const;
  /// x ↦ f(x − a).
  PolyGaussian shifted(const ComplexVector& a) const;

  /// Equal Gaussian parts (within tol) are required for sums.
  bool same_gaussian(const PolyGaussian& o, double tol = 1e-14) const;
  PolyGaussian plus(const PolyGaussian& o) const;

 private:
  ComplexMatrix quad_;
  ComplexVector lin_;
  cplx scalar_ = 1.0;
  Polynomial poly_;
};

/// Normalized Gaussian exp(−xᵀλ⁻¹x)/√(πᴺ det λ) centred at a.
PolyGaussian weierstrass_gaussian(const PosDefSymMatrix& lambda, const RealVector& center);

std::string to_json(const PolyGaussian& f);
PolyGaussian poly_gaussian_from_json(const std::string& text);

}  // namespace nctk
