#pragma once

#include <map>
#include <vector>

#include "nctk/types.hpp"

namespace nctk {

using MultiIndex = std::vector<int>;

inline constexpr int kMaxPolyDegree = 16;

/// Sparse complex polynomial in a fixed number of variables.
/// Total degree is capped at kMaxPolyDegree (DegreeTooHigh beyond).
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, cplx>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

  static Polynomial constant(int nvars, cplx c);
  /// The coordinate x_k.
  static Polynomial variable(int nvars, int k);
  /// c + Σ a_k x_k.
  static Polynomial linear(const ComplexVector& a, cplx c = 0.0);
  static Polynomial monomial(const MultiIndex& idx, cplx c = 1.0);

  int nvars() const { return nvars_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const Terms& terms() const { return terms_; }
  cplx coeff(const MultiIndex& idx) const;

  /// Adds c to the coefficient of idx; zero coefficients are dropped.
  void add_term(const MultiIndex& idx, cplx c);

  cplx eval(const ComplexVector& x) const;
  /// Evaluation at a real or complex point.
  template <class Derived>
  cplx operator()(const Eigen::MatrixBase<Derived>& x) const {
    return eval(ComplexVector(x.template cast<cplx>()));
  }

  Polynomial derivative(int k) const;

  /// P(L z + b) as a polynomial in z; L is nvars × m.
  Polynomial substitute(const ComplexMatrix& L, const ComplexVector& b) const;

  /// Removes coefficients with |c| ≤ tol.
  Polynomial pruned(double tol) const;
  double max_abs_coeff() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(cplx s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
  friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  int nvars_;
  Terms terms_;
};

/// Max |a − b| over the union of coefficients.
double max_coeff_diff(const Polynomial& a, const Polynomial& b);

/// P(x) Q(y) as a polynomial in (x, y).
Polynomial tensor_product(const Polynomial& p, const Polynomial& q);

}  // namespace nctk
