#include "nctk/poly_gaussian.hpp"

#include <cmath>

#include "nctk/json_io.hpp"

namespace nctk {

PolyGaussian::PolyGaussian(int dim)
    : quad_(ComplexMatrix::Zero(dim, dim)),
      lin_(ComplexVector::Zero(dim)),
      scalar_(1.0),
      poly_(Polynomial::constant(dim, 1.0)) {}

PolyGaussian::PolyGaussian(ComplexMatrix quad, ComplexVector lin, cplx scalar, Polynomial poly)
    : quad_(std::move(quad)), lin_(std::move(lin)), scalar_(scalar), poly_(std::move(poly)) {
  const auto n = lin_.size();
  if (quad_.rows() != n || quad_.cols() != n || poly_.nvars() != n) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent PolyGaussian shapes");
  }
  quad_ = (0.5 * (quad_ + quad_.transpose())).eval();
}

PolyGaussian PolyGaussian::from_polynomial(const Polynomial& p) {
  const int n = p.nvars();
  return PolyGaussian(ComplexMatrix::Zero(n, n), ComplexVector::Zero(n), 1.0, p);
}

PolyGaussian PolyGaussian::constant(int dim, cplx c) {
  return from_polynomial(Polynomial::constant(dim, c));
}

bool PolyGaussian::is_polynomial() const {
  return quad_.cwiseAbs().maxCoeff() == 0.0 && lin_.cwiseAbs().maxCoeff() == 0.0;
}

cplx PolyGaussian::eval(const ComplexVector& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "evaluation point size");
  const cplx expo = -0.5 * (x.transpose() * quad_ * x).value() + (lin_.transpose() * x).value();
  return scalar_ * poly_.eval(x) * std::exp(expo);
}

PolyGaussian PolyGaussian::scaled(cplx s) const {
  PolyGaussian f = *this;
  f.scalar_ *= s;
  return f;
}

PolyGaussian PolyGaussian::conj() const {
  Polynomial p(dim());
  for (const auto& [idx, c] : poly_.terms()) p.add_term(idx, std::conj(c));
  return PolyGaussian(quad_.conjugate(), lin_.conjugate(), std::conj(scalar_), p);
}

PolyGaussian PolyGaussian::times(const PolyGaussian& o) const {
  if (o.dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "PolyGaussian product");
  return PolyGaussian(quad_ + o.quad_, lin_ + o.lin_, scalar_ * o.scalar_, poly_ * o.poly_);
}

PolyGaussian PolyGaussian::times(const Polynomial& p) const {
  PolyGaussian f = *this;
  f.poly_ = poly_ * p;
  return f;
}

PolyGaussian PolyGaussian::derivative(int k) const {
  ComplexVector a = -quad_.row(k).transpose();
  Polynomial grad = Polynomial::linear(a, lin_(k));
  PolyGaussian f = *this;
  f.poly_ = poly_.derivative(k) + poly_ * grad;
  return f;
}

PolyGaussian PolyGaussian::shifted(const ComplexVector& a) const {
  const int n = dim();
  if (a.size() != n) throw Error(ErrorCode::DimensionMismatch, "shift size");
  PolyGaussian f = *this;
  f.lin_ = lin_ + quad_ * a;
  const cplx e = -0.5 * (a.transpose() * quad_ * a).value() - (lin_.transpose() * a).value();
  f.scalar_ = scalar_ * std::exp(e);
  f.poly_ = poly_.substitute(ComplexMatrix::Identity(n, n), -a);
  return f;
}

bool PolyGaussian::same_gaussian(const PolyGaussian& o, double tol) const {
  return o.dim() == dim() && (quad_ - o.quad_).cwiseAbs().maxCoeff() <= tol &&
         (lin_ - o.lin_).cwiseAbs().maxCoeff() <= tol;
}

PolyGaussian PolyGaussian::plus(const PolyGaussian& o) const {
  if (!same_gaussian(o, 1e-12 * std::max(1.0, quad_.cwiseAbs().maxCoeff()))) {
    throw Error(ErrorCode::InvalidArgument, "sum of PolyGaussians with different Gaussian parts");
  }
  Polynomial p = poly_ * scalar_ + o.poly_ * o.scalar_;
  return PolyGaussian(quad_, lin_, 1.0, p);
}

PolyGaussian weierstrass_gaussian(const PosDefSymMatrix& lambda, const RealVector& center) {
  const int n = lambda.dim();
  if (center.size() != n) throw Error(ErrorCode::DimensionMismatch, "centre size");
  const RealMatrix& li = lambda.inverse();
  const double norm = 1.0 / std::sqrt(std::pow(kPi, n) * lambda.determinant());
  const double e = -center.dot(li * center);
  return PolyGaussian((2.0 * li).cast<cplx>(), (2.0 * li * center).cast<cplx>(),
                      norm * std::exp(e), Polynomial::constant(n, 1.0));
}

std::string to_json(const PolyGaussian& f) {
  json j;
  j["quad"] = complex_matrix_to_json(f.quad());
  j["lin"] = complex_vector_to_json(f.lin());
  j["scalar"] = complex_to_json(f.scalar());
  json poly = json::array();
  for (const auto& [idx, c] : f.poly().terms()) {
    poly.push_back({{"idx", idx}, {"coeff", complex_to_json(c)}});
  }
  j["poly"] = poly;
  return j.dump();
}

PolyGaussian poly_gaussian_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    ComplexMatrix quad = complex_matrix_from_json(j.at("quad"));
    ComplexVector lin = complex_vector_from_json(j.at("lin"));
    const int n = static_cast<int>(lin.size());
    if (quad.size() == 0) quad = ComplexMatrix::Zero(n, n);
    cplx scalar = j.contains("scalar") ? complex_from_json(j.at("scalar")) : cplx(1.0);
    Polynomial p(n);
    if (j.contains("poly")) {
      for (const auto& t : j.at("poly")) {
        p.add_term(t.at("idx").get<MultiIndex>(), complex_from_json(t.at("coeff")));
      }
    } else {
      p = Polynomial::constant(n, 1.0);
    }
    return PolyGaussian(quad, lin, scalar, p);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace nctk
