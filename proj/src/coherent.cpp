#include "nctk/coherent.hpp"

#include <cmath>
#include <regex>

namespace nctk {

CoherentLabel CoherentLabel::real(const RealVector& x, const PosDefSymMatrix& lambda, double hbar) {
  return complex(x.cast<cplx>(), lambda, hbar);
}

CoherentLabel CoherentLabel::complex(const ComplexVector& z, const PosDefSymMatrix& lambda, double hbar) {
  if (z.size() != lambda.dim()) throw Error(ErrorCode::DimensionMismatch, "label and width dimensions");
  if (!(hbar > 0.0)) throw Error(ErrorCode::InvalidArgument, "hbar must be positive");
  return CoherentLabel{z, lambda, hbar};
}

bool CoherentLabel::is_real(double tol) const { return z.imag().cwiseAbs().maxCoeff() <= tol; }

RealVector CoherentLabel::x() const {
  if (!is_real()) throw Error(ErrorCode::InvalidArgument, "label is complex");
  return z.real();
}

namespace {

void check_pair(const CoherentLabel& a, const CoherentLabel& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "label dimensions differ");
  const double scale = std::max(1.0, a.lambda.matrix().cwiseAbs().maxCoeff());
  if ((a.lambda.matrix() - b.lambda.matrix()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
      a.hbar != b.hbar) {
    throw Error(ErrorCode::MismatchedLambda, "states carry different widths or hbar");
  }
}

void check_field(const FieldConfig& field, int n) {
  if (field.A.dim() != n) throw Error(ErrorCode::DimensionMismatch, "field dimension");
}

double norm_constant(const PosDefSymMatrix& lambda) {
  return 1.0 / std::sqrt(std::pow(2.0 * kPi, lambda.dim()) * lambda.determinant());
}

// ⟨p|z;λ⟩ in closed form, continued to complex p.
cplx psi(const CoherentLabel& s, const ComplexVector& p) {
  const int n = s.dim();
  const double h = s.hbar;
  const cplx phase = -kI * (s.z.transpose() * p).value() / h;
  const cplx damp = -(p.transpose() * s.lambda.matrix().cast<cplx>() * p).value() / (4.0 * h * h);
  return std::pow(2.0 * kPi * h, -0.5 * n) * std::exp(phase + damp);
}

cplx psi(const CoherentLabel& s, const RealVector& p) { return psi(s, ComplexVector(p.cast<cplx>())); }

}  // namespace

cplx overlap(const CoherentLabel& s1, const CoherentLabel& s2) {
  check_pair(s1, s2);
  const ComplexVector d = s1.z.conjugate() - s2.z;
  const cplx q = (d.transpose() * s1.lambda.inverse().cast<cplx>() * d).value();
  return norm_constant(s1.lambda) * std::exp(-0.5 * q);
}

PolyGaussian momentum_wavefunction(const CoherentLabel& s) {
  const int n = s.dim();
  const double h = s.hbar;
  return PolyGaussian((s.lambda.matrix() / (2.0 * h * h)).cast<cplx>(), -kI * s.z / h,
                      std::pow(2.0 * kPi * h, -0.5 * n), Polynomial::constant(n, 1.0));
}

OpTag OpTag::parse(const std::string& text) {
  static const std::regex re(R"(^(XX|PP|X|P)_(\d+)(?:_(\d+))?$|^(X2|P2)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw Error(ErrorCode::UnknownOpTag, "unknown operator tag '" + text + "'");
  OpTag t;
  if (m[4].matched) {
    t.kind = m[4] == "X2" ? OpKind::X2 : OpKind::P2;
    return t;
  }
  const std::string k = m[1];
  const bool two = (k == "XX" || k == "PP");
  if (two != m[3].matched) throw Error(ErrorCode::UnknownOpTag, "wrong index count in '" + text + "'");
  t.kind = k == "X" ? OpKind::X : k == "P" ? OpKind::P : k == "XX" ? OpKind::XX : OpKind::PP;
  t.i = std::stoi(m[2]);
  if (two) t.j = std::stoi(m[3]);
  return t;
}

std::string OpTag::str() const {
  switch (kind) {
    case OpKind::X: return "X_" + std::to_string(i);
    case OpKind::P: return "P_" + std::to_string(i);
    case OpKind::XX: return "XX_" + std::to_string(i) + "_" + std::to_string(j);
    case OpKind::PP: return "PP_" + std::to_string(i) + "_" + std::to_string(j);
    case OpKind::X2: return "X2";
    case OpKind::P2: return "P2";
  }
  return "?";
}

double MatrixElementTable::max_diff(const MatrixElementTable& o) const {
  double d = std::abs(overlap - o.overlap);
  d = std::max(d, (X - o.X).cwiseAbs().maxCoeff());
  d = std::max(d, (XX - o.XX).cwiseAbs().maxCoeff());
  d = std::max(d, std::abs(X2 - o.X2));
  d = std::max(d, (P - o.P).cwiseAbs().maxCoeff());
  d = std::max(d, (PP - o.PP).cwiseAbs().maxCoeff());
  d = std::max(d, std::abs(P2 - o.P2));
  return d;
}

double MatrixElementTable::max_abs() const {
  double d = std::abs(overlap);
  d = std::max(d, X.cwiseAbs().maxCoeff());
  d = std::max(d, XX.cwiseAbs().maxCoeff());
  d = std::max(d, std::abs(X2));
  d = std::max(d, P.cwiseAbs().maxCoeff());
  d = std::max(d, PP.cwiseAbs().maxCoeff());
  return std::max(d, std::abs(P2));
}

MatrixElementTable matrix_elements(const CoherentLabel& s1, const CoherentLabel& s2,
                                   const FieldConfig& field) {
  check_pair(s1, s2);
  const int n = s1.dim();
  check_field(field, n);
  const RealVector x1 = s1.x(), x2 = s2.x();
  const double h = s1.hbar;
  const RealMatrix& li = s1.lambda.inverse();
  const RealMatrix& lam = s1.lambda.matrix();
  const RealMatrix& A = field.A.matrix();
  const RealVector u = li * (x1 - x2);
  const cplx W = overlap(s1, s2);
  // v = (x₁ + x₂) − i A λ⁻¹ (x₁ − x₂)
  const ComplexVector v = (x1 + x2).cast<cplx>() - kI * (A * u).cast<cplx>();

  MatrixElementTable t;
  t.overlap = W;
  t.X = 0.5 * v * W;
  const ComplexMatrix c = 0.25 * lam.cast<cplx>() + 0.5 * kI * A.cast<cplx>() - 0.25 * (A * li * A).cast<cplx>();
  t.XX = (0.25 * v * v.transpose() + c) * W;
  t.X2 = t.XX.trace();
  t.P = kI * h * u.cast<cplx>() * W;
  t.PP = (-h * h * (u * u.transpose() - li)).cast<cplx>() * W;
  t.P2 = t.PP.trace();
  return t;
}

MatrixElementTable matrix_elements_commutative(const CoherentLabel& s1, const CoherentLabel& s2) {
  check_pair(s1, s2);
  const RealVector x1 = s1.x(), x2 = s2.x();
  const double h = s1.hbar;
  const RealMatrix& li = s1.lambda.inverse();
  const RealMatrix& lam = s1.lambda.matrix();
  const RealVector s = x1 + x2;
  const cplx W = overlap(s1, s2);
  // ∂/∂x₁ W_{2λ}(x₁ − x₂) = −λ⁻¹(x₁ − x₂) W
  const RealVector grad = -(li * (x1 - x2));
  const RealMatrix hess = grad * grad.transpose() - li;

  MatrixElementTable t;
  t.overlap = W;
  t.X = 0.5 * s.cast<cplx>() * W;
  t.XX = (0.25 * s * s.transpose() + 0.25 * lam).cast<cplx>() * W;
  t.X2 = ((0.5 * s).squaredNorm() + 0.25 * lam.trace()) * W;
  t.P = -kI * h * grad.cast<cplx>() * W;
  t.PP = (-h * h * hess).cast<cplx>() * W;
  t.P2 = -h * h * hess.trace() * W;
  return t;
}

MatrixElementTable matrix_elements_quadrature(const CoherentLabel& s1, const CoherentLabel& s2,
                                              const FieldConfig& field, const QuadratureOptions& opts) {
  check_pair(s1, s2);
  const int n = s1.dim();
  check_field(field, n);
  const RealVector x1 = s1.x(), x2 = s2.x();
  const double h = s1.hbar;
  const RealMatrix& lam = s1.lambda.matrix();
  const RealMatrix& A = field.A.matrix();
  // x̂ψ₂ = g ψ₂ with g = x₂ − (1/2ħ)(iλ + A)p; x̂_i x̂_j ψ₂ = (g_i g_j + ½λ_ij + (i/2)A_ij)ψ₂
  const ComplexMatrix G = (kI * lam.cast<cplx>() + A.cast<cplx>()) / (2.0 * h);
  const ComplexMatrix cXX = 0.5 * lam.cast<cplx>() + 0.5 * kI * A.cast<cplx>();
  const int nout = 3 + 2 * n + 2 * n * n;
  const double pref = std::pow(2.0 * kPi * h, -n);
  ComplexVector g(n);
  auto f = [&](const RealVector& p, cplx* out) {
    const cplx base = pref * std::exp(cplx(-p.dot(lam * p) / (2.0 * h * h), p.dot(x1 - x2) / h));
    for (int i = 0; i < n; ++i) {
      cplx gi = x2(i);
      for (int k = 0; k < n; ++k) gi -= G(i, k) * p(k);
      g(i) = gi;
    }
    int o = 0;
    out[o++] = base;
    for (int i = 0; i < n; ++i) out[o++] = g(i) * base;
    cplx x2s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const cplx v = (g(i) * g(j) + cXX(i, j)) * base;
        out[o++] = v;
        if (i == j) x2s += v;
      }
    }
    out[o++] = x2s;
    for (int i = 0; i < n; ++i) out[o++] = p(i) * base;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[o++] = p(i) * p(j) * base;
    out[o++] = p.squaredNorm() * base;
  };
  const ComplexVector v =
      integrate_gaussian(RealVector::Zero(n), lam / (h * h), nout, f, opts).value;
  MatrixElementTable t;
  int o = 0;
  t.overlap = v(o++);
  t.X = v.segment(o, n);
  o += n;
  t.XX.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.XX(i, j) = v(o++);
  t.X2 = v(o++);
  t.P = v.segment(o, n);
  o += n;
  t.PP.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.PP(i, j) = v(o++);
  t.P2 = v(o++);
  return t;
}

cplx matrix_element(const OpTag& op, const CoherentLabel& s1, const CoherentLabel& s2,
                    const FieldConfig& field) {
  const int n = s1.dim();
  auto in_range = [&](int k) {
    if (k < 0 || k >= n) throw Error(ErrorCode::UnknownOpTag, "index out of range in " + op.str());
  };
  in_range(op.i);
  if (op.kind == OpKind::XX || op.kind == OpKind::PP) in_range(op.j);
  const MatrixElementTable t = matrix_elements(s1, s2, field);
  switch (op.kind) {
    case OpKind::X: return t.X(op.i);
    case OpKind::XX: return t.XX(op.i, op.j);
    case OpKind::X2: return t.X2;
    case OpKind::P: return t.P(op.i);
    case OpKind::PP: return t.PP(op.i, op.j);
    case OpKind::P2: return t.P2;
  }
  throw Error(ErrorCode::UnknownOpTag, op.str());
}

UncertaintyMatrices uncertainty_matrices(const CoherentLabel& s, const FieldConfig& field) {
  check_field(field, s.dim());
  const RealMatrix& lam = s.lambda.matrix();
  const RealMatrix& li = s.lambda.inverse();
  const RealMatrix& A = field.A.matrix();
  UncertaintyMatrices u;
  u.dx = (0.25 * lam - 0.25 * A * li * A).cast<cplx>() + 0.5 * kI * A.cast<cplx>();
  u.dp = s.hbar * s.hbar * li;
  return u;
}

UncertaintyMatrices uncertainty_matrices_quadrature(const CoherentLabel& s, const FieldConfig& field,
                                                    const QuadratureOptions& opts) {
  const MatrixElementTable t = matrix_elements_quadrature(s, s, field, opts);
  const cplx nrm = t.overlap;
  const ComplexVector mx = t.X / nrm, mp = t.P / nrm;
  UncertaintyMatrices u;
  u.dx = t.XX / nrm - mx * mx.transpose();
  u.dp = (t.PP / nrm - mp * mp.transpose()).real();
  return u;
}

double uncertainty_product_residual(const UncertaintyMatrices& u, const CoherentLabel& s,
                                    const FieldConfig& field) {
  const int n = s.dim();
  const RealMatrix& lam = s.lambda.matrix();
  const RealMatrix& li = s.lambda.inverse();
  const RealMatrix& A = field.A.matrix();
  const ComplexMatrix core = (lam - A * li * A).cast<cplx>() + 2.0 * kI * A.cast<cplx>();
  const double h2 = s.hbar * s.hbar;
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          r = std::max(r, std::abs(u.dx(i, j) * u.dp(k, l) - 0.25 * h2 * li(k, l) * core(i, j)));
  return r;
}

double twisted_eigenstate_residual(const CoherentLabel& s, const FieldConfig& field,
                                   const std::vector<RealVector>& p_grid) {
  const int n = s.dim();
  check_field(field, n);
  const double h = s.hbar;
  const PolyGaussian w = momentum_wavefunction(s);
  const RealMatrix& A = field.A.matrix();
  const ComplexMatrix twist = kI / (2.0 * h) * (s.lambda.matrix().cast<cplx>() - kI * A.cast<cplx>());
  std::vector<PolyGaussian> grad;
  for (int k = 0; k < n; ++k) grad.push_back(w.derivative(k));
  double r = 0.0;
  for (const RealVector& p : p_grid) {
    const cplx v = w(p);
    for (int i = 0; i < n; ++i) {
      // x̂_i ψ = iħ ∂_i ψ − (1/2ħ) A_ij p_j ψ
      cplx xi = kI * h * grad[i](p) - (A.row(i).dot(p)) / (2.0 * h) * v;
      for (int j = 0; j < n; ++j) xi += twist(i, j) * p(j) * v;
      r = std::max(r, std::abs(xi - s.z(i) * v));
    }
  }
  return r;
}

DisplacementResult config_shift(const CoherentLabel& s, const RealVector& a) {
  if (a.size() != s.dim()) throw Error(ErrorCode::DimensionMismatch, "shift dimension");
  DisplacementResult r;
  r.z = s.z + a.cast<cplx>();
  r.phase = 1.0;
  r.residual = "identity";
  return r;
}

DisplacementResult momentum_shift(const CoherentLabel& s, const RealVector& p0, const FieldConfig& field) {
  const int n = s.dim();
  if (p0.size() != n) throw Error(ErrorCode::DimensionMismatch, "shift dimension");
  check_field(field, n);
  const double h = s.hbar;
  const RealVector x = s.x();
  const RealMatrix& lam = s.lambda.matrix();
  DisplacementResult r;
  r.z = (x - field.A.matrix() * p0 / (2.0 * h)).cast<cplx>() + kI * (lam * p0 / (2.0 * h)).cast<cplx>();
  r.phase = std::exp(cplx(-p0.dot(lam * p0) / (4.0 * h * h), p0.dot(x) / h));
  r.residual = "identity";
  return r;
}

cplx momentum_shift_wavefunction(const CoherentLabel& s, const RealVector& p0, const FieldConfig& field,
                                 const RealVector& p) {
  const double h = s.hbar;
  const double a = p0.dot(field.A.matrix() * p);
  return std::exp(cplx(0.0, -a / (2.0 * h * h))) * psi(s, RealVector(p - p0));
}

double momentum_shift_generator_residual(const CoherentLabel& s, const RealVector& p0,
                                         const FieldConfig& field, const std::vector<RealVector>& p_grid,
                                         double s_eval, double h) {
  const int n = s.dim();
  const double hb = s.hbar;
  const RealMatrix& A = field.A.matrix();
  auto phi = [&](double t, const RealVector& p) {
    const DisplacementResult d = momentum_shift(s, RealVector(t * p0), field);
    return d.phase * psi(CoherentLabel{d.z, s.lambda, s.hbar}, p);
  };
  double r = 0.0;
  for (const RealVector& p : p_grid) {
    const cplx dt = (phi(s_eval + h, p) - phi(s_eval - h, p)) / (2.0 * h);
    cplx gen = -kI / (2.0 * hb * hb) * p0.dot(A * p) * phi(s_eval, p);
    for (int k = 0; k < n; ++k) {
      RealVector pp = p, pm = p;
      pp(k) += h;
      pm(k) -= h;
      gen -= p0(k) * (phi(s_eval, pp) - phi(s_eval, pm)) / (2.0 * h);
    }
    r = std::max(r, std::abs(dt - gen));
  }
  return r;
}

MomentumIdentityCheck momentum_from_coherent(const RealVector& p, const PosDefSymMatrix& lambda,
                                             const FieldConfig& field, const PolyGaussian& chi_tilde,
                                             const QuadratureOptions& opts) {
  const int n = lambda.dim();
  if (p.size() != n || chi_tilde.dim() != n) throw Error(ErrorCode::DimensionMismatch, "test state dimension");
  check_field(field, n);
  const double h = field.hbar;
  const RealMatrix& lam = lambda.matrix();
  const RealMatrix& A = field.A.matrix();
  const PolyGaussian chi_c = chi_tilde.conj();

  // Inner integrand in q: χ̃(q)* e^{−i pᵀA q/2ħ²} ⟨q − p|x;λ⟩; Gaussian part −½qᵀQq + ℓᵀq − i x·q/ħ.
  const ComplexMatrix Q = chi_c.quad() + (lam / (2.0 * h * h)).cast<cplx>();
  const ComplexVector ell = chi_c.lin() - kI * (A.transpose() * p).cast<cplx>() / (2.0 * h * h) +
                            (lam * p / (2.0 * h * h)).cast<cplx>();
  const RealMatrix Qr = Q.real();
  const ComplexMatrix Qi = Q.inverse();
  const RealMatrix Pout = Qi.real() / (h * h);
  Eigen::LLT<RealMatrix> llt(Pout);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::QuadratureNotConverged, "outer weight not PD");
  const RealVector xc = llt.solve(RealVector((Qi * ell).imag() / h));

  // The inner integrand is entire in q, so the contour is moved through the complex saddle
  // Q⁻¹(ℓ − ix/ħ); along it the integrand no longer oscillates at large |x|.
  auto outer = [&](const RealVector& x, cplx* out) {
    const CoherentLabel sx = CoherentLabel::real(x, lambda, h);
    const ComplexVector saddle = Qi * (ell - kI * x.cast<cplx>() / h);
    const RealVector shift = saddle.imag();
    auto inner = [&](const RealVector& y, cplx* o) {
      const ComplexVector q = y.cast<cplx>() + kI * shift.cast<cplx>();
      const cplx a = RealVector(A.transpose() * p).cast<cplx>().dot(q);
      o[0] = chi_c(q) * std::exp(-kI * a / (2.0 * h * h)) * psi(sx, ComplexVector(q - p.cast<cplx>()));
    };
    out[0] = integrate_gaussian(RealVector(saddle.real()), Qr, 1, inner, opts).value(0);
  };
  MomentumIdentityCheck c;
  c.lhs = integrate_gaussian(xc, Pout, 1, outer, opts).value(0);
  c.rhs = std::pow(2.0 * kPi * h, 0.5 * n) * std::conj(chi_tilde(p));
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

DisplacementPairing momentum_shift_pairing(const CoherentLabel& s, const RealVector& p0,
                                           const FieldConfig& field, const PolyGaussian& chi_tilde,
                                           const QuadratureOptions& opts) {
  const int n = s.dim();
  const double h = s.hbar;
  const PolyGaussian chi_c = chi_tilde.conj();
  const DisplacementResult d = momentum_shift(s, p0, field);
  const CoherentLabel sz{d.z, s.lambda, s.hbar};
  const RealMatrix Qr = chi_c.quad().real() + s.lambda.matrix() / (2.0 * h * h);
  const RealVector center = Qr.llt().solve(RealVector(chi_c.lin().real() + s.lambda.matrix() * p0 / (2.0 * h * h)));
  auto f = [&](const RealVector& q, cplx* out) {
    const cplx c = chi_c(q);
    out[0] = c * d.phase * psi(sz, q);
    out[1] = c * momentum_shift_wavefunction(s, p0, field, q);
  };
  const ComplexVector v = integrate_gaussian(center, Qr, 2, f, opts).value;
  (void)n;
  return {v(0), v(1)};
}

}  // namespace nctk
