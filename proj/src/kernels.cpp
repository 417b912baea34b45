#include "nctk/kernels.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

namespace nctk {

double weierstrass(const RealVector& x, const PosDefSymMatrix& lambda) {
  const int n = lambda.dim();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "point and width dimensions differ");
  const double q = x.dot(lambda.inverse() * x);
  return std::exp(-q) / std::sqrt(std::pow(kPi, n) * lambda.determinant());
}

RealMatrix weierstrass_moments(const PosDefSymMatrix& lambda, int order) {
  const int n = lambda.dim();
  switch (order) {
    case 0: return RealMatrix::Ones(1, 1);
    case 1: return RealMatrix::Zero(n, 1);
    case 2: return 0.5 * lambda.matrix();
    default:
      throw Error(ErrorCode::UnsupportedOrder, "moment order " + std::to_string(order));
  }
}

double weierstrass_pde_residual(const RealVector& x, const PosDefSymMatrix& lambda) {
  const int n = lambda.dim();
  const RealMatrix& li = lambda.inverse();
  const double w = weierstrass(x, lambda);
  const RealVector u = li * x;
  // ∂_i∂_j W = (4 u_i u_j − 2 λ⁻¹_ij) W
  const RealMatrix hess = (4.0 * u * u.transpose() - 2.0 * li) * w;
  const double lap = (lambda.matrix().cwiseProduct(hess)).sum();
  return -lap + (4.0 * x.dot(u) - 2.0 * n) * w;
}

double weierstrass_pde_residual_fd(const RealVector& x, const PosDefSymMatrix& lambda, double h) {
  const int n = lambda.dim();
  auto W = [&](const RealVector& y) { return weierstrass(y, lambda); };
  const double w0 = W(x);
  double lap = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d2;
      if (i == j) {
        RealVector p = x, m = x;
        p(i) += h;
        m(i) -= h;
        d2 = (W(p) - 2.0 * w0 + W(m)) / (h * h);
      } else {
        RealVector pp = x, pm = x, mp = x, mm = x;
        pp(i) += h, pp(j) += h;
        pm(i) += h, pm(j) -= h;
        mp(i) -= h, mp(j) += h;
        mm(i) -= h, mm(j) -= h;
        d2 = (W(pp) - W(pm) - W(mp) + W(mm)) / (4.0 * h * h);
      }
      lap += lambda.matrix()(i, j) * d2;
    }
  }
  return -lap + (4.0 * x.dot(lambda.inverse() * x) - 2.0 * n) * w0;
}

double weierstrass_fourier_quadrature(const RealVector& x, const PosDefSymMatrix& lambda, double hbar,
                                      const QuadratureOptions& opts) {
  const int n = lambda.dim();
  const RealMatrix prec = lambda.matrix() / (2.0 * hbar * hbar);
  const double pref = std::pow(2.0 * kPi * hbar, -n);
  auto f = [&](const RealVector& p, cplx* out) {
    const double e = -p.dot(lambda.matrix() * p) / (4.0 * hbar * hbar);
    out[0] = pref * std::exp(cplx(e, x.dot(p) / hbar));
  };
  return integrate_gaussian(RealVector::Zero(n), prec, 1, f, opts).value(0).real();
}

RealMatrix weierstrass_moments_quadrature(const PosDefSymMatrix& lambda, int order,
                                          const QuadratureOptions& opts) {
  const int n = lambda.dim();
  if (order < 0 || order > 2) {
    throw Error(ErrorCode::UnsupportedOrder, "moment order " + std::to_string(order));
  }
  const int nout = order == 0 ? 1 : (order == 1 ? n : n * n);
  auto f = [&](const RealVector& x, cplx* out) {
    const double w = weierstrass(x, lambda);
    if (order == 0) {
      out[0] = w;
    } else if (order == 1) {
      for (int i = 0; i < n; ++i) out[i] = w * x(i);
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = w * x(i) * x(j);
    }
  };
  const ComplexVector v =
      integrate_gaussian(RealVector::Zero(n), 2.0 * lambda.inverse(), nout, f, opts).value;
  if (order == 0) return RealMatrix::Constant(1, 1, v(0).real());
  if (order == 1) return v.real();
  RealMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j).real();
  return m;
}

namespace {

void check_lambda(const RealMatrix& lambda, int n) {
  if (lambda.rows() != n || lambda.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "width matrix dimension");
  }
  if ((lambda - lambda.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::NotPositiveDefinite, "width matrix is not symmetric");
  }
}

// S = [I; I]: restriction of (x, y) to the diagonal y = x.
ComplexMatrix diagonal_embedding(int n) {
  ComplexMatrix S(2 * n, n);
  S << ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(n, n);
  return S;
}

}  // namespace

Polynomial star_product_series(const Polynomial& f, const Polynomial& g, const RealMatrix& lambda) {
  const int n = f.nvars();
  if (g.nvars() != n) throw Error(ErrorCode::DimensionMismatch, "star operands");
  check_lambda(lambda, n);
  Polynomial term = tensor_product(f, g);
  Polynomial sum = term;
  // D = ½ λ_ij ∂_{x_i} ∂_{y_j}; the series terminates once D^k vanishes.
  for (int k = 1; !term.is_zero(); ++k) {
    Polynomial next(2 * n);
    for (int i = 0; i < n; ++i) {
      const Polynomial di = term.derivative(i);
      if (di.is_zero()) continue;
      for (int j = 0; j < n; ++j) {
        const double l = lambda(i, j);
        if (l == 0.0) continue;
        next += di.derivative(n + j) * cplx(0.5 * l);
      }
    }
    term = next * cplx(1.0 / k);
    sum += term;
  }
  return sum.substitute(diagonal_embedding(n), ComplexVector::Zero(2 * n));
}

PolyGaussian star_product_gaussian(const PolyGaussian& f, const PolyGaussian& g,
                                   const RealMatrix& lambda) {
  const int n = f.dim();
  if (g.dim() != n) throw Error(ErrorCode::DimensionMismatch, "star operands");
  check_lambda(lambda, n);
  const int m = 2 * n;

  ComplexMatrix G = ComplexMatrix::Zero(m, m);
  G.topLeftCorner(n, n) = f.quad();
  G.bottomRightCorner(n, n) = g.quad();
  ComplexVector h0(m);
  h0 << f.lin(), g.lin();
  ComplexMatrix K = ComplexMatrix::Zero(m, m);
  K.topRightCorner(n, n) = 0.5 * lambda.cast<cplx>();
  K.bottomLeftCorner(n, n) = 0.5 * lambda.cast<cplx>();

  // Fourier-domain convergence: (G⁻¹ + K) must stay positive definite when
  // both factors are decaying real Gaussians.
  const bool real_decaying = G.imag().cwiseAbs().maxCoeff() == 0.0 &&
                             Eigen::LLT<RealMatrix>(G.real()).info() == Eigen::Success &&
                             G.real().llt().rcond() > 1e-14;
  if (real_decaying) {
    const RealMatrix F = G.real().inverse() + K.real();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (F + F.transpose()));
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::DivergentStar, "Fourier quadratic form is not positive definite");
    }
  }

  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  const ComplexMatrix IKG = I + K * G;
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(K * G, false);
  cplx sqrt_det = 1.0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const cplx e = 1.0 + ces.eigenvalues()(i);
    min_abs = std::min(min_abs, std::abs(e));
    sqrt_det *= std::sqrt(e);
  }
  if (min_abs < 1e-12) {
    throw Error(ErrorCode::DivergentStar, "I + K G is singular");
  }
  Eigen::PartialPivLU<ComplexMatrix> lu_ikg(IKG);
  const ComplexMatrix B = lu_ikg.solve(I).transpose();  // (I + G K)⁻¹ = ((I + K G)⁻¹)ᵀ
  const ComplexMatrix Gp = G * lu_ikg.solve(I);
  ComplexMatrix C = K * B;
  C = (0.5 * (C + C.transpose())).eval();
  const ComplexVector hp = B * h0;

  // P(∂_h) acting on exp(hᵀBᵀz + ½hᵀCh): Q_{α+e_k} = w_k Q_α + C_kl ∂_l Q_α.
  const Polynomial Pz = tensor_product(f.poly(), g.poly());
  std::map<MultiIndex, Polynomial> memo;
  memo.emplace(MultiIndex(m, 0), Polynomial::constant(m, 1.0));
  std::function<const Polynomial&(const MultiIndex&)> Q = [&](const MultiIndex& a) -> const Polynomial& {
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    int k = 0;
    while (a[k] == 0) ++k;
    MultiIndex prev = a;
    prev[k] -= 1;
    const Polynomial base = Q(prev);
    Polynomial next = Polynomial::variable(m, k) * base;
    for (int l = 0; l < m; ++l) {
      if (C(k, l) == cplx(0.0)) continue;
      next += base.derivative(l) * C(k, l);
    }
    return memo.emplace(a, std::move(next)).first->second;
  };
  Polynomial Rw(m);
  for (const auto& [a, c] : Pz.terms()) Rw += Q(a) * c;

  const ComplexMatrix S = diagonal_embedding(n);
  const Polynomial poly = Rw.substitute(B.transpose() * S, C * h0);
  const ComplexMatrix quad = S.transpose() * Gp * S;
  const ComplexVector lin = S.transpose() * hp;
  const cplx expo = 0.5 * (h0.transpose() * C * h0).value();
  const cplx scalar = f.scalar() * g.scalar() * std::exp(expo) / sqrt_det;
  return PolyGaussian(quad, lin, scalar, poly);
}

PolyGaussian star_product(const PolyGaussian& f, const PolyGaussian& g, const RealMatrix& lambda) {
  if (f.is_polynomial() && g.is_polynomial()) {
    const Polynomial p = star_product_series(f.poly() * f.scalar(), g.poly() * g.scalar(), lambda);
    return PolyGaussian::from_polynomial(p);
  }
  return star_product_gaussian(f, g, lambda);
}

PolyGaussian star_product(const PolyGaussian& f, const PolyGaussian& g, const PosDefSymMatrix& lambda) {
  return star_product(f, g, lambda.matrix());
}

cplx star_product_fourier_quadrature(const PolyGaussian& f, const PolyGaussian& g,
                                     const RealMatrix& lambda, const RealVector& x,
                                     const QuadratureOptions& opts) {
  const int n = f.dim();
  if (!f.poly().is_constant() || !g.poly().is_constant()) {
    throw Error(ErrorCode::InvalidArgument, "Fourier oracle handles pure Gaussians only");
  }
  if (f.quad().imag().cwiseAbs().maxCoeff() != 0.0 || g.quad().imag().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "Fourier oracle needs real quadratic parts");
  }
  const RealMatrix Mf = f.quad().real(), Mg = g.quad().real();
  const RealMatrix Mfi = Mf.inverse(), Mgi = Mg.inverse();
  const cplx cf0 = f.scalar() * f.poly().coeff(MultiIndex(n, 0));
  const cplx cg0 = g.scalar() * g.poly().coeff(MultiIndex(n, 0));
  // f̃(k) = ∫dx f(x) e^{−ik·x} = s (2π)^{N/2} det(M)^{−1/2} exp(½(c − ik)ᵀM⁻¹(c − ik))
  const double nf = std::pow(2.0 * kPi, 0.5 * n) / std::sqrt(Mf.determinant());
  const double ng = std::pow(2.0 * kPi, 0.5 * n) / std::sqrt(Mg.determinant());
  const double pref = std::pow(2.0 * kPi, -2.0 * n);
  RealMatrix P(2 * n, 2 * n);
  P << Mfi, 0.5 * lambda, 0.5 * lambda, Mgi;
  RealVector b(2 * n);
  b << Mfi * f.lin().imag(), Mgi * g.lin().imag();
  Eigen::LLT<RealMatrix> llt(P);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::DivergentStar, "double Fourier integral diverges");
  }
  const RealVector center = llt.solve(b);
  // exponent = const + ℓᵀy − ½ yᵀPy with ℓ = (−i M_f⁻¹c_f + i x, −i M_g⁻¹c_g + i x)
  ComplexVector ell(2 * n);
  ell << -kI * (Mfi.cast<cplx>() * f.lin()) + kI * x.cast<cplx>(),
      -kI * (Mgi.cast<cplx>() * g.lin()) + kI * x.cast<cplx>();
  const cplx e0 = 0.5 * (f.lin().transpose() * Mfi.cast<cplx>() * f.lin()).value() +
                  0.5 * (g.lin().transpose() * Mgi.cast<cplx>() * g.lin()).value();
  const cplx amp = pref * cf0 * cg0 * nf * ng;
  const int m = 2 * n;
  auto F = [&](const RealVector& y, cplx* out) {
    cplx e = e0;
    double quad = 0.0;
    for (int i = 0; i < m; ++i) {
      e += ell(i) * y(i);
      double row = 0.0;
      for (int j = 0; j < m; ++j) row += P(i, j) * y(j);
      quad += y(i) * row;
    }
    out[0] = amp * std::exp(e - 0.5 * quad);
  };
  return integrate_gaussian(center, P, 1, F, opts).value(0);
}

CommutativeLimitReport star_commutative_limit_check(const Polynomial& f, const Polynomial& g,
                                                    const RealMatrix& lambda0,
                                                    const std::vector<double>& schedule) {
  CommutativeLimitReport rep;
  const Polynomial pointwise = f * g;
  for (double eps : schedule) {
    const double dev = max_coeff_diff(star_product_series(f, g, eps * lambda0), pointwise);
    if (!rep.deviations.empty() && dev > rep.deviations.back()) rep.monotone = false;
    rep.scales.push_back(eps);
    rep.deviations.push_back(dev);
  }
  rep.final_deviation = rep.deviations.empty() ? 0.0 : rep.deviations.back();
  return rep;
}

}  // namespace nctk
