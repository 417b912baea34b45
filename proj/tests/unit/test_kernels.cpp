#include <doctest.h>

#include "nctk/kernels.hpp"
#include "nctk/random.hpp"

using namespace nctk;

namespace {
Polynomial var(int n, int k) { return Polynomial::variable(n, k); }

Polynomial random_poly(Rng& rng, int n, int deg) {
  Polynomial p(n);
  MultiIndex idx(n, 0);
  // all monomials of total degree ≤ deg
  std::function<void(int, int)> rec = [&](int k, int left) {
    if (k == n) {
      p.add_term(idx, cplx(rng.normal(), rng.normal()));
      return;
    }
    for (int e = 0; e <= left; ++e) {
      idx[k] = e;
      rec(k + 1, left - e);
    }
    idx[k] = 0;
  };
  rec(0, deg);
  return p;
}
}  // namespace

TEST_CASE("Weierstrass kernel closed values") {
  const PosDefSymMatrix I2 = PosDefSymMatrix::identity(2);
  CHECK(weierstrass(RealVector::Zero(2), I2) == doctest::Approx(0.3183098862).epsilon(1e-10));
  CHECK(weierstrass(RealVector{{1.0, 0.0}}, I2) == doctest::Approx(0.11709966304863834).epsilon(1e-14));
  Rng rng(4);
  const PosDefSymMatrix lam(rng.pos_def(3));
  const RealVector x = rng.normal_vector(3);
  CHECK(weierstrass(x, lam) == weierstrass(RealVector(-x), lam));
}

TEST_CASE("Weierstrass kernel equals its Fourier representation") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const PosDefSymMatrix lam(rng.pos_def(n));
    const RealVector x = rng.normal_vector(n, 0.7);
    const double hbar = rng.uniform(0.5, 2.0);
    CHECK(std::abs(weierstrass(x, lam) - weierstrass_fourier_quadrature(x, lam, hbar)) < 1e-8);
  }
}

TEST_CASE("moments") {
  const PosDefSymMatrix lam(RealVector{{2.0, 4.0}}.asDiagonal().toDenseMatrix());
  CHECK(weierstrass_moments(lam, 0)(0, 0) == 1.0);
  CHECK(weierstrass_moments(lam, 1).cwiseAbs().maxCoeff() == 0.0);
  const RealMatrix m2 = weierstrass_moments(lam, 2);
  CHECK(m2(0, 0) == 1.0);
  CHECK(m2(1, 1) == 2.0);
  CHECK(m2(0, 1) == 0.0);
  CHECK_THROWS_AS(weierstrass_moments(lam, 3), Error);

  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const PosDefSymMatrix l(rng.pos_def(2));
    for (int order = 0; order <= 2; ++order) {
      const RealMatrix q = weierstrass_moments_quadrature(l, order);
      CHECK((q - weierstrass_moments(l, order)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("PDE residual") {
  CHECK(std::abs(weierstrass_pde_residual(RealVector::Zero(2), PosDefSymMatrix::identity(2))) < 1e-12);
  const PosDefSymMatrix lam(RealVector{{1.0, 3.0}}.asDiagonal().toDenseMatrix());
  const RealVector x{{0.7, -0.3}};
  CHECK(std::abs(weierstrass_pde_residual(x, lam)) < 1e-10);
  CHECK(std::abs(weierstrass_pde_residual_fd(x, lam) - weierstrass_pde_residual(x, lam)) < 1e-6);

  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const PosDefSymMatrix l(rng.pos_def(3));
    const RealVector y = rng.normal_vector(3, 0.5);
    CHECK(std::abs(weierstrass_pde_residual(y, l)) < 1e-12 * std::max(1.0, weierstrass(y, l)));
    CHECK(std::abs(weierstrass_pde_residual_fd(y, l)) < 1e-6);
  }
}

TEST_CASE("polynomial star products") {
  RealMatrix l1 = RealMatrix::Identity(1, 1);
  const Polynomial x = var(1, 0);
  const Polynomial sq = star_product_series(x, x, l1);
  CHECK(max_coeff_diff(sq, x * x + Polynomial::constant(1, 0.5)) == 0.0);

  const RealMatrix diag = RealVector{{1.0, 2.0}}.asDiagonal();
  const Polynomial xy = star_product_series(var(2, 0), var(2, 1), diag);
  CHECK(max_coeff_diff(xy, var(2, 0) * var(2, 1)) == 0.0);

  // x1² * x1² = x1⁴ + 2·(2x1)(2x1)/... evaluated exactly by hand:
  // Σ_k (λ/2)^k/k! (d^k x²)(d^k x²) = x⁴ + (λ/2)·4x² + (λ/2)²/2·4
  const Polynomial x2 = x * x;
  const Polynomial s = star_product_series(x2, x2, 0.6 * l1);
  const Polynomial expect = x2 * x2 + cplx(0.3 * 4.0) * x2 + Polynomial::constant(1, 0.09 / 2 * 4);
  CHECK(max_coeff_diff(s, expect) < 1e-15);

  CHECK(max_coeff_diff(star_product_series(x2, x2, RealMatrix::Zero(1, 1)), x2 * x2) == 0.0);
  const Polynomial one = Polynomial::constant(1, 1.0);
  CHECK(max_coeff_diff(star_product_series(one, x2 * x, 2.0 * l1), x2 * x) == 0.0);
}

TEST_CASE("star product algebraic properties") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const RealMatrix lam = rng.pos_def(n);
    const Polynomial f = random_poly(rng, n, 1 + trial % 4);
    const Polynomial g = random_poly(rng, n, 1 + (trial + 1) % 4);
    const Polynomial h = random_poly(rng, n, 1 + (trial + 2) % 4);
    const Polynomial fg = star_product_series(f, g, lam);
    CHECK(max_coeff_diff(fg, star_product_series(g, f, lam)) < 1e-10);
    const Polynomial a = star_product_series(fg, h, lam);
    const Polynomial b = star_product_series(f, star_product_series(g, h, lam), lam);
    CHECK(max_coeff_diff(a, b) < 1e-10 * std::max(1.0, a.max_abs_coeff()));
    const cplx al(0.3, -1.2);
    const Polynomial lin = star_product_series(f * al + h, g, lam);
    CHECK(max_coeff_diff(lin, fg * al + star_product_series(h, g, lam)) < 1e-10 * std::max(1.0, lin.max_abs_coeff()));
    // Gaussian route applied to plain polynomials must agree with the series
    const PolyGaussian viaGauss = star_product_gaussian(PolyGaussian::from_polynomial(f),
                                                        PolyGaussian::from_polynomial(g), lam);
    CHECK(max_coeff_diff(viaGauss.poly() * viaGauss.scalar(), fg) < 1e-10 * std::max(1.0, fg.max_abs_coeff()));
  }
}

TEST_CASE("Gaussian star product against an external double-Fourier reference") {
  // reference from scipy dblquad over (k, q): f = e^{−x²}, g = e^{−(x−1)²/2}, λ = 0.5
  const Polynomial one = Polynomial::constant(1, 1.0);
  const PolyGaussian f(ComplexMatrix::Constant(1, 1, 2.0), ComplexVector::Zero(1), 1.0, one);
  const PolyGaussian g(ComplexMatrix::Constant(1, 1, 1.0), ComplexVector::Constant(1, 1.0),
                       std::exp(-0.5), one);
  const RealMatrix lam = RealMatrix::Constant(1, 1, 0.5);
  const PolyGaussian s = star_product(f, g, lam);
  CHECK(std::abs(s(RealVector::Constant(1, 0.3)) - 0.646558597682122) < 1e-9);
  CHECK(std::abs(s(RealVector::Constant(1, -1.1)) - 0.0807747028072454) < 1e-9);
}

TEST_CASE("Gaussian star product matches the double Fourier quadrature on a grid") {
  Rng rng(17);
  for (int trial = 0; trial < 2; ++trial) {
    const int n = 2;
    const RealMatrix lam = rng.pos_def(n, 0.3, 1.0);
    const Polynomial one = Polynomial::constant(n, 1.0);
    const PolyGaussian f(rng.pos_def(n, 0.5, 1.5).cast<cplx>(), rng.normal_vector(n, 0.3).cast<cplx>(), 1.0, one);
    const PolyGaussian g(rng.pos_def(n, 0.5, 1.5).cast<cplx>(), rng.normal_vector(n, 0.3).cast<cplx>(), 0.8, one);
    const PolyGaussian s = star_product(f, g, lam);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const RealVector x{{-1.0 + 0.5 * i, -1.0 + 0.5 * j}};
        const cplx q = star_product_fourier_quadrature(f, g, lam, x, {1e-11, 10});
        CHECK(std::abs(s(x) - q) < 1e-7);
      }
    }
  }
}

TEST_CASE("equal-width kernels diverge; the mollified identity holds") {
  const PosDefSymMatrix lam = PosDefSymMatrix::identity(1, 0.8);
  const PolyGaussian Wa = weierstrass_gaussian(lam, RealVector::Constant(1, 0.2));
  const PolyGaussian Wb = weierstrass_gaussian(lam, RealVector::Constant(1, -0.4));
  try {
    star_product(Wa, Wb, lam);
    FAIL("expected DivergentStar");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergentStar);
  }

  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    const PosDefSymMatrix l(rng.pos_def(n, 0.4, 1.5));
    const RealVector a = rng.normal_vector(n, 0.5);
    // test function φ = normal density (mean m, covariance Σ)
    const RealVector m = rng.normal_vector(n, 0.5);
    const RealMatrix Sigma = rng.pos_def(n, 0.3, 1.0);
    auto gaussian_density = [&](const RealMatrix& cov, const RealVector& x) {
      const RealVector d = x - m;
      return std::exp(-0.5 * d.dot(cov.inverse() * d)) /
             std::sqrt(std::pow(2 * kPi, n) * cov.determinant());
    };
    // ∫db φ(b) W_λ(x − b) is the density with covariance Σ + λ/2
    const RealMatrix covg = Sigma + 0.5 * l.matrix();
    const RealMatrix ci = covg.inverse();
    const PolyGaussian smeared(ci.cast<cplx>(), (ci * m).cast<cplx>(),
                               std::exp(-0.5 * m.dot(ci * m)) /
                                   std::sqrt(std::pow(2 * kPi, n) * covg.determinant()),
                               Polynomial::constant(n, 1.0));
    const PolyGaussian lhs = star_product(weierstrass_gaussian(l, a), smeared, l);
    for (int k = 0; k < 5; ++k) {
      const RealVector x = rng.normal_vector(n, 0.8);
      const double rhs = weierstrass(RealVector(x - a), l) * gaussian_density(Sigma, a);
      CHECK(std::abs(lhs(x) - rhs) < 1e-7);
    }
  }
}

TEST_CASE("commutative limit") {
  const RealMatrix l0 = RealMatrix::Identity(2, 2);
  const Polynomial x1sq = var(2, 0) * var(2, 0);
  const auto rep = star_commutative_limit_check(x1sq, x1sq, l0, {1e-1, 1e-3, 1e-5, 1e-7, 1e-11});
  CHECK(rep.monotone);
  CHECK(rep.final_deviation < 1e-10);
  CHECK(rep.deviations[0] == doctest::Approx(0.2).epsilon(1e-12));  // (ε/2)·4 with coefficient of x²

  Rng rng(41);
  const Polynomial f = random_poly(rng, 2, 3), g = random_poly(rng, 2, 3);
  const auto r2 = star_commutative_limit_check(f, g, rng.pos_def(2), {1e-4, 5e-5});
  const double ratio = r2.deviations[0] / r2.deviations[1];
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);

  const Polynomial one = Polynomial::constant(2, 1.0);
  const auto r3 = star_commutative_limit_check(one, f, l0, {1.0, 0.5});
  CHECK(r3.deviations[0] == 0.0);
}
