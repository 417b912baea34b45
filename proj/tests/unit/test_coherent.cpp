#include <doctest.h>

#include "nctk/coherent.hpp"
#include "nctk/random.hpp"

using namespace nctk;

namespace {
RealMatrix eps2() { return RealMatrix{{0.0, 1.0}, {-1.0, 0.0}}; }

FieldConfig field_of(const RealMatrix& A, double hbar = 1.0) { return FieldConfig{AntisymMatrix(A), hbar}; }

std::vector<RealVector> p_grid(int n, Rng& rng, int count) {
  std::vector<RealVector> g;
  for (int i = 0; i < count; ++i) g.push_back(rng.normal_vector(n, 1.5));
  return g;
}
}  // namespace

TEST_CASE("overlap closed values") {
  const PosDefSymMatrix I2 = PosDefSymMatrix::identity(2);
  const auto a = CoherentLabel::real(RealVector::Zero(2), I2);
  const auto b = CoherentLabel::real(RealVector{{-1.0, 0.0}}, I2);
  CHECK(std::abs(overlap(a, a) - 0.15915494309189535) < 1e-15);
  CHECK(std::abs(overlap(a, b) - 0.09653235263005391) < 1e-15);
  CHECK(overlap(a, b).imag() == 0.0);

  Rng rng(11);
  const PosDefSymMatrix lam(rng.pos_def(3));
  const auto c = CoherentLabel::complex(rng.complex_normal_matrix(3, 1), lam);
  const auto d = CoherentLabel::complex(rng.complex_normal_matrix(3, 1), lam);
  CHECK(std::abs(overlap(c, d) - std::conj(overlap(d, c))) < 1e-14);

  const auto e = CoherentLabel::real(RealVector::Zero(2), PosDefSymMatrix::identity(2, 2.0));
  CHECK_THROWS_AS(overlap(a, e), Error);
  try {
    overlap(a, e);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::MismatchedLambda);
  }
}

TEST_CASE("momentum wavefunction and Parseval") {
  Rng rng(3);
  for (int n : {1, 2, 3}) {
    const PosDefSymMatrix lam(rng.pos_def(n));
    const double hbar = 0.7;
    const auto s = CoherentLabel::real(rng.normal_vector(n), lam, hbar);
    const PolyGaussian w = momentum_wavefunction(s);
    const auto r = integrate_gaussian(
        RealVector::Zero(n), lam.matrix() / (hbar * hbar), 1,
        [&](const RealVector& p, cplx* out) { out[0] = std::norm(w(p)); });
    const double expect = 1.0 / std::sqrt(std::pow(2.0 * kPi, n) * lam.determinant());
    CHECK(std::abs(r.value(0) - expect) < 1e-9);
  }
  const auto s0 = CoherentLabel::real(RealVector::Zero(2), PosDefSymMatrix::identity(2));
  const cplx v = momentum_wavefunction(s0)(RealVector{{0.4, -0.2}});
  CHECK(v.imag() == 0.0);
  CHECK(v.real() > 0.0);
}

TEST_CASE("operator tags") {
  CHECK(OpTag::parse("XX_0_1").str() == "XX_0_1");
  CHECK(OpTag::parse("P2").kind == OpKind::P2);
  CHECK(OpTag::parse("X_3").i == 3);
  CHECK_THROWS_AS(OpTag::parse("Y_1"), Error);
  CHECK_THROWS_AS(OpTag::parse("XX_1"), Error);
  CHECK_THROWS_AS(OpTag::parse("X_1_2"), Error);
  const PosDefSymMatrix I2 = PosDefSymMatrix::identity(2);
  const auto s = CoherentLabel::real(RealVector::Zero(2), I2);
  CHECK_THROWS_AS(matrix_element(OpTag::parse("X_2"), s, s, field_of(RealMatrix::Zero(2, 2))), Error);
}

TEST_CASE("matrix element examples") {
  const double th = 0.8;
  const PosDefSymMatrix lam = PosDefSymMatrix::identity(2, th);
  const FieldConfig f = field_of(th * eps2());
  const auto s0 = CoherentLabel::real(RealVector::Zero(2), lam);
  const MatrixElementTable t = matrix_elements(s0, s0, f);
  const ComplexMatrix expect =
      (0.5 * th * RealMatrix::Identity(2, 2)).cast<cplx>() + 0.5 * kI * th * eps2().cast<cplx>();
  CHECK((t.XX - expect * t.overlap).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(5);
  const RealVector x = rng.normal_vector(2);
  const auto s = CoherentLabel::real(x, lam);
  const MatrixElementTable u = matrix_elements(s, s, f);
  CHECK((u.X - x.cast<cplx>() * u.overlap).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(u.P.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed forms agree with momentum-space quadrature") {
  Rng rng(2024);
  for (int n : {2, 4}) {
    const int draws = n == 2 ? 20 : 2;
    for (int d = 0; d < draws; ++d) {
      const double hbar = rng.uniform(0.5, 1.5);
      const PosDefSymMatrix lam(rng.pos_def(n, 0.5, 2.0));
      const FieldConfig f = field_of(rng.antisym(n, 0.1, 1.5), hbar);
      const auto s1 = CoherentLabel::real(rng.normal_vector(n, 0.7), lam, hbar);
      const auto s2 = CoherentLabel::real(rng.normal_vector(n, 0.7), lam, hbar);
      const MatrixElementTable a = matrix_elements(s1, s2, f);
      const MatrixElementTable b = matrix_elements_quadrature(s1, s2, f);
      CHECK(a.max_diff(b) < 1e-8);
      CHECK(std::abs(a.overlap - b.overlap) < 1e-9);
    }
  }
}

TEST_CASE("hermiticity and commutative reduction") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 * rng.integer(1, 3);
    const PosDefSymMatrix lam(rng.pos_def(n));
    const FieldConfig f = field_of(rng.antisym(n));
    const auto s1 = CoherentLabel::real(rng.normal_vector(n), lam);
    const auto s2 = CoherentLabel::real(rng.normal_vector(n), lam);
    const MatrixElementTable a = matrix_elements(s1, s2, f);
    const MatrixElementTable b = matrix_elements(s2, s1, f);
    CHECK((a.X - b.X.conjugate()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a.P - b.P.conjugate()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a.XX - b.XX.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    const MatrixElementTable z = matrix_elements(s1, s2, field_of(RealMatrix::Zero(n, n)));
    const MatrixElementTable c = matrix_elements_commutative(s1, s2);
    CHECK(z.max_diff(c) < 1e-14);
  }
}

TEST_CASE("uncertainty matrices") {
  const auto s = CoherentLabel::real(RealVector::Zero(2), PosDefSymMatrix::identity(2));
  const UncertaintyMatrices u = uncertainty_matrices(s, field_of(RealMatrix::Zero(2, 2)));
  CHECK((u.dx - 0.25 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u.dp - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);

  const RealMatrix d{{2.0, 0.0}, {0.0, 8.0}};
  const auto s2 = CoherentLabel::real(RealVector::Zero(2), PosDefSymMatrix(d));
  const UncertaintyMatrices v = uncertainty_matrices(s2, field_of(RealMatrix::Zero(2, 2)));
  CHECK(std::abs(v.dx(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(v.dx(1, 1) - 2.0) < 1e-15);
  CHECK(std::abs(v.dp(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(v.dp(1, 1) - 0.125) < 1e-15);

  const double th = 1.3;
  const auto s3 = CoherentLabel::real(RealVector::Zero(2), PosDefSymMatrix::identity(2, th));
  const FieldConfig f = field_of(th * eps2());
  const UncertaintyMatrices w = uncertainty_matrices(s3, f);
  const ComplexMatrix expect =
      (0.5 * th * RealMatrix::Identity(2, 2)).cast<cplx>() + 0.5 * kI * th * eps2().cast<cplx>();
  CHECK((w.dx - expect).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(17);
  for (int n : {2, 4}) {
    const double hbar = 0.9;
    const PosDefSymMatrix lam(rng.pos_def(n));
    const FieldConfig g = field_of(rng.antisym(n, 0.2, 1.2), hbar);
    const auto st = CoherentLabel::real(rng.normal_vector(n), lam, hbar);
    const UncertaintyMatrices a = uncertainty_matrices(st, g);
    CHECK(uncertainty_product_residual(a, st, g) < 1e-12);
    CHECK((a.dx - a.dx.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (a.dx + a.dx.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > -1e-14);
    CHECK((a.dp - a.dp.transpose()).cwiseAbs().maxCoeff() == 0.0);
    if (n == 2) {
      const UncertaintyMatrices b = uncertainty_matrices_quadrature(st, g);
      CHECK((a.dx - b.dx).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((a.dp - b.dp).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(uncertainty_product_residual(b, st, g) < 1e-8);
    }
  }
}

TEST_CASE("twisted eigenstate property") {
  Rng rng(21);
  for (int n : {2, 4}) {
    const double hbar = 1.2;
    const PosDefSymMatrix lam(rng.pos_def(n));
    const auto s = CoherentLabel::real(rng.normal_vector(n), lam, hbar);
    CHECK(twisted_eigenstate_residual(s, field_of(rng.antisym(n), hbar), p_grid(n, rng, 30)) < 1e-10);
    CHECK(twisted_eigenstate_residual(s, field_of(RealMatrix::Zero(n, n), hbar), p_grid(n, rng, 30)) < 1e-10);
  }
}

TEST_CASE("displacements") {
  Rng rng(31);
  const PosDefSymMatrix lam(rng.pos_def(2));
  const double hbar = 0.8;
  const FieldConfig f = field_of(0.6 * eps2(), hbar);
  const RealVector x = rng.normal_vector(2);
  const auto s = CoherentLabel::real(x, lam, hbar);

  const DisplacementResult c = config_shift(s, RealVector{{0.3, -0.2}});
  CHECK(std::abs(c.z(0) - (x(0) + 0.3)) < 1e-15);
  CHECK(c.phase == cplx(1.0));
  CHECK(c.residual == "identity");

  const DisplacementResult id = momentum_shift(s, RealVector::Zero(2), f);
  CHECK((id.z - s.z).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(id.phase - 1.0) == 0.0);

  const RealVector p0{{0.5, -0.7}};
  const DisplacementResult m = momentum_shift(s, p0, f);
  const CoherentLabel sz{m.z, lam, hbar};
  const PolyGaussian wz = momentum_wavefunction(sz);
  for (const RealVector& p : p_grid(2, rng, 20)) {
    const cplx a = m.phase * wz(p);
    const cplx b = momentum_shift_wavefunction(s, p0, f, p);
    CHECK(std::abs(a - b) < 1e-13);
  }

  // at A = 0 the shifted form is a plain translation in p
  const FieldConfig f0 = field_of(RealMatrix::Zero(2, 2), hbar);
  const PolyGaussian w = momentum_wavefunction(s);
  for (const RealVector& p : p_grid(2, rng, 10)) {
    CHECK(std::abs(momentum_shift_wavefunction(s, p0, f0, p) - w(RealVector(p - p0))) < 1e-15);
  }

  CHECK(momentum_shift_generator_residual(s, p0, f, p_grid(2, rng, 15)) < 1e-6);
  CHECK(momentum_shift_generator_residual(s, p0, f0, p_grid(2, rng, 15)) < 1e-6);

  const RealMatrix Mchi{{0.9, 0.1}, {0.1, 1.4}};
  const PolyGaussian chi(Mchi.cast<cplx>(), ComplexVector{{cplx(0.2, 0.1), cplx(-0.3, 0.4)}}, 0.7,
                         Polynomial::constant(2, 1.0));
  const DisplacementPairing pr = momentum_shift_pairing(s, p0, f, chi);
  CHECK(std::abs(pr.complex_label_form - pr.shifted_form) < 1e-10);
  // the A-dependent phase matters
  const DisplacementPairing p0f = momentum_shift_pairing(s, p0, f0, chi);
  CHECK(std::abs(pr.shifted_form - p0f.shifted_form) > 1e-3);
}

TEST_CASE("momentum eigenstates from localized states") {
  const PosDefSymMatrix lam(RealMatrix{{1.1, 0.2}, {0.2, 0.8}});
  const RealMatrix Mchi{{0.9, 0.1}, {0.1, 1.4}};
  const PolyGaussian chi(Mchi.cast<cplx>(), ComplexVector{{cplx(0.2, 0.3), cplx(-0.1, -0.2)}}, 1.0,
                         Polynomial::constant(2, 1.0));
  const double hbar = 0.9;
  const FieldConfig f0 = field_of(RealMatrix::Zero(2, 2), hbar);
  const FieldConfig f1 = field_of(0.7 * eps2(), hbar);

  const MomentumIdentityCheck zero = momentum_from_coherent(RealVector::Zero(2), lam, f0, chi);
  CHECK(zero.residual < 1e-7);

  const RealVector p{{0.4, -0.3}};
  const MomentumIdentityCheck a = momentum_from_coherent(p, lam, f0, chi);
  const MomentumIdentityCheck b = momentum_from_coherent(p, lam, f1, chi);
  CHECK(a.residual < 1e-7);
  CHECK(b.residual < 1e-7);
  CHECK(std::abs(a.lhs - b.lhs) < 1e-7);
}
