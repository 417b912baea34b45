#include "nctk/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nctk/dynamics.hpp"
#include "nctk/kernels.hpp"
#include "nctk/random.hpp"

namespace nctk {

namespace {

class Sink {
 public:
  Sink(std::string suite, const SuiteConfig& cfg) : suite_(std::move(suite)) {
    rep_.set_tolerance_override(cfg.tolerance_override);
  }
  void add(const std::string& id, const std::string& anchor, double residual, double tol) {
    rep_.add(suite_, id, anchor, residual, tol);
  }
  // 0 when the call throws the expected code, 1 otherwise
  void expect_error(const std::string& id, ErrorCode code, const std::function<void()>& f) {
    double r = 1.0;
    try {
      f();
    } catch (const Error& e) {
      if (e.code() == code) r = 0.0;
    }
    add(id, "plumbing", r, 0.5);
  }
  VerificationReport take() { return std::move(rep_); }

 private:
  std::string suite_;
  VerificationReport rep_;
};

double maxabs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double maxabs(const RealMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Polynomial random_poly(Rng& rng, int n, int deg) {
  Polynomial p(n);
  MultiIndex idx(n, 0);
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

FieldConfig field_of(const RealMatrix& A, double hbar) { return FieldConfig{AntisymMatrix(A), hbar}; }

// ---------------------------------------------------------------- blockframe

VerificationReport suite_blockframe(const SuiteConfig& cfg) {
  Sink s("blockframe", cfg);
  Rng rng(cfg.seed);
  double orth = 0.0, form = 0.0, sv = 0.0, orient = 0.0;
  for (int k = 0; k < cfg.blockframe_draws; ++k) {
    const int N = 2 * (1 + k % 4);
    const RealMatrix A = rng.antisym(N, 0.1, 3.0);
    const BlockFrame f = block_diagonalize(A);
    orth = std::max(orth, orthogonality_residual(f));
    form = std::max(form, block_form_residual(A, f));
    const RealVector sing = Eigen::JacobiSVD<RealMatrix>(A).singularValues();  // descending
    for (int a = 0; a < f.n(); ++a) {
      sv = std::max({sv, std::abs(f.thetas(a) - sing(2 * a)), std::abs(f.thetas(a) - sing(2 * a + 1))});
    }
    orient = std::max(orient, std::abs(f.rotation.determinant() - f.orientation));
  }
  s.add("random.orthogonality", "frame:R^T R = I", orth, 1e-10);
  s.add("random.block_form", "frame:R A R^T = blockdiag(theta_alpha eps)", form, 1e-9);
  s.add("random.theta_vs_singular_values", "frame:theta_alpha = singular values of A (paired)", sv, 1e-10);
  s.add("random.orientation", "frame:det R = orientation", orient, 1e-9);

  const RealMatrix A2{{0.0, 2.0}, {-2.0, 0.0}};
  const BlockFrame f2 = block_diagonalize(A2);
  s.add("canonical_2x2.identity_frame", "frame:canonical field keeps R = I",
        std::max(maxabs(RealMatrix(f2.rotation - RealMatrix::Identity(2, 2))), std::abs(f2.thetas(0) - 2.0)), 1e-14);

  const RealMatrix Q = rng.orthogonal(4);
  const RealMatrix A4 = Q.transpose() * AntisymMatrix::canonical(RealVector{{1.0, 3.0}}).matrix() * Q;
  const BlockFrame f4 = block_diagonalize(A4);
  s.add("constructed.thetas_sorted", "frame:theta descending from Q^T blockdiag(1,3) Q",
        maxabs(RealMatrix(f4.thetas - RealVector{{3.0, 1.0}})), 1e-10);

  const RealMatrix Ad = Q.transpose() * AntisymMatrix::canonical(RealVector{{1.5, 1.5}}).matrix() * Q;
  const BlockFrame fd = block_diagonalize(Ad);
  s.add("degenerate.flagged", "plumbing", fd.degenerate ? 0.0 : 1.0, 0.5);
  s.add("degenerate.block_form", "frame:R A R^T = blockdiag(theta_alpha eps)", block_form_residual(Ad, fd), 1e-9);

  s.expect_error("odd_dimension", ErrorCode::OddDimension, [] { block_diagonalize(RealMatrix::Zero(3, 3)); });
  s.expect_error("not_antisymmetric", ErrorCode::NotAntisymmetric,
                 [] { block_diagonalize(RealMatrix{{0.0, 1.0}, {2.0, 0.0}}); });
  return s.take();
}

// ---------------------------------------------------------------- kernels

VerificationReport suite_kernels(const SuiteConfig& cfg) {
  Sink s("kernels", cfg);
  Rng rng(cfg.seed + 1);
  const int dims[3] = {1, 2, 4};
  double fourier[3] = {0, 0, 0};
  for (int k = 0; k < cfg.kernel_draws; ++k) {
    const int which = k % 3, n = dims[which];
    const PosDefSymMatrix lam(rng.pos_def(n));
    const RealVector x = rng.normal_vector(n, 0.7);
    const double hbar = rng.uniform(0.5, 2.0);
    QuadratureOptions o;
    if (n == 4) o.start_order = 10;
    fourier[which] = std::max(fourier[which], std::abs(weierstrass(x, lam) - weierstrass_fourier_quadrature(x, lam, hbar, o)));
  }
  for (int w = 0; w < 3; ++w) {
    s.add("weierstrass.fourier.N" + std::to_string(dims[w]),
          "kernel:W_lambda(x) = int dp/(2 pi hbar)^N e^{ix.p/hbar} e^{-p lambda p/4hbar^2}", fourier[w], 1e-8);
  }

  double mom[3] = {0, 0, 0};
  for (int k = 0; k < 10; ++k) {
    const PosDefSymMatrix lam(rng.pos_def(1 + k % 2));
    for (int order = 0; order <= 2; ++order) {
      mom[order] = std::max(mom[order], maxabs(RealMatrix(weierstrass_moments_quadrature(lam, order) -
                                                          weierstrass_moments(lam, order))));
    }
  }
  s.add("weierstrass.moment0", "kernel:int W_lambda = 1", mom[0], 1e-8);
  s.add("weierstrass.moment1", "kernel:int x W_lambda = 0", mom[1], 1e-8);
  s.add("weierstrass.moment2", "kernel:int x x^T W_lambda = lambda/2", mom[2], 1e-8);

  double pde = 0.0, pde_fd = 0.0;
  for (int k = 0; k < 30; ++k) {
    const int n = dims[k % 3];
    const PosDefSymMatrix lam(rng.pos_def(n));
    const RealVector x = rng.normal_vector(n, 0.7);
    const double peak = weierstrass(RealVector::Zero(n), lam);
    pde = std::max(pde, std::abs(weierstrass_pde_residual(x, lam)) / peak);
    pde_fd = std::max(pde_fd, std::abs(weierstrass_pde_residual_fd(x, lam)) / peak);
  }
  s.add("weierstrass.pde", "kernel:(-lambda_ij d_i d_j + 4x lambda^-1 x - 2N) W_lambda = 0", pde, 1e-10);
  s.add("weierstrass.pde_finite_difference", "kernel:(-lambda_ij d_i d_j + 4x lambda^-1 x - 2N) W_lambda = 0",
        pde_fd, 1e-6);
  s.expect_error("moment_order_3", ErrorCode::UnsupportedOrder,
                 [] { weierstrass_moments(PosDefSymMatrix::identity(2), 3); });
  return s.take();
}

// ---------------------------------------------------------------- star

VerificationReport suite_star(const SuiteConfig& cfg) {
  Sink s("star", cfg);
  Rng rng(cfg.seed + 2);

  // closed values by hand
  const RealMatrix l1 = RealMatrix::Identity(1, 1);
  const Polynomial x = Polynomial::variable(1, 0), x2 = x * x;
  double exact = max_coeff_diff(star_product_series(x, x, l1), x2 + Polynomial::constant(1, 0.5));
  exact = std::max(exact, max_coeff_diff(star_product_series(x2, x2, 0.6 * l1),
                                         x2 * x2 + cplx(1.2) * x2 + Polynomial::constant(1, 0.18)));
  const RealMatrix d2 = RealVector{{1.0, 2.0}}.asDiagonal();
  exact = std::max(exact, max_coeff_diff(star_product_series(Polynomial::variable(2, 0), Polynomial::variable(2, 1), d2),
                                         Polynomial::variable(2, 0) * Polynomial::variable(2, 1)));
  s.add("polynomial.closed_values", "star:f *_lambda g = sum (lambda/2)^k/k! d^k f d^k g", exact, 1e-15);

  double comm = 0.0, assoc = 0.0, lin = 0.0, route = 0.0;
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 3;
    const RealMatrix lam = rng.pos_def(n);
    const Polynomial f = random_poly(rng, n, 1 + k % 4), g = random_poly(rng, n, 1 + (k + 1) % 4),
                     h = random_poly(rng, n, 1 + (k + 2) % 4);
    const Polynomial fg = star_product_series(f, g, lam);
    const double sc = std::max(1.0, fg.max_abs_coeff());
    comm = std::max(comm, max_coeff_diff(fg, star_product_series(g, f, lam)) / sc);
    const Polynomial a = star_product_series(fg, h, lam);
    const Polynomial b = star_product_series(f, star_product_series(g, h, lam), lam);
    assoc = std::max(assoc, max_coeff_diff(a, b) / std::max(1.0, a.max_abs_coeff()));
    const cplx al(0.3, -1.2);
    const Polynomial l = star_product_series(f * al + h, g, lam);
    lin = std::max(lin, max_coeff_diff(l, fg * al + star_product_series(h, g, lam)) / std::max(1.0, l.max_abs_coeff()));
    const PolyGaussian viaG = star_product_gaussian(PolyGaussian::from_polynomial(f), PolyGaussian::from_polynomial(g), lam);
    route = std::max(route, max_coeff_diff(viaG.poly() * viaG.scalar(), fg) / sc);
  }
  s.add("polynomial.commutativity", "star:f *_lambda g = g *_lambda f (symmetric lambda)", comm, 1e-10);
  s.add("polynomial.associativity", "star:(f * g) * h = f * (g * h)", assoc, 1e-10);
  s.add("polynomial.bilinearity", "star:(a f + h) * g = a f * g + h * g", lin, 1e-10);
  s.add("polynomial.gaussian_route", "star:Gaussian closed form = terminating series", route, 1e-10);

  // Gaussian products against the double Fourier integral
  double four = 0.0;
  for (int trial = 0; trial < 2; ++trial) {
    const RealMatrix lam = rng.pos_def(2, 0.3, 1.0);
    const Polynomial one = Polynomial::constant(2, 1.0);
    const PolyGaussian f(rng.pos_def(2, 0.5, 1.5).cast<cplx>(), rng.normal_vector(2, 0.3).cast<cplx>(), 1.0, one);
    const PolyGaussian g(rng.pos_def(2, 0.5, 1.5).cast<cplx>(), rng.normal_vector(2, 0.3).cast<cplx>(), 0.8, one);
    const PolyGaussian st = star_product(f, g, lam);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const RealVector p{{-1.0 + i, -1.0 + j}};
        four = std::max(four, std::abs(st(p) - star_product_fourier_quadrature(f, g, lam, p, {1e-11, 10})));
      }
    }
  }
  s.add("gaussian.fourier", "star:f *_lambda g = int int f~(k) g~(q) e^{i(k+q)x} e^{-k lambda q/2}", four, 1e-7);

  // W_λ(·−a) * (φ smeared by W_λ) = W_λ(x−a) φ(a)
  double moll = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    const PosDefSymMatrix l(rng.pos_def(n, 0.4, 1.5));
    const RealVector a = rng.normal_vector(n, 0.5);
    const RealVector m = rng.normal_vector(n, 0.5);
    const RealMatrix Sigma = rng.pos_def(n, 0.3, 1.0);
    const RealVector da = a - m;
    const double phi_a = std::exp(-0.5 * da.dot(Sigma.inverse() * da)) / std::sqrt(std::pow(2 * kPi, n) * Sigma.determinant());
    const RealMatrix covg = Sigma + 0.5 * l.matrix();
    const RealMatrix ci = covg.inverse();
    const PolyGaussian smeared(ci.cast<cplx>(), (ci * m).cast<cplx>(),
                               std::exp(-0.5 * m.dot(ci * m)) / std::sqrt(std::pow(2 * kPi, n) * covg.determinant()),
                               Polynomial::constant(n, 1.0));
    const PolyGaussian lhs = star_product(weierstrass_gaussian(l, a), smeared, l);
    for (int k = 0; k < 5; ++k) {
      const RealVector y = rng.normal_vector(n, 0.8);
      moll = std::max(moll, std::abs(lhs(y) - weierstrass(RealVector(y - a), l) * phi_a));
    }
  }
  s.add("mollified_delta", "star:W_lambda(.-a) *_lambda (W_lambda smeared phi) = W_lambda(x-a) phi(a)", moll, 1e-7);

  const PosDefSymMatrix l08 = PosDefSymMatrix::identity(1, 0.8);
  s.expect_error("equal_width_diverges", ErrorCode::DivergentStar, [&] {
    star_product(weierstrass_gaussian(l08, RealVector::Constant(1, 0.2)),
                 weierstrass_gaussian(l08, RealVector::Constant(1, -0.4)), l08);
  });

  const Polynomial y2 = Polynomial::variable(2, 0) * Polynomial::variable(2, 0);
  const auto lim = star_commutative_limit_check(y2, y2, RealMatrix::Identity(2, 2), {1e-1, 1e-3, 1e-5, 1e-7, 1e-11});
  s.add("commutative_limit.final", "star:f *_{eps lambda} g -> f g as eps -> 0", lim.final_deviation, 1e-10);
  s.add("commutative_limit.monotone", "star:f *_{eps lambda} g -> f g as eps -> 0", lim.monotone ? 0.0 : 1.0, 0.5);
  return s.take();
}

// ---------------------------------------------------------------- coherent

VerificationReport suite_coherent(const SuiteConfig& cfg) {
  Sink s("coherent", cfg);
  Rng rng(cfg.seed + 3);
  double me2 = 0.0, me4 = 0.0, ov = 0.0;
  const int draws4 = std::max(1, cfg.coherent_draws / 10);
  for (int d = 0; d < cfg.coherent_draws; ++d) {
    const int n = d < cfg.coherent_draws - draws4 ? 2 : 4;
    const double hbar = rng.uniform(0.5, 1.5);
    const PosDefSymMatrix lam(rng.pos_def(n, 0.5, 2.0));
    const FieldConfig f = field_of(rng.antisym(n, 0.1, 1.5), hbar);
    const auto s1 = CoherentLabel::real(rng.normal_vector(n, 0.7), lam, hbar);
    const auto s2 = CoherentLabel::real(rng.normal_vector(n, 0.7), lam, hbar);
    QuadratureOptions o;
    if (n == 4) o.start_order = 10;
    const MatrixElementTable a = matrix_elements(s1, s2, f);
    const MatrixElementTable b = matrix_elements_quadrature(s1, s2, f, o);
    (n == 2 ? me2 : me4) = std::max(n == 2 ? me2 : me4, a.max_diff(b));
    ov = std::max(ov, std::abs(a.overlap - b.overlap));
  }
  s.add("matrix_elements.quadrature.N2", "coherent:<x1;lambda|{1,X,XX,X2,P,PP,P2}|x2;lambda> closed forms", me2, 1e-8);
  s.add("matrix_elements.quadrature.N4", "coherent:<x1;lambda|{1,X,XX,X2,P,PP,P2}|x2;lambda> closed forms", me4, 1e-8);
  s.add("overlap.quadrature", "coherent:<z1;lambda|z2;lambda> = ((2pi)^N det lambda)^-1/2 e^{-(z1*-z2) lambda^-1 (z1*-z2)/2}", ov, 1e-8);

  double red = 0.0, herm = 0.0;
  for (int k = 0; k < 40; ++k) {
    const int n = 2 * (1 + k % 3);
    const PosDefSymMatrix lam(rng.pos_def(n));
    const FieldConfig f = field_of(rng.antisym(n), 1.0);
    const auto s1 = CoherentLabel::real(rng.normal_vector(n), lam);
    const auto s2 = CoherentLabel::real(rng.normal_vector(n), lam);
    red = std::max(red, matrix_elements(s1, s2, field_of(RealMatrix::Zero(n, n), 1.0)).max_diff(matrix_elements_commutative(s1, s2)));
    const MatrixElementTable a = matrix_elements(s1, s2, f), b = matrix_elements(s2, s1, f);
    herm = std::max({herm, maxabs(ComplexMatrix(a.X - b.X.conjugate())), maxabs(ComplexMatrix(a.P - b.P.conjugate())),
                     maxabs(ComplexMatrix(a.XX - b.XX.adjoint())), maxabs(ComplexMatrix(a.PP - b.PP.adjoint()))});
  }
  s.add("commutative_reduction", "coherent:A = 0 forms reduce to W_{2 lambda} and its derivatives", red, 1e-14);
  s.add("hermiticity", "coherent:<x1|O|x2> = <x2|O|x1>* for Hermitian O", herm, 1e-14);

  double unc = 0.0, uncq = 0.0, uncm = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int n = k < 6 ? 2 : 4;
    const double hbar = rng.uniform(0.6, 1.4);
    const PosDefSymMatrix lam(rng.pos_def(n));
    const FieldConfig g = field_of(rng.antisym(n, 0.2, 1.2), hbar);
    const auto st = CoherentLabel::real(rng.normal_vector(n), lam, hbar);
    const UncertaintyMatrices a = uncertainty_matrices(st, g);
    unc = std::max(unc, uncertainty_product_residual(a, st, g));
    if (n == 2) {
      const UncertaintyMatrices b = uncertainty_matrices_quadrature(st, g);
      uncq = std::max(uncq, uncertainty_product_residual(b, st, g));
      uncm = std::max({uncm, maxabs(ComplexMatrix(a.dx - b.dx)), maxabs(RealMatrix(a.dp - b.dp))});
    }
  }
  s.add("uncertainty.analytic", "coherent:dx dp = hbar^2/4 lambda^-1 (lambda + 2iA - A lambda^-1 A)", unc, 1e-12);
  s.add("uncertainty.quadrature", "coherent:dx dp = hbar^2/4 lambda^-1 (lambda + 2iA - A lambda^-1 A)", uncq, 1e-8);
  s.add("uncertainty.matrices_vs_quadrature", "coherent:dx = lambda/4 + iA/2 - A lambda^-1 A/4, dp = hbar^2 lambda^-1", uncm, 1e-8);

  double nrm = 0.0, nrmq = 0.0;
  for (int n : {1, 2, 3, 4}) {
    const PosDefSymMatrix lam(rng.pos_def(n));
    const double hbar = 0.8;
    const auto st = CoherentLabel::real(rng.normal_vector(n), lam, hbar);
    const double expect = 1.0 / std::sqrt(std::pow(2.0 * kPi, n) * lam.determinant());
    nrm = std::max(nrm, std::abs(overlap(st, st) - expect));
    const PolyGaussian w = momentum_wavefunction(st);
    QuadratureOptions o;
    if (n == 4) o.start_order = 10;
    const auto r = integrate_gaussian(RealVector::Zero(n), lam.matrix() / (hbar * hbar), 1,
                                      [&](const RealVector& p, cplx* out) { out[0] = std::norm(w(p)); }, o);
    nrmq = std::max(nrmq, std::abs(r.value(0) - expect));
  }
  const auto unit = CoherentLabel::real(RealVector::Zero(2), PosDefSymMatrix::identity(2));
  s.add("norm.closed_form", "coherent:<x;lambda|x;lambda> = ((2pi)^N det lambda)^-1/2", nrm, 1e-9);
  s.add("norm.momentum_quadrature", "coherent:int |<p|x;lambda>|^2 dp = ((2pi)^N det lambda)^-1/2", nrmq, 1e-9);
  s.add("norm.lambda_identity_2d", "coherent:<x;I|x;I> = 1/(2pi) for N = 2", std::abs(overlap(unit, unit) - 1.0 / (2.0 * kPi)), 1e-9);

  double tw = 0.0;
  for (int n : {2, 4}) {
    const PosDefSymMatrix lam(rng.pos_def(n));
    const auto st = CoherentLabel::real(rng.normal_vector(n), lam, 1.2);
    std::vector<RealVector> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(rng.normal_vector(n, 1.5));
    tw = std::max(tw, twisted_eigenstate_residual(st, field_of(rng.antisym(n), 1.2), grid));
  }
  s.add("twisted_eigenstate", "coherent:(x_i + (i/2hbar)(lambda - iA)_ij p_j)|x;lambda> = x_i|x;lambda>", tw, 1e-10);

  const PosDefSymMatrix lam2(rng.pos_def(2));
  const FieldConfig f2 = field_of(RealMatrix{{0.0, 0.6}, {-0.6, 0.0}}, 0.8);
  const auto s0 = CoherentLabel::real(rng.normal_vector(2), lam2, 0.8);
  const RealVector p0{{0.5, -0.7}};
  std::vector<RealVector> grid;
  for (int i = 0; i < 15; ++i) grid.push_back(rng.normal_vector(2, 1.5));
  s.add("momentum_shift.generator", "coherent:d/ds e^{is p0.x/hbar}|x;lambda> generated by p0.x", momentum_shift_generator_residual(s0, p0, f2, grid), 1e-6);
  const PolyGaussian chi(RealMatrix{{0.9, 0.1}, {0.1, 1.4}}.cast<cplx>(), ComplexVector{{cplx(0.2, 0.1), cplx(-0.3, 0.4)}}, 0.7,
                         Polynomial::constant(2, 1.0));
  const DisplacementPairing pr = momentum_shift_pairing(s0, p0, f2, chi);
  s.add("momentum_shift.pairing", "coherent:e^{ip0.x/hbar}|x;lambda> = phase |x - A p0/2hbar + i lambda p0/2hbar;lambda>",
        std::abs(pr.complex_label_form - pr.shifted_form), 1e-10);
  const MomentumIdentityCheck mc = momentum_from_coherent(RealVector{{0.4, -0.3}}, lam2, f2, chi);
  s.add("momentum_eigenstate", "coherent:int dx e^{ip.x/hbar}|x;lambda> = (2pi hbar)^{N/2}|p>", mc.residual, 1e-7);
  return s.take();
}

// ---------------------------------------------------------------- fock

VerificationReport suite_fock(const SuiteConfig& cfg) {
  Sink s("fock", cfg);
  Rng rng(cfg.seed + 4);
  for (int K : {8, 16, 32}) {
    const BlockFrame f = block_diagonalize(rng.antisym(2, 0.3, 2.0));
    const SectorAlgebra alg(f, K, rng.uniform(0.5, 1.5));
    s.add("commutator_table.n1.K" + std::to_string(K), "fock:sector commutator table (b,d,u,v,x,p) on edge window",
          commutator_table(alg).max_residual, 1e-10);
  }
  {
    const SectorAlgebra alg(block_diagonalize(rng.antisym(4, 0.5, 2.0)), 6, 0.9);
    s.add("commutator_table.n2.K6", "fock:sector commutator table (b,d,u,v,x,p) on edge window",
          commutator_table(alg).max_residual, 1e-10);
  }

  // low-level window of a generous truncation, so no column leaks past K
  double unit = 0.0, vs_expm = 0.0;
  const int K = 128, W = 16;
  for (int k = 0; k < 20; ++k) {
    const double tt = rng.uniform(0.8, 2.0);
    const cplx z(rng.normal(), rng.normal());
    const ComplexMatrix D = displacement_matrix(z, tt, K);
    const ComplexMatrix u = D.adjoint() * D;
    unit = std::max(unit, maxabs(ComplexMatrix(u.topLeftCorner(W, W) - ComplexMatrix::Identity(W, W))));
    if (k < 4) {
      const ComplexMatrix E = displacement_matrix_expm(z, tt, K);
      vs_expm = std::max(vs_expm, maxabs(ComplexMatrix(D.topLeftCorner(W, W) - E.topLeftCorner(W, W))));
    }
  }
  s.add("displacement.unitarity", "fock:D(w)^dagger D(w) = 1 on the low-level window", unit, 1e-8);
  s.add("displacement.vs_expm", "fock:D(w) = exp((w c^dagger - w* c)/2theta)", vs_expm, 1e-9);

  double vac = 0.0;
  for (double th : {0.5, 1.0, 1.7}) {
    const SectorAlgebra alg(BlockFrame::canonical(RealVector{{th}}), 24, 1.0);
    const FockState v = configuration_coherent_vector(alg, RealVector::Zero(2));
    vac = std::max(vac, std::abs(inner(v, v) - 1.0 / (2.0 * kPi * th)));
  }
  {
    const SectorAlgebra alg(BlockFrame::canonical(RealVector{{1.2, 0.7}}), 6, 1.0);
    const FockState v = configuration_coherent_vector(alg, RealVector::Zero(4));
    vac = std::max(vac, std::abs(inner(v, v) - 1.0 / (4.0 * kPi * kPi * 1.2 * 0.7)));
  }
  s.add("vacuum_norm", "fock:<0|0> = prod_alpha 1/(2 pi theta_alpha)", vac, 1e-12);

  const RealMatrix A = rng.antisym(2, 0.5, 1.5);
  const BlockFrame g = block_diagonalize(A);
  const SectorAlgebra alg2(g, 40, 1.0);
  const PosDefSymMatrix lam = frame_lambda(g);
  double ovl = 0.0;
  for (int k = 0; k < 5; ++k) {
    const RealVector x1 = rng.normal_vector(2, 0.8), x2 = rng.normal_vector(2, 0.8);
    const cplx ref = overlap(CoherentLabel::real(x1, lam), CoherentLabel::real(x2, lam));
    ovl = std::max(ovl, std::abs(inner(configuration_coherent_vector(alg2, x1), configuration_coherent_vector(alg2, x2)) - ref));
  }
  s.add("coherent_vector.overlap", "fock:<x1;theta|x2;theta> = coherent overlap with lambda = theta", ovl, 1e-8);
  s.expect_error("truncation_too_small", ErrorCode::TruncationTooSmall, [] {
    configuration_coherent_vector(SectorAlgebra(BlockFrame::canonical(RealVector{{1.0}}), 8, 1.0), RealVector{{4.0, 0.0}});
  });
  return s.take();
}

// ---------------------------------------------------------------- envrep

PolyGaussian gaussian_state(const RealMatrix& width, const RealVector& x0, const RealVector& p0, double hbar) {
  const ComplexVector lin = (width * p0 / (2.0 * hbar * hbar)).cast<cplx>() - kI * x0.cast<cplx>() / hbar;
  return PolyGaussian((width / (2.0 * hbar * hbar)).cast<cplx>(), lin, 1.0, Polynomial::constant(width.rows(), 1.0));
}

void add_heisenberg(Sink& s, const std::string& tag, const HeisenbergResiduals& r) {
  s.add("heisenberg." + tag + ".XX", "envrep:[X_i,X_j] = iA_ij", r.xx, 1e-9);
  s.add("heisenberg." + tag + ".XP", "envrep:[X_i,P_j] = i hbar delta_ij", r.xp, 1e-9);
  s.add("heisenberg." + tag + ".PP", "envrep:[P_i,P_j] = 0", r.pp, 1e-9);
  s.add("heisenberg." + tag + ".adjoint", "envrep:X, P Hermitian under the trace inner product", r.adjoint, 1e-8);
  s.add("heisenberg." + tag + ".frame_form", "envrep:P_i = -hbar (A^-1)_ij [x_j, .] = rotated frame form", r.frame_form, 1e-10);
  s.add("heisenberg." + tag + ".left_right", "envrep:left (B) and right (D) actions commute", r.left_right, 1e-10);
  s.add("heisenberg." + tag + ".duals", "envrep:D = B^dual + (i theta/hbar) P_-", r.dual_relations, 1e-10);
}

VerificationReport suite_envrep(const SuiteConfig& cfg) {
  Sink s("envrep", cfg);
  Rng rng(cfg.seed + 5);
  {
    const EnvelopingAlgebra a1(BlockFrame::canonical(RealVector{{1.0}}), 32, 1.0);
    add_heisenberg(s, "n1.K32", heisenberg_suite(a1, 3, cfg.seed));
    const RealMatrix Q = rng.orthogonal(4);
    const RealMatrix A = Q.transpose() * AntisymMatrix::canonical(RealVector{{3.0, 1.0}}).matrix() * Q;
    const EnvelopingAlgebra a2 = EnvelopingAlgebra::from_field(AntisymMatrix(A), 12, 0.7);
    add_heisenberg(s, "n2.K12", heisenberg_suite(a2, 1, cfg.seed + 1));
  }

  const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{1.0}}), 32, 1.0);
  const auto vac = CoherentLabel::real(RealVector::Zero(2), frame_lambda(alg.frame()), 1.0);
  const EnvelopingState sv = state_to_operator(momentum_wavefunction(vac), alg);
  s.add("vacuum_image.norm", "envrep:vacuum image norm (2 pi theta) Tr(phi^dagger phi) = 1/(2pi)",
        std::abs(inner_product(sv, sv) - 1.0 / (2.0 * kPi)), 1e-6);

  double iso = 0.0;
  for (double th : {0.5, 1.3}) {
    for (double lam : {0.4, 2.5}) {
      const EnvelopingAlgebra a(BlockFrame::canonical(RealVector{{th}}), 24, 0.8);
      const auto st = CoherentLabel::real(RealVector::Zero(2), PosDefSymMatrix::identity(2, lam), 0.8);
      iso = std::max(iso, maxabs(ComplexMatrix(state_to_operator(momentum_wavefunction(st), a).op -
                                               isotropic_gaussian_image(lam, th, 24))));
    }
  }
  s.add("isotropic_image.closed_form", "envrep:isotropic image diag r^k/(pi(lambda+theta))", iso, 1e-9);

  double ip = 0.0;
  for (int k = 0; k < cfg.envrep_pairs; ++k) {
    // widths ≥ 0.9θ: narrower packets need more than 80 quadrature nodes at K = 32
    const PolyGaussian f1 = gaussian_state(rng.pos_def(2, 0.9, 1.8), rng.normal_vector(2, 0.6), rng.normal_vector(2, 0.5), 1.0);
    const PolyGaussian f2 = gaussian_state(rng.pos_def(2, 0.9, 1.8), rng.normal_vector(2, 0.6), rng.normal_vector(2, 0.5), 1.0);
    const cplx v = inner_product(state_to_operator(f1, alg), state_to_operator(f2, alg));
    ip = std::max(ip, std::abs(v - momentum_inner_product(f1, f2)));
  }
  s.add("inner_product.momentum_space", "envrep:(2 pi theta) Tr(phi1^dagger phi2) = int phi1~* phi2~ dp", ip, 1e-6);

  const EnvelopingAlgebra a16(BlockFrame::canonical(RealVector{{0.8}}), 16, 1.0);
  const PolyGaussian f1 = gaussian_state(RealMatrix::Identity(2, 2), RealVector{{0.3, 0.1}}, RealVector::Zero(2), 1.0);
  const PolyGaussian f2 = f1.times(Polynomial::variable(2, 0)).plus(f1.scaled(cplx(0.2, 0.4)));
  const EnvelopingState ea = state_to_operator(f1, a16), eb = state_to_operator(f2, a16);
  const EnvelopingState ec = state_to_operator(f1.scaled(2.0).plus(f2.scaled(cplx(0.0, -1.0))), a16);
  s.add("map.linearity", "envrep:phi~ -> phi is linear", maxabs(ComplexMatrix(ec.op - (2.0 * ea.op - kI * eb.op))), 1e-9);
  s.expect_error("singular_field", ErrorCode::NotInvertibleField,
                 [] { EnvelopingAlgebra::from_field(AntisymMatrix::zero(2), 8); });
  s.expect_error("frame_mismatch", ErrorCode::FrameMismatch, [&] {
    const EnvelopingAlgebra b(BlockFrame::canonical(RealVector{{2.0}}), 16, 1.0);
    inner_product(ea, b.wrap(ea.op));
  });
  return s.take();
}

// ---------------------------------------------------------------- dynamics

VerificationReport suite_dynamics(const SuiteConfig& cfg) {
  Sink s("dynamics", cfg);
  {
    const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{1.0}}), 32, 1.0);
    const Hamiltonian H(alg, hermitize(PolynomialPotential::harmonic(2), alg), 1.0);
    s.add("hamiltonian.hermiticity", "dynamics:H = P.P/2mu + V(X) Hermitian under the trace inner product",
          hermiticity_residual(H, alg, 3, cfg.seed), 1e-12);
    const auto vac = CoherentLabel::real(RealVector::Zero(2), frame_lambda(alg.frame()), 1.0);
    EvolutionConfig ec;
    ec.t_final = 1.0;
    ec.steps = 1000;
    ec.seed = cfg.seed;
    const Trajectory tr = evolve(state_to_operator(momentum_wavefunction(vac), alg), H, alg, ec);
    s.add("oscillator.norm_drift", "dynamics:i hbar d phi/dt = H phi conserves (phi, phi)", tr.max_norm_drift, 1e-8);
    s.add("oscillator.energy_drift", "dynamics:(phi, H phi) conserved for time-independent H", tr.max_energy_drift, 1e-7);
  }
  {
    const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{0.8}}), 16, 1.0);
    const Hamiltonian H(alg, hermitize(PolynomialPotential::harmonic(2), alg), 1.0);
    const auto lab = CoherentLabel::real(RealVector{{0.3, -0.2}}, frame_lambda(alg.frame()), 1.0);
    const EnvelopingState s0 = state_to_operator(momentum_wavefunction(lab), alg);
    EvolutionConfig ec;
    ec.t_final = 0.5;
    ec.steps = 200;
    ec.integrator = Integrator::Expm;
    const Trajectory te = evolve(s0, H, alg, ec);
    ec.integrator = Integrator::Rk4;
    const Trajectory t4 = evolve(s0, H, alg, ec);
    ec.integrator = Integrator::Blocks;
    const Trajectory tb = evolve(s0, H, alg, ec);
    const double sc = maxabs(s0.op);
    s.add("integrators.rk4_vs_expm", "dynamics:rk4 = exact propagator at matched steps",
          maxabs(ComplexMatrix(t4.final_state.op - te.final_state.op)) / sc, 1e-6);
    s.add("integrators.blocks_vs_expm", "dynamics:block propagator = exact propagator",
          maxabs(ComplexMatrix(tb.final_state.op - te.final_state.op)) / sc, 1e-10);
    ec.integrator = Integrator::Expm;
    ec.t_final = -0.5;
    const Trajectory back = evolve(te.final_state, H, alg, ec);
    s.add("integrators.time_reversal", "dynamics:U(-t) U(t) = 1", maxabs(ComplexMatrix(back.final_state.op - s0.op)) / sc, 1e-9);
  }

  // θ → 0 sweep against the commutative oscillator
  const RealVector x0{{0.5, 0.0}};
  const double thetas[3] = {1.0, 0.1, 0.01};
  const int levels[3] = {40, 64, cfg.sweep_levels_small};
  double err[3];
  double drift = 0.0;
  for (int k = 0; k < 3; ++k) {
    const OscillatorComparison c = compare_with_commutative_oscillator(thetas[k], levels[k], x0, 1.0, 50);
    err[k] = c.max_relative_error;
    drift = std::max(drift, c.nc.max_norm_drift);
  }
  s.add("theta_sweep.monotone", "dynamics:<x(t)> approaches the commutative oscillator as theta -> 0",
        std::max(0.0, std::max(err[1] - err[0], err[2] - err[1])), 1e-12);
  s.add("theta_sweep.theta_0.01", "dynamics:<x(t)> approaches the commutative oscillator as theta -> 0", err[2], 2e-2);
  s.add("theta_sweep.norm_drift", "dynamics:i hbar d phi/dt = H phi conserves (phi, phi)", drift, 1e-8);

  // commutative continuity equation
  const PosDefSymMatrix lam = PosDefSymMatrix::identity(2);
  const PolyGaussian packet(0.6 * ComplexMatrix::Identity(2, 2), ComplexVector{{cplx(0.4, -0.3), cplx(-0.2, 0.1)}}, 1.0,
                            Polynomial::constant(2, 1.0));
  ContinuityGrid grid;
  grid.center = RealVector::Zero(2);
  const ContinuityReport fr = continuity_check_commutative(packet, PolynomialPotential::free(2), lam, grid, 1.0);
  const ContinuityReport ho = continuity_check_commutative(packet, PolynomialPotential::harmonic(2), lam, grid, 1.0);
  s.add("continuity.free", "dynamics:d rho_lambda/dt + div J_lambda = 0", fr.max_residual, 1e-5);
  s.add("continuity.harmonic", "dynamics:d rho_lambda/dt + div J_lambda = 0", ho.max_residual, 1e-5);
  s.add("continuity.norm", "dynamics:int rho_lambda dx = 1", std::max(fr.norm_error, ho.norm_error), 1e-6);
  const PolyGaussian ground(ComplexMatrix::Identity(2, 2), ComplexVector::Zero(2), 1.0, Polynomial::constant(2, 1.0));
  const ContinuityReport st = continuity_check_commutative(ground, PolynomialPotential::harmonic(2), lam, grid, 1.0);
  s.add("continuity.stationary", "dynamics:ground state has d rho/dt = 0 and div J = 0",
        std::max(st.max_density_rate, st.max_divergence), 1e-6);

  s.expect_error("non_hermitian", ErrorCode::NonHermitianHamiltonian, [] {
    const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{1.0}}), 8, 1.0);
    EvolutionConfig ec;
    ec.steps = 2;
    evolve(alg.wrap(ComplexMatrix::Identity(8, 8)), Hamiltonian(alg, FockOperator(alg.x(0) * alg.x(1)), 1.0), alg, ec);
  });
  s.expect_error("degree_too_high", ErrorCode::DegreeTooHigh, [] {
    Polynomial p(2);
    p.add_term({5, 0}, 1.0);
    PolynomialPotential(p, 1.0);
  });
  return s.take();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"blockframe", "kernels", "star", "coherent", "fock", "envrep", "dynamics"};
  return names;
}

namespace {
VerificationReport dispatch(const std::string& name, const SuiteConfig& cfg) {
  if (name == "blockframe") return suite_blockframe(cfg);
  if (name == "kernels") return suite_kernels(cfg);
  if (name == "star") return suite_star(cfg);
  if (name == "coherent") return suite_coherent(cfg);
  if (name == "fock") return suite_fock(cfg);
  if (name == "envrep") return suite_envrep(cfg);
  if (name == "dynamics") return suite_dynamics(cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
}
}  // namespace

VerificationReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
  }
  try {
    return dispatch(name, cfg);
  } catch (const Error& e) {
    VerificationReport rep;
    rep.add(name, "aborted." + std::string(to_string(e.code())), "plumbing", NAN, 0.0);
    return rep;
  }
}

}  // namespace nctk
