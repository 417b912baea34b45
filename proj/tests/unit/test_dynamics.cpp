#include <doctest.h>

#include "nctk/dynamics.hpp"
#include "nctk/random.hpp"

using namespace nctk;

namespace {

Polynomial mono(int n, MultiIndex idx, double c) {
  Polynomial p(n);
  p.add_term(idx, c);
  return p;
}

double dense_max(const FockOperator& a) { return ComplexMatrix(a).cwiseAbs().maxCoeff(); }

EnvelopingState vacuum_image(const EnvelopingAlgebra& alg) {
  const auto vac = CoherentLabel::real(RealVector::Zero(2), frame_lambda(alg.frame()), alg.hbar());
  return state_to_operator(momentum_wavefunction(vac), alg);
}

}  // namespace

TEST_CASE("potential validation") {
  CHECK_THROWS_AS(PolynomialPotential(mono(2, {5, 0}, 1.0), 1.0), Error);
  try {
    PolynomialPotential(mono(2, {3, 2}, 1.0), 1.0);
    FAIL("expected DegreeTooHigh");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeTooHigh);
  }
  CHECK_THROWS_AS(PolynomialPotential(mono(2, {1, 0}, 1.0), 0.0), Error);
  Polynomial c(2);
  c.add_term({1, 0}, cplx(0.0, 1.0));
  CHECK_THROWS_AS(PolynomialPotential(c, 1.0), Error);
  CHECK(PolynomialPotential::harmonic(2, 2.0, 3.0).harmonic_frequency() == doctest::Approx(3.0));
  CHECK(PolynomialPotential::free(2).harmonic_frequency() == 0.0);
  CHECK(PolynomialPotential(mono(2, {2, 0}, 1.0), 1.0).harmonic_frequency() == 0.0);
}

TEST_CASE("hermitized potentials") {
  const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{0.7}}), 12, 1.0);
  const FockOperator &x1 = alg.x(0), &x2 = alg.x(1);

  const FockOperator ho = hermitize(PolynomialPotential::harmonic(2, 1.0, 1.0), alg);
  CHECK(dense_max(ho - FockOperator(0.5 * (x1 * x1 + x2 * x2))) < 1e-14);

  const FockOperator v12 = hermitize(PolynomialPotential(mono(2, {1, 1}, 1.0), 1.0), alg);
  CHECK(dense_max(v12 - FockOperator(0.5 * (x1 * x2 + x2 * x1))) < 1e-14);

  const FockOperator w = weyl_monomial({2, 1}, {x1, x2});
  const FockOperator expect = (x1 * x1 * x2 + x1 * x2 * x1 + x2 * x1 * x1) / cplx(3.0);
  CHECK(dense_max(w - expect) < 1e-13);

  Rng rng(5);
  Polynomial cubic(2);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; i + j <= 3; ++j) cubic.add_term({i, j}, rng.normal());
  const FockOperator vq = hermitize(PolynomialPotential(cubic, 1.0), alg);
  CHECK(dense_max(vq - FockOperator(vq.adjoint())) < 1e-12);
}

TEST_CASE("Hamiltonian superoperator") {
  Rng rng(11);
  const RealMatrix A = rng.antisym(2, 0.5, 1.5);
  const EnvelopingAlgebra alg = EnvelopingAlgebra::from_field(AntisymMatrix(A), 10, 0.9);
  const double mu = 1.3;
  const Hamiltonian free(alg, FockOperator(alg.dim(), alg.dim()), mu);

  const ComplexMatrix I = ComplexMatrix::Identity(alg.dim(), alg.dim());
  CHECK(free.apply(I).cwiseAbs().maxCoeff() < 1e-12);
  // [y,[y,x̂]] vanishes away from the truncation edge
  const int in = alg.dim() - 3;
  CHECK(free.apply(ComplexMatrix(alg.x(0))).topLeftCorner(in, in).cwiseAbs().maxCoeff() < 1e-11);

  const FockOperator vq = hermitize(PolynomialPotential::harmonic(2, mu, 0.8), alg);
  const Hamiltonian H(alg, vq, mu);
  const Superoperator sup = hamiltonian_superop(vq, alg, mu);
  const double fac = 2.0 * kPi * alg.frame().thetas(0);
  for (int trial = 0; trial < 3; ++trial) {
    const ComplexMatrix phi = rng.complex_normal_matrix(alg.dim(), alg.dim());
    ComplexMatrix pp = ComplexMatrix::Zero(alg.dim(), alg.dim());
    for (int i = 0; i < 2; ++i) pp += alg.P(i, alg.P(i, phi));
    const ComplexMatrix hp = H.apply(phi);
    const double scale = hp.cwiseAbs().maxCoeff();
    CHECK((hp - (pp / (2.0 * mu) + ComplexMatrix(vq * phi))).cwiseAbs().maxCoeff() < 1e-10 * scale);
    CHECK((H.kinetic(phi) - H.kinetic_double_sum(phi)).cwiseAbs().maxCoeff() < 1e-10 * scale);
    CHECK((sup.apply(phi) - hp).cwiseAbs().maxCoeff() == 0.0);
    const ComplexVector vec = H.matrix() * Eigen::Map<const ComplexVector>(phi.data(), phi.size());
    CHECK((Eigen::Map<const ComplexMatrix>(vec.data(), alg.dim(), alg.dim()) - hp).cwiseAbs().maxCoeff() < 1e-10 * scale);
    // kinetic positivity under the trace inner product
    const double kin = (fac * (phi.conjugate().cwiseProduct(free.apply(phi))).sum()).real();
    CHECK(kin >= -1e-10);
  }
  CHECK(hermiticity_residual(H, alg, 3, 1) < 1e-12);
}

TEST_CASE("evolution of the NC oscillator") {
  const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{1.0}}), 32, 1.0);
  const Hamiltonian H(alg, hermitize(PolynomialPotential::harmonic(2), alg), 1.0);
  const EnvelopingState s0 = vacuum_image(alg);
  EvolutionConfig cfg;
  cfg.t_final = 1.0;
  cfg.steps = 1000;
  cfg.integrator = Integrator::Expm;
  const Trajectory tr = evolve(s0, H, alg, cfg);
  CHECK(tr.used == Integrator::Expm);
  CHECK(tr.points.size() == 1001);
  CHECK(std::abs(tr.points.front().norm - 1.0 / (2.0 * kPi)) < 1e-6);
  CHECK(tr.max_norm_drift < 1e-8);
  CHECK(tr.max_energy_drift < 1e-7);

  // exact block propagation agrees with the dense exponential
  cfg.integrator = Integrator::Blocks;
  const Trajectory tb = evolve(s0, H, alg, cfg);
  CHECK((tb.final_state.op - tr.final_state.op).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("integrator consistency and reversibility") {
  const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{0.8}}), 16, 1.0);
  Polynomial v(2);
  v.add_term({2, 0}, 0.5);
  v.add_term({0, 2}, 0.3);
  v.add_term({1, 1}, 0.1);
  const Hamiltonian H(alg, hermitize(PolynomialPotential(v, 1.0), alg), 1.0);
  const auto lab = CoherentLabel::real(RealVector{{0.3, -0.2}}, frame_lambda(alg.frame()), 1.0);
  const EnvelopingState s0 = state_to_operator(momentum_wavefunction(lab), alg);

  EvolutionConfig cfg;
  cfg.t_final = 0.5;
  cfg.steps = 200;
  cfg.integrator = Integrator::Expm;
  const Trajectory te = evolve(s0, H, alg, cfg);
  cfg.integrator = Integrator::Rk4;
  const Trajectory tr = evolve(s0, H, alg, cfg);
  cfg.integrator = Integrator::Cayley;
  const Trajectory tc = evolve(s0, H, alg, cfg);
  cfg.integrator = Integrator::Blocks;
  const Trajectory tb = evolve(s0, H, alg, cfg);
  const double scale = s0.op.cwiseAbs().maxCoeff();
  CHECK((tr.final_state.op - te.final_state.op).cwiseAbs().maxCoeff() < 1e-6 * scale);
  CHECK((tb.final_state.op - te.final_state.op).cwiseAbs().maxCoeff() < 1e-10 * scale);
  CHECK((tc.final_state.op - te.final_state.op).cwiseAbs().maxCoeff() < 1e-2 * scale);
  CHECK(tc.max_norm_drift < 1e-12);
  for (std::size_t k = 0; k < te.points.size(); k += 50) {
    CHECK(std::abs(tr.points[k].x[0] - te.points[k].x[0]) < 1e-6);
  }

  cfg.integrator = Integrator::Expm;
  cfg.t_final = -0.5;
  const Trajectory back = evolve(te.final_state, H, alg, cfg);
  CHECK((back.final_state.op - s0.op).cwiseAbs().maxCoeff() < 1e-9);

  // H = 0 leaves the state fixed
  cfg.t_final = 1.0;
  cfg.steps = 5;
  const Trajectory still = evolve(s0, Hamiltonian::zero(alg), alg, cfg);
  CHECK((still.final_state.op - s0.op).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evolution errors and output") {
  const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{1.0}}), 12, 1.0);
  const EnvelopingState s0 = vacuum_image(alg);
  // unsymmetrized x₁x₂ is not Hermitian
  const Hamiltonian bad(alg, FockOperator(alg.x(0) * alg.x(1)), 1.0);
  EvolutionConfig cfg;
  cfg.steps = 10;
  try {
    evolve(s0, bad, alg, cfg);
    FAIL("expected NonHermitianHamiltonian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonHermitianHamiltonian);
  }

  const Hamiltonian H(alg, hermitize(PolynomialPotential::harmonic(2), alg), 1.0);
  cfg.integrator = Integrator::Rk4;
  cfg.t_final = 5.0;
  cfg.steps = 2;
  try {
    evolve(s0, H, alg, cfg);
    FAIL("expected NormDriftExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NormDriftExceeded);
  }
  cfg.steps = 0;
  CHECK_THROWS_AS(evolve(s0, H, alg, cfg), Error);

  cfg.steps = 4;
  cfg.t_final = 0.2;
  cfg.integrator = Integrator::Auto;
  const Trajectory tr = evolve(s0, H, alg, cfg);
  const std::string csv = trajectory_csv(tr);
  CHECK(csv.rfind("t,norm,energy,x_0_1_re,x_0_1_im,x_0_2_re,x_0_2_im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(to_string(integrator_from_string("cayley")) == "cayley");
  CHECK_THROWS_AS(integrator_from_string("euler"), Error);
}

TEST_CASE("commutative oscillator oracle") {
  const RealVector x0{{0.7, -0.4}}, p0{{0.2, 0.5}};
  const double mu = 1.4, w = 0.9, h = 0.8;
  std::vector<double> times{0.0, 0.3, 1.1, 2.5};
  const OscillatorOracle o = commutative_oscillator(x0, p0, mu, w, h, 40, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const RealVector expect = x0 * std::cos(w * times[k]) + p0 / (mu * w) * std::sin(w * times[k]);
    CHECK((o.x[k] - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("small field approaches the commutative oscillator") {
  const RealVector x0{{0.5, 0.0}};
  const OscillatorComparison a = compare_with_commutative_oscillator(1.0, 40, x0, 1.0, 40);
  const OscillatorComparison b = compare_with_commutative_oscillator(0.1, 64, x0, 1.0, 40);
  const OscillatorComparison c = compare_with_commutative_oscillator(0.03, 200, x0, 1.0, 40);
  CHECK(a.max_relative_error > b.max_relative_error);
  CHECK(b.max_relative_error > c.max_relative_error);
  CHECK(c.max_relative_error < 0.05);
  CHECK(c.nc.max_norm_drift < 1e-8);
}

TEST_CASE("Gaussian momentum dynamics") {
  const double h = 0.9, mu = 1.2, w = 1.1;
  const PolynomialPotential ho = PolynomialPotential::harmonic(2, mu, w);
  // ground state is stationary up to e^{−iNωt/2}
  const ComplexMatrix M0 = ComplexMatrix::Identity(2, 2) / (mu * w * h);
  const PolyGaussian g(M0, ComplexVector::Zero(2), 1.0, Polynomial::constant(2, 1.0));
  for (double t : {0.4, 2.0, 7.0}) {
    const PolyGaussian gt = evolve_momentum_gaussian(g, ho, t, h);
    const RealVector p{{0.3, -0.5}};
    CHECK(std::abs(gt(p) - std::exp(-kI * w * t) * g(p)) < 1e-12);
  }

  // Schrödinger equation iħ∂_tφ̃ = (p²/2μ − (μω²ħ²/2)Δ_p) φ̃ for a generic packet
  ComplexMatrix M(2, 2);
  M << cplx(0.8, 0.2), cplx(0.1, -0.1), cplx(0.1, -0.1), cplx(1.3, 0.4);
  const PolyGaussian f(M, ComplexVector{{cplx(0.3, -0.7), cplx(-0.2, 0.5)}}, cplx(0.6, 0.1),
                       Polynomial::constant(2, 1.0));
  for (const PolynomialPotential& V : {ho, PolynomialPotential::free(2, mu)}) {
    const double om = V.harmonic_frequency();
    for (double t : {0.3, 1.7}) {
      const double dt = 1e-5;
      const PolyGaussian ft = evolve_momentum_gaussian(f, V, t, h);
      const PolyGaussian fp = evolve_momentum_gaussian(f, V, t + dt, h);
      const PolyGaussian fm = evolve_momentum_gaussian(f, V, t - dt, h);
      for (const RealVector& p : {RealVector{{0.2, 0.1}}, RealVector{{-0.6, 0.9}}}) {
        const cplx lhs = kI * h * (fp(p) - fm(p)) / (2.0 * dt);
        const cplx lap = ft.derivative(0).derivative(0)(p) + ft.derivative(1).derivative(1)(p);
        const cplx rhs = p.squaredNorm() / (2.0 * mu) * ft(p) - 0.5 * mu * om * om * h * h * lap;
        CHECK(std::abs(lhs - rhs) < 1e-6 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
  // a full period returns the packet (N = 2 gives phase e^{−2πi} = 1)
  const PolyGaussian back = evolve_momentum_gaussian(f, ho, 2.0 * kPi / w, h);
  CHECK(std::abs(back(RealVector{{0.4, -0.2}}) - f(RealVector{{0.4, -0.2}})) < 1e-10);

  Polynomial quartic(2);
  quartic.add_term({4, 0}, 1.0);
  CHECK_THROWS_AS(evolve_momentum_gaussian(f, PolynomialPotential(quartic, 1.0), 0.1, h), Error);
}

TEST_CASE("configuration wavefunction") {
  Rng rng(21);
  const double h = 0.7;
  const PosDefSymMatrix lam(rng.pos_def(2, 0.5, 1.5));
  const RealVector x0 = rng.normal_vector(2);
  const auto lab = CoherentLabel::real(x0, lam, h);
  const PolyGaussian psi = configuration_wavefunction(momentum_wavefunction(lab), lam, h);
  for (int k = 0; k < 5; ++k) {
    const RealVector x = rng.normal_vector(2);
    CHECK(std::abs(psi(x) - overlap(CoherentLabel::real(x, lam, h), lab)) < 1e-12);
  }
}

TEST_CASE("commutative continuity equation") {
  const double h = 1.0;
  const PosDefSymMatrix lam = PosDefSymMatrix::identity(2);
  // free packet with mean momentum
  ComplexMatrix M = 0.6 * ComplexMatrix::Identity(2, 2);
  const PolyGaussian packet(M, ComplexVector{{cplx(0.4, -0.3), cplx(-0.2, 0.1)}}, 1.0, Polynomial::constant(2, 1.0));
  ContinuityGrid grid;
  grid.center = RealVector::Zero(2);
  grid.half_width = 2.0;
  grid.points = 7;
  const ContinuityReport free = continuity_check_commutative(packet, PolynomialPotential::free(2), lam, grid, 1.0, h);
  CHECK(free.max_residual < 1e-5);
  CHECK(free.norm_error < 1e-6);
  CHECK(free.max_density_rate > 1e-3);  // the packet moves

  const ContinuityReport osc = continuity_check_commutative(packet, PolynomialPotential::harmonic(2), lam, grid, 1.0, h);
  CHECK(osc.max_residual < 1e-5);
  CHECK(osc.norm_error < 1e-6);

  const PolyGaussian ground(ComplexMatrix::Identity(2, 2), ComplexVector::Zero(2), 1.0, Polynomial::constant(2, 1.0));
  const ContinuityReport st = continuity_check_commutative(ground, PolynomialPotential::harmonic(2), lam, grid, 1.0, h);
  CHECK(st.max_density_rate < 1e-6);
  CHECK(st.max_divergence < 1e-6);

  // fast plane-wave factor against a step comparable to its wavelength
  const PolyGaussian fast(M, ComplexVector{{cplx(6.0, 0.0), cplx(0.0, 0.0)}}, 1.0, Polynomial::constant(2, 1.0));
  ContinuityGrid coarse = grid;
  coarse.h = 0.3;
  coarse.dt = 0.3;
  try {
    continuity_check_commutative(fast, PolynomialPotential::free(2), lam, coarse, 0.3, h);
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooCoarse);
  }
}
