#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nctk/envrep.hpp"
#include "nctk/kernels.hpp"

namespace nctk {

/// V(x) with real coefficients and total degree ≤ 4, together with the mass μ.
class PolynomialPotential {
 public:
  static constexpr int kMaxDegree = 4;

  /// DegreeTooHigh above degree 4; InvalidArgument for μ ≤ 0 or complex coefficients.
  PolynomialPotential(Polynomial v, double mu);

  static PolynomialPotential free(int dim, double mu = 1.0);
  /// ½μω²|x|².
  static PolynomialPotential harmonic(int dim, double mu = 1.0, double omega = 1.0);

  int dim() const { return v_.nvars(); }
  const Polynomial& polynomial() const { return v_; }
  double mass() const { return mu_; }
  bool is_free() const { return v_.is_zero(); }
  /// ω when V = ½μω²|x|² exactly, 0 otherwise.
  double harmonic_frequency() const;

 private:
  Polynomial v_;
  double mu_;
};

/// Symmetrized product over all distinct orderings of the operator factors named by idx.
FockOperator weyl_monomial(const MultiIndex& idx, const std::vector<FockOperator>& x);
/// Weyl-ordered V(x̂), then (V̂ + V̂†)/2. DegreeTooHigh above degree 4.
FockOperator hermitize(const PolynomialPotential& V, const std::vector<FockOperator>& x);
FockOperator hermitize(const PolynomialPotential& V, const EnvelopingAlgebra& alg);

/// Ĥ̂φ̂ = (ħ²/2μ) Σ_i [ŷ_i,[ŷ_i,φ̂]] + V̂_q φ̂ with ŷ_i = (A⁻¹)_ij x̂_j.
class Hamiltonian {
 public:
  Hamiltonian(const EnvelopingAlgebra& alg, FockOperator vq, double mu);
  static Hamiltonian zero(const EnvelopingAlgebra& alg);

  int dim() const { return static_cast<int>(vq_.rows()); }
  double hbar() const { return hbar_; }
  const FockOperator& potential() const { return vq_; }

  ComplexMatrix apply(const ComplexMatrix& phi) const;
  ComplexMatrix kinetic(const ComplexMatrix& phi) const;
  /// The double sum (ħ²/2μ)(A⁻¹)_ij(A⁻¹)_ik[x̂_j,[x̂_k,φ̂]] term by term.
  ComplexMatrix kinetic_double_sum(const ComplexMatrix& phi) const;
  /// Matrix of Ĥ̂ on vec(φ̂) (column-major), dim² × dim².
  FockOperator matrix() const;
  Superoperator superop() const;

 private:
  std::vector<FockOperator> x_, y_;
  RealMatrix ainv_;
  FockOperator vq_;
  double coeff_;
  double hbar_;
};

/// Superoperator form of hamiltonian_superop for callers that only need the map.
Superoperator hamiltonian_superop(const FockOperator& vq, const EnvelopingAlgebra& alg, double mu);

/// Expm: dense exponential of the vectorized superoperator. Rk4: matrix-free.
/// Blocks: exact propagation per invariant block by diagonalization.
/// Cayley: Crank–Nicolson per invariant block with a sparse LU, unitary by construction.
/// Auto: Expm when Kⁿ ≤ 32, Blocks when every block has ≤ max_block entries, Cayley otherwise.
enum class Integrator { Auto, Expm, Rk4, Blocks, Cayley };
std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& s);

struct EvolutionConfig {
  double t_final = 1.0;
  int steps = 1000;
  Integrator integrator = Integrator::Auto;
  double norm_tolerance = 1e-8;
  double hermiticity_tolerance = 1e-8;
  std::uint64_t seed = 1;
  /// Keep every state of the trajectory (memory grows with steps).
  bool keep_states = false;
  /// Auto picks Blocks when the largest invariant block has at most this many entries.
  int max_block = 96;
};

struct TrajectoryPoint {
  double t = 0.0;
  double norm = 0.0;    // inner(s_t, s_t)
  double energy = 0.0;  // inner(s_t, Ĥ̂ s_t) / inner(s_t, s_t)
  std::vector<cplx> x;  // ⟨x̂_{α,a}⟩ in the frame, ordered (α,a)
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<EnvelopingState> states;
  EnvelopingState final_state;
  Integrator used = Integrator::Auto;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
};

/// iħ dφ̂/dt = Ĥ̂ φ̂ on a uniform grid of cfg.steps steps.
/// NonHermitianHamiltonian when the seeded adjointness probe fails; NormDriftExceeded when
/// |inner(s_t,s_t) − inner(s₀,s₀)| exceeds cfg.norm_tolerance at any step.
Trajectory evolve(const EnvelopingState& s0, const Hamiltonian& H, const EnvelopingAlgebra& alg,
                  const EvolutionConfig& cfg);

/// max |inner(φ₁, Ĥ̂φ₂) − inner(Ĥ̂φ₁, φ₂)| / (‖φ₁‖‖Ĥ̂φ₂‖ + ‖Ĥ̂φ₁‖‖φ₂‖) over seeded random pairs.
double hermiticity_residual(const Hamiltonian& H, const EnvelopingAlgebra& alg, int samples, std::uint64_t seed);

/// Columns t, norm, energy, then x_<α>_<a>_re, x_<α>_<a>_im.
std::string trajectory_csv(const Trajectory& traj);

/// Commutative isotropic oscillator in a plain two-mode Fock basis: ⟨x(t)⟩ for the coherent
/// state centred at (x0, p0). Uses no other toolkit module.
struct OscillatorOracle {
  std::vector<double> t;
  std::vector<RealVector> x;
};
OscillatorOracle commutative_oscillator(const RealVector& x0, const RealVector& p0, double mu, double omega,
                                        double hbar, int levels, const std::vector<double>& times);

/// NC oscillator (n=1, frame θ) started from the displaced ground-state packet at x0, compared with
/// the commutative oracle on ⟨x̂(t)⟩; error is max_t |Δx| / max_t |x_oracle|.
struct OscillatorComparison {
  double theta = 0.0;
  int levels = 0;
  double max_relative_error = 0.0;
  Trajectory nc;
  OscillatorOracle oracle;
};
OscillatorComparison compare_with_commutative_oscillator(double theta, int levels, const RealVector& x0,
                                                         double t_final, int steps, double mu = 1.0,
                                                         double omega = 1.0, double hbar = 1.0);

/// Exact evolution of a Gaussian momentum function φ̃(p) = s e^{−½pMp + ℓp} under free or isotropic
/// harmonic V (commutative). UnsupportedPotential otherwise; InvalidArgument for non-Gaussian input.
PolyGaussian evolve_momentum_gaussian(const PolyGaussian& phi_tilde, const PolynomialPotential& V, double t,
                                      double hbar = 1.0);

/// ψ_λ(x) = ∫dᴺp (2πħ)^{−N/2} e^{ix·p/ħ} e^{−pλp/4ħ²} φ̃(p) in closed form (Gaussian φ̃).
PolyGaussian configuration_wavefunction(const PolyGaussian& phi_tilde, const PosDefSymMatrix& lambda,
                                        double hbar = 1.0);

struct ContinuityGrid {
  RealVector center;
  double half_width = 2.0;
  int points = 9;  // per axis
  double h = 1e-3;   // spatial difference step
  double dt = 1e-3;  // time difference step
  int time_samples = 5;
};

struct ContinuityReport {
  double max_residual = 0.0;       // max |∂_tρ_λ + ∇·J_λ| at step h
  double residual_half_step = 0.0;  // same at h/2
  double max_density_rate = 0.0;    // max |∂_tρ_λ|
  double max_divergence = 0.0;      // max |∇·J_λ|
  double norm_error = 0.0;          // max_t |∫ρ_λ − 1|
  int samples = 0;
};

/// ρ_λ = ψ*_λ *_λ ψ_λ and J_λ = (ħ/2iμ)(ψ*_λ *_λ ∇ψ_λ − ∇ψ*_λ *_λ ψ_λ) along the exact evolution of
/// the normalized φ̃; derivatives by central differences. GridTooCoarse when halving (h, dt) does not
/// shrink the residual by a factor in [2, 8] (second order), unless both residuals are below 1e−10.
ContinuityReport continuity_check_commutative(const PolyGaussian& psi0_tilde, const PolynomialPotential& V,
                                              const PosDefSymMatrix& lambda, const ContinuityGrid& grid,
                                              double t_final, double hbar = 1.0);

}  // namespace nctk
