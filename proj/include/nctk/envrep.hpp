#pragma once

#include <functional>
#include <string>

#include "nctk/fock.hpp"
#include "nctk/json_io.hpp"

namespace nctk {

/// Operator φ̂ on the classical (b-sector) space representing a quantum state.
struct EnvelopingState {
  ComplexMatrix op;
  BlockFrame frame;
  int levels = 0;
  double hbar = 1.0;
};

/// Linear map on enveloping states.
struct Superoperator {
  std::string label;
  std::function<ComplexMatrix(const ComplexMatrix&)> apply;
  EnvelopingState operator()(const EnvelopingState& s) const { return {apply(s.op), s.frame, s.levels, s.hbar}; }
};

/// X̂, P̂ and the frame-form operators on the classical space of an invertible field.
class EnvelopingAlgebra {
 public:
  EnvelopingAlgebra(const BlockFrame& frame, int levels, double hbar = 1.0);
  /// NotInvertibleField when A is singular (θ_α ≤ tol·max(1, |A|)).
  static EnvelopingAlgebra from_field(const AntisymMatrix& A, int levels, double hbar = 1.0, double tol = 1e-9);

  const SectorAlgebra& sectors() const { return alg_; }
  const BlockFrame& frame() const { return alg_.frame(); }
  const FockSpace& space() const { return alg_.space(); }
  int levels() const { return levels_; }
  int dim() const { return static_cast<int>(alg_.space().dim()); }
  int N() const { return alg_.frame().dim(); }
  double hbar() const { return alg_.hbar(); }
  const RealMatrix& field() const { return A_; }
  const RealMatrix& field_inverse() const { return Ainv_; }
  const FockOperator& x(int i) const { return x_.at(i); }
  const FockOperator& x_frame(int alpha, int a) const { return xf_.at(2 * alpha + a); }

  ComplexMatrix X(int i, const ComplexMatrix& phi) const;
  /// −ħ(A⁻¹)_ij [x̂_j, φ̂]
  ComplexMatrix P(int i, const ComplexMatrix& phi) const;
  /// (ħ/θ_α) ε_ab [x̂_{α,b}, φ̂]
  ComplexMatrix P_frame(int alpha, int a, const ComplexMatrix& phi) const;
  ComplexMatrix B(int alpha, const ComplexMatrix& phi) const;       // b φ̂
  ComplexMatrix B_dual(int alpha, const ComplexMatrix& phi) const;  // b† φ̂
  ComplexMatrix D(int alpha, const ComplexMatrix& phi) const;       // φ̂ b†
  ComplexMatrix D_dual(int alpha, const ComplexMatrix& phi) const;  // φ̂ b

  Superoperator op_X(int i) const;
  Superoperator op_P(int i) const;

  EnvelopingState wrap(const ComplexMatrix& op) const { return {op, frame(), levels_, hbar()}; }

 private:
  SectorAlgebra alg_;
  int levels_;
  RealMatrix A_, Ainv_;
  std::vector<FockOperator> x_, xf_;
};

ComplexMatrix commutator(const FockOperator& a, const ComplexMatrix& phi);

/// φ̂ = ∫ dᴺp (2πħ)^{−N/2} e^{ip·x̂/ħ} φ̃(p) by tensor Gauss–Hermite quadrature; per sector the
/// exponential is the displacement with w_α = iθ_α p_{α,+}/ħ in the frame.
/// Escalation stops once the matrix entries move by less than 1e−6 between orders.
EnvelopingState state_to_operator(const PolyGaussian& phi_tilde, const EnvelopingAlgebra& alg,
                                  const QuadratureOptions& opts = {.tol = 1e-6});

/// Closed form for n = 1 and φ̃ = (2πħ)^{−1} e^{−λp²/4ħ²}: diagonal r^k/(π(λ+θ)), r = (λ−θ)/(λ+θ).
ComplexMatrix isotropic_gaussian_image(double lambda, double theta, int levels);

/// (∏ 2πθ_α) Tr(φ̂₁† φ̂₂); FrameMismatch when frames or truncations differ.
cplx inner_product(const EnvelopingState& s1, const EnvelopingState& s2);

/// Oracle ∫ dᴺp φ̃₁(p)* φ̃₂(p).
cplx momentum_inner_product(const PolyGaussian& f1, const PolyGaussian& f2, const QuadratureOptions& opts = {});

struct HeisenbergResiduals {
  double xx = 0.0;  // max |[X̂_i,X̂_j]φ − iA_ij φ|
  double xp = 0.0;  // max |[X̂_i,P̂_j]φ − iħδ_ij φ|
  double pp = 0.0;  // max |[P̂_i,P̂_j]φ|
  double adjoint = 0.0;         // max |inner(Oφ₁,φ₂) − inner(φ₁,Oφ₂)| over X̂, P̂
  double frame_form = 0.0;      // max |P̂_i − rotated frame-form P̂|
  double left_right = 0.0;      // max |[B̂, D̂]|-type residual over all pairs
  double dual_relations = 0.0;  // D̂ = B̂‡ + (iθ/ħ)P̂₋ and D̂‡ = B̂ − (iθ/ħ)P̂₊
  int samples = 0;
};

/// Commutator table and adjointness over random φ̂ (window margin 1 for the table).
HeisenbergResiduals heisenberg_suite(const EnvelopingAlgebra& alg, int samples, std::uint64_t seed);

json enveloping_state_to_json(const EnvelopingState& s);
EnvelopingState enveloping_state_from_json(const json& j);

}  // namespace nctk
