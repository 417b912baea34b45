#pragma once

#include <string>

#include "nctk/poly_gaussian.hpp"
#include "nctk/quadrature.hpp"

namespace nctk {

/// Label of a localized state |z;λ⟩; z is real for configuration points.
struct CoherentLabel {
  ComplexVector z;
  PosDefSymMatrix lambda;
  double hbar = 1.0;

  static CoherentLabel real(const RealVector& x, const PosDefSymMatrix& lambda, double hbar = 1.0);
  static CoherentLabel complex(const ComplexVector& z, const PosDefSymMatrix& lambda, double hbar = 1.0);

  int dim() const { return static_cast<int>(z.size()); }
  bool is_real(double tol = 0.0) const;
  RealVector x() const;  // real part; InvalidArgument when the label is complex
};

/// ⟨z₁;λ|z₂;λ⟩ = ((2π)ᴺ det λ)^{−1/2} exp(−½(z₁* − z₂)ᵀλ⁻¹(z₁* − z₂)).
cplx overlap(const CoherentLabel& s1, const CoherentLabel& s2);

/// ⟨p|z;λ⟩ = (2πħ)^{−N/2} e^{−iz·p/ħ} e^{−pλp/4ħ²} as a function of p.
PolyGaussian momentum_wavefunction(const CoherentLabel& s);

enum class OpKind { X, XX, X2, P, PP, P2 };

struct OpTag {
  OpKind kind = OpKind::X;
  int i = 0;
  int j = 0;

  /// Parses "X_i", "XX_ij" (as "XX_i_j"), "X2", "P_i", "PP_i_j", "P2" (0-based).
  static OpTag parse(const std::string& text);
  std::string str() const;
};

/// Closed-form ⟨x₁;λ|O|x₂;λ⟩ for real labels under the field (A may vanish).
cplx matrix_element(const OpTag& op, const CoherentLabel& s1, const CoherentLabel& s2,
                    const FieldConfig& field);

/// All elements for one pair of labels.
struct MatrixElementTable {
  cplx overlap = 0.0;
  ComplexVector X;
  ComplexMatrix XX;
  cplx X2 = 0.0;
  ComplexVector P;
  ComplexMatrix PP;
  cplx P2 = 0.0;

  /// Largest entrywise difference.
  double max_diff(const MatrixElementTable& o) const;
  double max_abs() const;
};

MatrixElementTable matrix_elements(const CoherentLabel& s1, const CoherentLabel& s2,
                                   const FieldConfig& field);
/// Commutative forms written directly in terms of W_{2λ} and its x₁-derivatives.
MatrixElementTable matrix_elements_commutative(const CoherentLabel& s1, const CoherentLabel& s2);
/// Momentum-space oracle: ∫dp ⟨x₁;λ|p⟩ (O ψ₂)(p) with x̂ = iħ∂_p − (1/2ħ)A p.
MatrixElementTable matrix_elements_quadrature(const CoherentLabel& s1, const CoherentLabel& s2,
                                              const FieldConfig& field,
                                              const QuadratureOptions& opts = {});

struct UncertaintyMatrices {
  ComplexMatrix dx;  // ¼λ + ½iA − ¼Aλ⁻¹A
  RealMatrix dp;     // ħ²λ⁻¹
};

UncertaintyMatrices uncertainty_matrices(const CoherentLabel& s, const FieldConfig& field);
/// Same quantities from quadrature expectation values.
UncertaintyMatrices uncertainty_matrices_quadrature(const CoherentLabel& s, const FieldConfig& field,
                                                    const QuadratureOptions& opts = {});
/// max |Δx_ij Δp_kl − ¼ħ²λ⁻¹_kl (λ + 2iA − Aλ⁻¹A)_ij|.
double uncertainty_product_residual(const UncertaintyMatrices& u, const CoherentLabel& s,
                                    const FieldConfig& field);

/// max over a p-grid of |⟨p|(x̂_i + (i/2ħ)(λ − iA)_ij p̂_j)|x;λ⟩ − x_i⟨p|x;λ⟩|.
double twisted_eigenstate_residual(const CoherentLabel& s, const FieldConfig& field,
                                   const std::vector<RealVector>& p_grid);

struct DisplacementResult {
  ComplexVector z;       // label of the displaced state
  cplx phase = 1.0;      // scalar prefactor
  std::string residual;  // remaining operator factor, "identity" when none
};

/// e^{−ia·p̂/ħ}|x;λ⟩ = |x + a;λ⟩.
DisplacementResult config_shift(const CoherentLabel& s, const RealVector& a);
/// e^{ip₀·x̂/ħ}|x;λ⟩ = e^{ip₀·x/ħ} e^{−p₀λp₀/4ħ²} |x − Ap₀/2ħ + iλp₀/2ħ; λ⟩.
DisplacementResult momentum_shift(const CoherentLabel& s, const RealVector& p0, const FieldConfig& field);

/// ⟨p|D|ψ⟩ for the shifted-wavefunction form e^{−iA p₀·p/2ħ²} ⟨p − p₀|x;λ⟩.
cplx momentum_shift_wavefunction(const CoherentLabel& s, const RealVector& p0, const FieldConfig& field,
                                 const RealVector& p);

/// max over the grid of |∂_s Φ_s − (−p₀·∂_p − (i/2ħ²) p₀ᵀA p) Φ_s| at s = s_eval, where
/// Φ_s(p) = ⟨p|e^{is p₀·x̂/ħ}|x;λ⟩ is taken from the closed form; derivatives by central differences.
double momentum_shift_generator_residual(const CoherentLabel& s, const RealVector& p0,
                                         const FieldConfig& field, const std::vector<RealVector>& p_grid,
                                         double s_eval = 0.5, double h = 1e-4);

/// Pairing ⟨χ|∫dx e^{ip·x̂/ħ}|x;λ⟩ by nested quadrature (x outer, momentum inner),
/// and the reference value (2πħ)^{N/2} χ̃(p)* for a Gaussian test state χ̃.
struct MomentumIdentityCheck {
  cplx lhs = 0.0;
  cplx rhs = 0.0;
  double residual = 0.0;
};
MomentumIdentityCheck momentum_from_coherent(const RealVector& p, const PosDefSymMatrix& lambda,
                                             const FieldConfig& field, const PolyGaussian& chi_tilde,
                                             const QuadratureOptions& opts = {});

/// Pairing ⟨χ|e^{ip₀·x̂/ħ}|x;λ⟩ computed by quadrature from either form of the displaced state.
struct DisplacementPairing {
  cplx complex_label_form = 0.0;
  cplx shifted_form = 0.0;
};
DisplacementPairing momentum_shift_pairing(const CoherentLabel& s, const RealVector& p0,
                                           const FieldConfig& field, const PolyGaussian& chi_tilde,
                                           const QuadratureOptions& opts = {});

}  // namespace nctk
