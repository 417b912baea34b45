#pragma once

#include "nctk/types.hpp"

namespace nctk {

/// Orthogonal frame R bringing an antisymmetric A to 2×2 canonical blocks:
/// R·A·Rᵀ = Θ with Θ_{(α,a),(β,b)} = θ_α δ_{αβ} ε_{ab}, ε_{12} = +1.
struct BlockFrame {
  RealMatrix rotation;  // rows are the frame basis vectors, ordered (α,1),(α,2)
  RealVector thetas;    // positive, descending
  int orientation = 1;  // det R
  bool degenerate = false;

  int n() const { return static_cast<int>(thetas.size()); }
  int dim() const { return 2 * n(); }

  /// Frame with R = I for an already canonical field.
  static BlockFrame canonical(const RealVector& thetas);

  /// Θ in the frame basis.
  RealMatrix theta_matrix() const;
  /// The field in the original basis, Rᵀ·Θ·R.
  RealMatrix field() const;
};

/// Canonicalizes A via the Hermitian eigenproblem of iA (eigenvalues ±θ_α).
/// Throws OddDimension, NotAntisymmetric or DegenerateTheta.
BlockFrame block_diagonalize(const RealMatrix& A, double tol = 1e-9);
BlockFrame block_diagonalize(const AntisymMatrix& A, double tol = 1e-9);

/// (Θ⁻¹)_{(α,a),(β,b)} = −(1/θ_α) δ_{αβ} ε_{ab}.
RealMatrix theta_inverse(const BlockFrame& frame, double tol = 1e-12);

/// v ↦ R·v.
RealVector rotate_to_frame(const RealVector& v, const BlockFrame& frame);
/// M ↦ R·M·Rᵀ.
RealMatrix rotate_to_frame(const RealMatrix& m, const BlockFrame& frame);
RealVector rotate_from_frame(const RealVector& v, const BlockFrame& frame);
RealMatrix rotate_from_frame(const RealMatrix& m, const BlockFrame& frame);

/// max |R A Rᵀ − Θ|.
double block_form_residual(const RealMatrix& A, const BlockFrame& frame);
/// max |Rᵀ R − I|.
double orthogonality_residual(const BlockFrame& frame);

}  // namespace nctk
