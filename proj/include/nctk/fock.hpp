#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "nctk/blockframe.hpp"
#include "nctk/coherent.hpp"

namespace nctk {

using FockOperator = Eigen::SparseMatrix<cplx>;

/// One bosonic mode truncated to levels 0..K−1 with [c, c†] = two_theta.
struct FockMode {
  int levels = 32;
  double two_theta = 1.0;
  std::string label;
};

/// Tensor product of truncated modes; mode 0 varies slowest.
class FockSpace {
 public:
  explicit FockSpace(std::vector<FockMode> modes);

  int num_modes() const { return static_cast<int>(modes_.size()); }
  const FockMode& mode(int k) const { return modes_.at(k); }
  long dim() const { return dim_; }
  long stride(int k) const { return strides_.at(k); }
  int level(long index, int k) const { return static_cast<int>((index / strides_[k]) % modes_[k].levels); }
  /// True when every mode level is ≤ K−1−margin.
  bool in_window(long index, int margin) const;

  /// c|k⟩ = √(two_theta·k)|k−1⟩ on mode k.
  FockOperator lowering(int k) const;
  FockOperator raising(int k) const;
  FockOperator identity() const;

 private:
  std::vector<FockMode> modes_;
  std::vector<long> strides_;
  long dim_ = 1;
};

FockOperator commutator(const FockOperator& a, const FockOperator& b);
/// max |a − b| over the block whose rows and columns both lie in the window.
double window_residual(const FockOperator& a, const FockOperator& b, const FockSpace& space, int margin = 1);
double window_residual(const ComplexMatrix& a, const ComplexMatrix& b, const FockSpace& space, int margin = 1);

/// Ladder matrices for a single mode (dense), b|k⟩ = √(2θk)|k−1⟩.
ComplexMatrix ladder_lowering(int levels, double two_theta);

/// Operators of the sector algebra for a block frame.
/// Full space: modes b_0..b_{n−1}, d_0..d_{n−1}. Classical space: b modes only.
class SectorAlgebra {
 public:
  SectorAlgebra(const BlockFrame& frame, int levels, double hbar = 1.0, bool with_d = true);

  const BlockFrame& frame() const { return frame_; }
  const FockSpace& space() const { return space_; }
  double hbar() const { return hbar_; }
  int n() const { return frame_.n(); }
  bool has_d() const { return with_d_; }

  const FockOperator& b(int alpha) const { return b_.at(alpha); }
  const FockOperator& bdag(int alpha) const { return bd_.at(alpha); }
  const FockOperator& d(int alpha) const;
  const FockOperator& ddag(int alpha) const;

  /// x̂_{α,1} = (b+b†)/2, x̂_{α,2} = −i(b−b†)/2; a ∈ {0,1}.
  FockOperator x_frame(int alpha, int a) const;
  /// p̂_{α,1} = (iħ/2θ)(b†−b+d†−d), p̂_{α,2} = −(ħ/2θ)(b†+b−d†−d); needs the d sector.
  FockOperator p_frame(int alpha, int a) const;
  /// p̂_{α,±} = p̂_{α,1} ± i p̂_{α,2}.
  FockOperator p_plus(int alpha) const;
  FockOperator p_minus(int alpha) const;
  /// u, u†, v, v† with a ∈ {0,1}.
  FockOperator u(int alpha, int a) const;
  FockOperator udag(int alpha, int a) const;
  FockOperator v(int alpha, int a) const;
  FockOperator vdag(int alpha, int a) const;
  /// Original coordinates x̂_i = R_{(α,a),i} x̂_{α,a} and p̂_i likewise.
  FockOperator x(int i) const;
  FockOperator p(int i) const;

 private:
  BlockFrame frame_;
  double hbar_;
  bool with_d_;
  FockSpace space_;
  std::vector<FockOperator> b_, bd_, d_, dd_;
};

enum class NormTag { Standard, ScaledVacuum };

/// Coefficients in the orthonormal truncated basis. With the ScaledVacuum tag the
/// physical inner product carries the extra factor vacuum_norm2.
struct FockState {
  ComplexVector coeffs;
  NormTag tag = NormTag::Standard;
  double vacuum_norm2 = 1.0;
  double tail_mass = 0.0;
};

cplx inner(const FockState& a, const FockState& b);

/// Σ_{k≥K} |⟨k|α⟩|² for a standard coherent state with |α|² = alpha2.
double coherent_tail_mass(double alpha2, int levels);
/// Smallest K = start·2^j ≤ cap whose tail mass is below tol; TruncationTooSmall otherwise.
int levels_for(double alpha2, int start = 32, int cap = 128, double tol = 1e-10);

/// Tensor coherent vector exp(Σ (w_k c_k† − w_k* c_k)/two_theta_k)|0⟩ over all modes of the space.
FockState coherent_vector(const FockSpace& space, const std::vector<cplx>& w, double tail_tol = 1e-10);

/// |x;θ_α⟩ = |z_α;Ω_b⟩ ⊗ |z*_α;Ω_d⟩ with z_α = x_{α,1} + i x_{α,2} in the frame; scaled-vacuum tagged,
/// vacuum_norm2 = ∏ 1/(2πθ_α). Requires the d sector.
FockState configuration_coherent_vector(const SectorAlgebra& alg, const RealVector& x, double tail_tol = 1e-10);

/// λ = Rᵀ diag(θ_α, θ_α) R, the width matched to the frame.
PosDefSymMatrix frame_lambda(const BlockFrame& frame);

/// Single-mode exp((ζ c† − ζ* c)/two_theta) by the exact column recurrence.
ComplexMatrix displacement_matrix(cplx zeta, double two_theta, int levels, double tail_tol = 1e-10);
/// Oracle: matrix exponential of the truncated generator.
ComplexMatrix displacement_matrix_expm(cplx zeta, double two_theta, int levels);

/// Embeds a single-mode dense matrix on mode k of the space.
FockOperator embed(const FockSpace& space, int k, const ComplexMatrix& op);

/// Result of the commutator-table check.
struct CommutatorTableReport {
  std::vector<std::pair<std::string, double>> rows;  // identity name, window residual
  double max_residual = 0.0;
};
CommutatorTableReport commutator_table(const SectorAlgebra& alg);

}  // namespace nctk
