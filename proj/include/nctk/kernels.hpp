#pragma once

#include <vector>

#include "nctk/poly_gaussian.hpp"
#include "nctk/quadrature.hpp"

namespace nctk {

/// W_λ(x) = (πᴺ det λ)^{−1/2} exp(−xᵀλ⁻¹x).
double weierstrass(const RealVector& x, const PosDefSymMatrix& lambda);

/// Order 0 → [[1]], order 1 → N×1 zeros, order 2 → λ/2. UnsupportedOrder otherwise.
RealMatrix weierstrass_moments(const PosDefSymMatrix& lambda, int order);

/// (−λ_ij∂_i∂_j + 4xᵀλ⁻¹x − 2N) W_λ at x, with derivatives taken analytically.
double weierstrass_pde_residual(const RealVector& x, const PosDefSymMatrix& lambda);
/// Same operator with central differences of step h.
double weierstrass_pde_residual_fd(const RealVector& x, const PosDefSymMatrix& lambda, double h = 1e-4);

/// W_λ(x) from its momentum representation ∫dp/(2πħ)ᴺ e^{ix·p/ħ} e^{−pλp/4ħ²}.
double weierstrass_fourier_quadrature(const RealVector& x, const PosDefSymMatrix& lambda,
                                      double hbar = 1.0, const QuadratureOptions& opts = {});
/// ∫ W_λ(x) x^⊗order dx by Gauss–Hermite quadrature.
RealMatrix weierstrass_moments_quadrature(const PosDefSymMatrix& lambda, int order,
                                          const QuadratureOptions& opts = {});

/// f *_λ g with *_λ = exp(½ λ_ij ∂←_i ∂→_j). λ only needs to be symmetric;
/// λ = 0 gives the pointwise product. Pure polynomials use the terminating
/// series; everything else the Gaussian closed form.
PolyGaussian star_product(const PolyGaussian& f, const PolyGaussian& g, const RealMatrix& lambda);
PolyGaussian star_product(const PolyGaussian& f, const PolyGaussian& g, const PosDefSymMatrix& lambda);

/// Terminating derivative series; both inputs must be polynomials.
Polynomial star_product_series(const Polynomial& f, const Polynomial& g, const RealMatrix& lambda);
/// Closed-form Gaussian route, valid for polynomials as well. Throws DivergentStar.
PolyGaussian star_product_gaussian(const PolyGaussian& f, const PolyGaussian& g,
                                   const RealMatrix& lambda);

/// Brute-force oracle: f *_λ g at x from the double Fourier integral
/// ∫∫ f̃(k) g̃(q) e^{i(k+q)·x} e^{−½kλq}, for pure Gaussians f, g with real PD quadratic parts.
cplx star_product_fourier_quadrature(const PolyGaussian& f, const PolyGaussian& g,
                                     const RealMatrix& lambda, const RealVector& x,
                                     const QuadratureOptions& opts = {});

struct CommutativeLimitReport {
  std::vector<double> scales;
  std::vector<double> deviations;  // max coefficient deviation from f·g
  bool monotone = true;
  double final_deviation = 0.0;
};

/// Evaluates f *_{ε λ0} g − f g for each ε in the schedule.
CommutativeLimitReport star_commutative_limit_check(const Polynomial& f, const Polynomial& g,
                                                    const RealMatrix& lambda0,
                                                    const std::vector<double>& schedule);

}  // namespace nctk
