#pragma once

#include <cstdint>
#include <random>

#include "nctk/types.hpp"

namespace nctk {

/// Seeded generator for random test instances. Uses mt19937_64 with
/// hand-rolled uniform/normal draws so sequences are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int integer(int lo, int hi);  // inclusive

  RealVector normal_vector(int n, double scale = 1.0);
  RealMatrix normal_matrix(int r, int c, double scale = 1.0);
  ComplexMatrix complex_normal_matrix(int r, int c, double scale = 1.0);
  /// Haar-ish orthogonal matrix via QR of a Gaussian matrix.
  RealMatrix orthogonal(int n);
  /// Q diag(e) Qᵀ with eigenvalues uniform in [lo, hi].
  RealMatrix pos_def(int n, double lo = 0.5, double hi = 2.0);
  /// Qᵀ Θ Q for thetas uniform in [lo, hi].
  RealMatrix antisym(int n2, double lo = 0.3, double hi = 3.0);

 private:
  std::mt19937_64 eng_;
};

}  // namespace nctk
