#include "nctk/random.hpp"

#include <cmath>

namespace nctk {

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double Rng::normal() {
  // Box–Muller; one value per call keeps the stream simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

int Rng::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(eng_() % span);
}

RealVector Rng::normal_vector(int n, double scale) {
  RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * normal();
  return v;
}

RealMatrix Rng::normal_matrix(int r, int c, double scale) {
  RealMatrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = scale * normal();
  return m;
}

ComplexMatrix Rng::complex_normal_matrix(int r, int c, double scale) {
  ComplexMatrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = cplx(scale * normal(), scale * normal());
  return m;
}

RealMatrix Rng::orthogonal(int n) {
  const RealMatrix g = normal_matrix(n, n);
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) < 0) q.col(i) *= -1.0;
  }
  return q;
}

RealMatrix Rng::pos_def(int n, double lo, double hi) {
  const RealMatrix q = orthogonal(n);
  RealVector e(n);
  for (int i = 0; i < n; ++i) e(i) = uniform(lo, hi);
  RealMatrix m = q * e.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

RealMatrix Rng::antisym(int n2, double lo, double hi) {
  const int n = n2 / 2;
  RealMatrix theta = RealMatrix::Zero(n2, n2);
  for (int a = 0; a < n; ++a) {
    const double t = uniform(lo, hi);
    theta(2 * a, 2 * a + 1) = t;
    theta(2 * a + 1, 2 * a) = -t;
  }
  const RealMatrix q = orthogonal(n2);
  RealMatrix m = q.transpose() * theta * q;
  return 0.5 * (m - m.transpose());
}

}  // namespace nctk
