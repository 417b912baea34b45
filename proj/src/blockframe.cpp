#include "nctk/blockframe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nctk {

BlockFrame BlockFrame::canonical(const RealVector& thetas) {
  BlockFrame f;
  f.thetas = thetas;
  f.rotation = RealMatrix::Identity(2 * thetas.size(), 2 * thetas.size());
  f.orientation = 1;
  for (int a = 0; a + 1 < thetas.size(); ++a) {
    if (std::abs(thetas(a) - thetas(a + 1)) <= 1e-9 * std::max(thetas(a), thetas(a + 1))) {
      f.degenerate = true;
    }
  }
  return f;
}

RealMatrix BlockFrame::theta_matrix() const { return AntisymMatrix::canonical(thetas).matrix(); }

RealMatrix BlockFrame::field() const { return rotation.transpose() * theta_matrix() * rotation; }

namespace {

// Rotate (e1, e2) inside their plane so that, at the component where the
// plane has most weight, e2 vanishes and e1 is positive. The rotation is
// proper, so e1ᵀ A e2 is unchanged.
void fix_plane_sign(RealVector& e1, RealVector& e2) {
  int kstar = 0;
  double best = -1.0;
  for (int k = 0; k < e1.size(); ++k) {
    const double w = e1(k) * e1(k) + e2(k) * e2(k);
    if (w > best * (1.0 + 1e-12) + 1e-300) {
      best = w;
      kstar = k;
    }
  }
  const double r = std::sqrt(best);
  const double c = e1(kstar) / r;
  const double s = e2(kstar) / r;
  RealVector n1 = c * e1 + s * e2;
  RealVector n2 = -s * e1 + c * e2;
  e1 = n1;
  e2 = n2;
}

}  // namespace

BlockFrame block_diagonalize(const RealMatrix& A, double tol) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "field matrix must be square");
  }
  const int N = static_cast<int>(A.rows());
  if (N == 0 || N % 2 != 0) {
    throw Error(ErrorCode::OddDimension, "dimension " + std::to_string(N) + " is not even");
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double sym = 0.5 * (A + A.transpose()).cwiseAbs().maxCoeff();
  if (sym > tol * scale) {
    throw Error(ErrorCode::NotAntisymmetric,
                "symmetric part " + std::to_string(sym) + " exceeds tolerance");
  }
  const RealMatrix As = 0.5 * (A - A.transpose());
  const int n = N / 2;

  // iA is Hermitian with eigenvalues ±θ; eigenvectors of +θ give the planes.
  const ComplexMatrix H = kI * As.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  const RealVector& ev = es.eigenvalues();

  BlockFrame f;
  f.thetas.resize(n);
  f.rotation.resize(N, N);
  for (int a = 0; a < n; ++a) {
    const int col = N - 1 - a;  // ascending order from the solver
    const double theta = ev(col);
    if (!(theta > tol * scale)) {
      throw Error(ErrorCode::DegenerateTheta,
                  "sector parameter " + std::to_string(theta) + " is not positive");
    }
    const ComplexVector v = es.eigenvectors().col(col);
    RealVector e1 = v.imag();
    RealVector e2 = v.real();
    e1.normalize();
    e2.normalize();
    fix_plane_sign(e1, e2);
    f.thetas(a) = theta;
    f.rotation.row(2 * a) = e1.transpose();
    f.rotation.row(2 * a + 1) = e2.transpose();
  }
  for (int a = 0; a + 1 < n; ++a) {
    if (f.thetas(a) - f.thetas(a + 1) <= 1e-9 * f.thetas(a)) f.degenerate = true;
  }
  f.orientation = f.rotation.determinant() >= 0.0 ? 1 : -1;
  return f;
}

BlockFrame block_diagonalize(const AntisymMatrix& A, double tol) {
  return block_diagonalize(A.matrix(), tol);
}

RealMatrix theta_inverse(const BlockFrame& frame, double tol) {
  const int n = frame.n();
  RealMatrix inv = RealMatrix::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    const double t = frame.thetas(a);
    if (!(t > tol)) {
      throw Error(ErrorCode::DegenerateTheta, "cannot invert a vanishing sector parameter");
    }
    inv(2 * a, 2 * a + 1) = -1.0 / t;
    inv(2 * a + 1, 2 * a) = 1.0 / t;
  }
  return inv;
}

namespace {
void check_dim(Eigen::Index d, const BlockFrame& frame) {
  if (d != frame.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected dimension " + std::to_string(frame.dim()) + ", got " + std::to_string(d));
  }
}
}  // namespace

RealVector rotate_to_frame(const RealVector& v, const BlockFrame& frame) {
  check_dim(v.size(), frame);
  return frame.rotation * v;
}

RealMatrix rotate_to_frame(const RealMatrix& m, const BlockFrame& frame) {
  check_dim(m.rows(), frame);
  check_dim(m.cols(), frame);
  return frame.rotation * m * frame.rotation.transpose();
}

RealVector rotate_from_frame(const RealVector& v, const BlockFrame& frame) {
  check_dim(v.size(), frame);
  return frame.rotation.transpose() * v;
}

RealMatrix rotate_from_frame(const RealMatrix& m, const BlockFrame& frame) {
  check_dim(m.rows(), frame);
  check_dim(m.cols(), frame);
  return frame.rotation.transpose() * m * frame.rotation;
}

double block_form_residual(const RealMatrix& A, const BlockFrame& frame) {
  return (rotate_to_frame(A, frame) - frame.theta_matrix()).cwiseAbs().maxCoeff();
}

double orthogonality_residual(const BlockFrame& frame) {
  const int N = frame.dim();
  return (frame.rotation.transpose() * frame.rotation - RealMatrix::Identity(N, N))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace nctk
