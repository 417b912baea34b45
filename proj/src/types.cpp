#include "nctk/types.hpp"

#include <cmath>
#include <string>

namespace nctk {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorCode::DegenerateTheta: return "DegenerateTheta";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::DivergentStar: return "DivergentStar";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::MismatchedLambda: return "MismatchedLambda";
    case ErrorCode::UnknownOpTag: return "UnknownOpTag";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::NotInvertibleField: return "NotInvertibleField";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NormDriftExceeded: return "NormDriftExceeded";
    case ErrorCode::NonHermitianHamiltonian: return "NonHermitianHamiltonian";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::UnsupportedPotential: return "UnsupportedPotential";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

PosDefSymMatrix::PosDefSymMatrix(const RealMatrix& m, double sym_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "positive definite matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m_);
  min_eig_ = es.eigenvalues().minCoeff();
  if (!(min_eig_ > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(min_eig_) + " is not positive");
  }
  inv_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
  inv_ = 0.5 * (inv_ + inv_.transpose()).eval();
  det_ = es.eigenvalues().prod();
}

PosDefSymMatrix PosDefSymMatrix::identity(int n, double scale) {
  return PosDefSymMatrix(RealMatrix::Identity(n, n) * scale);
}

AntisymMatrix::AntisymMatrix(const RealMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "antisymmetric matrix must be square");
  }
  const double scale = m.size() ? std::max(1.0, m.cwiseAbs().maxCoeff()) : 1.0;
  if (m.size() && (m + m.transpose()).cwiseAbs().maxCoeff() > 2.0 * tol * scale) {
    throw Error(ErrorCode::NotAntisymmetric, "symmetric part exceeds tolerance");
  }
  m_ = 0.5 * (m - m.transpose());
}

AntisymMatrix AntisymMatrix::canonical(const RealVector& thetas) {
  const int n = static_cast<int>(thetas.size());
  RealMatrix m = RealMatrix::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    m(2 * a, 2 * a + 1) = thetas(a);
    m(2 * a + 1, 2 * a) = -thetas(a);
  }
  return AntisymMatrix(m);
}

}  // namespace nctk
