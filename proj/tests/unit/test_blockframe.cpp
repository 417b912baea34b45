#include <doctest.h>

#include "nctk/blockframe.hpp"
#include "nctk/random.hpp"

using namespace nctk;

namespace {
RealMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  RealMatrix m(rows.size(), rows.begin()->size());
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}
}  // namespace

TEST_CASE("already canonical 2x2 field keeps the identity frame") {
  const BlockFrame f = block_diagonalize(mat({{0, 2}, {-2, 0}}));
  CHECK(f.n() == 1);
  CHECK(f.thetas(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK((f.rotation - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(f.orientation == 1);
  CHECK_FALSE(f.degenerate);
}

TEST_CASE("negative orientation block is flipped into the frame") {
  const BlockFrame f = block_diagonalize(mat({{0, -2}, {2, 0}}));
  CHECK(f.thetas(0) == doctest::Approx(2.0));
  CHECK(block_form_residual(mat({{0, -2}, {2, 0}}), f) < 1e-14);
  CHECK(f.orientation == -1);
}

TEST_CASE("frame convention is deterministic on a permuted instance") {
  // planes (x1, x3) with θ = 2 and (x0, x2) with θ = 1
  const RealMatrix A = mat({{0, 0, 1, 0}, {0, 0, 0, 2}, {-1, 0, 0, 0}, {0, -2, 0, 0}});
  const BlockFrame f = block_diagonalize(A);
  const RealMatrix expected = mat({{0, 1, 0, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 0, 1, 0}});
  CHECK((f.rotation - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(f.thetas(0) == doctest::Approx(2.0));
  CHECK(f.thetas(1) == doctest::Approx(1.0));
  CHECK(f.orientation == -1);  // odd permutation
}

TEST_CASE("constructed two-block instance recovers its thetas") {
  Rng rng(7);
  const RealMatrix Q = rng.orthogonal(4);
  const RealMatrix A = Q.transpose() * AntisymMatrix::canonical(RealVector{{1.0, 3.0}}).matrix() * Q;
  const BlockFrame f = block_diagonalize(A);
  CHECK(f.thetas(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.thetas(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(block_form_residual(A, f) < 1e-10);
  CHECK(orthogonality_residual(f) < 1e-10);
}

TEST_CASE("error conditions") {
  CHECK_THROWS_AS(block_diagonalize(RealMatrix::Zero(3, 3)), Error);
  try {
    block_diagonalize(RealMatrix::Zero(3, 3));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddDimension);
  }
  try {
    block_diagonalize(RealMatrix::Zero(2, 2));
    FAIL("expected DegenerateTheta");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateTheta);
  }
  try {
    block_diagonalize(mat({{0, 1}, {-0.5, 0}}));
    FAIL("expected NotAntisymmetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAntisymmetric);
  }
  try {
    AntisymMatrix(mat({{1, 0}, {0, 0}}));
    FAIL("expected NotAntisymmetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAntisymmetric);
  }
}

TEST_CASE("theta inverse") {
  const BlockFrame f1 = BlockFrame::canonical(RealVector{{2.0}});
  CHECK((theta_inverse(f1) - mat({{0, -0.5}, {0.5, 0}})).cwiseAbs().maxCoeff() == 0.0);
  const BlockFrame f2 = BlockFrame::canonical(RealVector{{3.0, 1.0}});
  const RealMatrix ti = theta_inverse(f2);
  CHECK(ti(0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(ti(1, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(ti(2, 3) == doctest::Approx(-1.0));
  CHECK(ti(3, 2) == doctest::Approx(1.0));
  CHECK((f2.theta_matrix() * ti - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const RealMatrix A = rng.antisym(6);
    const BlockFrame f = block_diagonalize(A);
    const RealMatrix viaFrame = f.rotation.transpose() * theta_inverse(f) * f.rotation;
    CHECK((A.inverse() - viaFrame).cwiseAbs().maxCoeff() < 1e-10);
  }
  BlockFrame bad = BlockFrame::canonical(RealVector{{1.0}});
  bad.thetas(0) = 0.0;
  CHECK_THROWS_AS(theta_inverse(bad), Error);
}

TEST_CASE("rotation helpers") {
  Rng rng(3);
  const BlockFrame f = block_diagonalize(rng.antisym(4));
  const RealVector v = rng.normal_vector(4);
  CHECK((rotate_from_frame(rotate_to_frame(v, f), f) - v).cwiseAbs().maxCoeff() < 1e-12);
  const RealMatrix I = RealMatrix::Identity(4, 4);
  CHECK((rotate_to_frame(I, f) - I).cwiseAbs().maxCoeff() < 1e-12);

  const RealMatrix lam = rng.pos_def(4);
  Eigen::SelfAdjointEigenSolver<RealMatrix> e1(lam), e2(rotate_to_frame(lam, f));
  CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);

  const BlockFrame id = BlockFrame::canonical(RealVector{{1.0, 2.0}});
  CHECK((rotate_to_frame(v, id) - v).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(rotate_to_frame(RealVector(RealVector::Zero(3)), f), Error);
}

TEST_CASE("property: random antisymmetric matrices") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int N = 2 * (1 + trial % 4);
    const RealMatrix A = rng.antisym(N, 0.1, 5.0);
    const BlockFrame f = block_diagonalize(A);
    REQUIRE(orthogonality_residual(f) < 1e-10);
    REQUIRE(block_form_residual(A, f) < 1e-9);
    for (int a = 0; a + 1 < f.n(); ++a) REQUIRE(f.thetas(a) >= f.thetas(a + 1));
    // singular values appear in pairs
    Eigen::JacobiSVD<RealMatrix> svd(A);
    for (int a = 0; a < f.n(); ++a) {
      REQUIRE(std::abs(f.thetas(a) - svd.singularValues()(2 * a)) < 1e-10);
      REQUIRE(std::abs(f.thetas(a) - svd.singularValues()(2 * a + 1)) < 1e-10);
    }
    const double det = f.rotation.determinant();
    REQUIRE(std::abs(std::abs(det) - 1.0) < 1e-10);
    REQUIRE(f.orientation == (det > 0 ? 1 : -1));
    const RealMatrix T = rotate_to_frame(A, f);
    for (int a = 0; a < f.n(); ++a) REQUIRE(T(2 * a, 2 * a + 1) > 0.0);
  }
}

TEST_CASE("degenerate thetas still yield a valid frame") {
  Rng rng(5);
  const RealMatrix Q = rng.orthogonal(4);
  const RealMatrix A = Q.transpose() * AntisymMatrix::canonical(RealVector{{1.5, 1.5}}).matrix() * Q;
  const BlockFrame f = block_diagonalize(A);
  CHECK(f.degenerate);
  CHECK(block_form_residual(A, f) < 1e-10);
  CHECK(orthogonality_residual(f) < 1e-10);
}
