#include "nctk/envrep.hpp"

#include <cmath>

#include "nctk/random.hpp"

namespace nctk {

namespace {
double eps(int a, int b) { return a == b ? 0.0 : (a == 0 ? 1.0 : -1.0); }

double window_max(const ComplexMatrix& m, const FockSpace& sp, int margin) {
  return window_residual(m, ComplexMatrix::Zero(m.rows(), m.cols()), sp, margin);
}

bool same_frame(const EnvelopingState& a, const EnvelopingState& b) {
  return a.levels == b.levels && a.hbar == b.hbar && a.frame.thetas.size() == b.frame.thetas.size() &&
         (a.frame.thetas - b.frame.thetas).cwiseAbs().maxCoeff() <= 1e-12 &&
         (a.frame.rotation - b.frame.rotation).cwiseAbs().maxCoeff() <= 1e-12 && a.op.rows() == b.op.rows();
}
}  // namespace

ComplexMatrix commutator(const FockOperator& a, const ComplexMatrix& phi) {
  return ComplexMatrix(a * phi) - ComplexMatrix(phi * a);
}

EnvelopingAlgebra::EnvelopingAlgebra(const BlockFrame& frame, int levels, double hbar)
    : alg_(frame, levels, hbar, false), levels_(levels) {
  for (int a = 0; a < frame.n(); ++a) {
    if (!(frame.thetas(a) > 0.0)) throw Error(ErrorCode::NotInvertibleField, "field has a vanishing sector");
  }
  A_ = frame.field();
  Ainv_ = rotate_from_frame(theta_inverse(frame), frame);
  for (int i = 0; i < frame.dim(); ++i) x_.push_back(alg_.x(i));
  for (int k = 0; k < frame.dim(); ++k) xf_.push_back(alg_.x_frame(k / 2, k % 2));
}

EnvelopingAlgebra EnvelopingAlgebra::from_field(const AntisymMatrix& A, int levels, double hbar, double tol) {
  if (A.dim() % 2 != 0) throw Error(ErrorCode::OddDimension, "field dimension is odd");
  const double scale = std::max(1.0, A.matrix().cwiseAbs().maxCoeff());
  Eigen::JacobiSVD<RealMatrix> svd(A.matrix());
  if (A.dim() == 0 || svd.singularValues().minCoeff() <= tol * scale) {
    throw Error(ErrorCode::NotInvertibleField, "conjugate field is not invertible");
  }
  return EnvelopingAlgebra(block_diagonalize(A, tol), levels, hbar);
}

ComplexMatrix EnvelopingAlgebra::X(int i, const ComplexMatrix& phi) const { return x_.at(i) * phi; }

ComplexMatrix EnvelopingAlgebra::P(int i, const ComplexMatrix& phi) const {
  ComplexMatrix r = ComplexMatrix::Zero(phi.rows(), phi.cols());
  for (int j = 0; j < N(); ++j) {
    const double c = Ainv_(i, j);
    if (c != 0.0) r += (-hbar() * c) * commutator(x_[j], phi);
  }
  return r;
}

ComplexMatrix EnvelopingAlgebra::P_frame(int alpha, int a, const ComplexMatrix& phi) const {
  const int b = 1 - a;
  return (hbar() / frame().thetas(alpha) * eps(a, b)) * commutator(x_frame(alpha, b), phi);
}

ComplexMatrix EnvelopingAlgebra::B(int alpha, const ComplexMatrix& phi) const { return alg_.b(alpha) * phi; }
ComplexMatrix EnvelopingAlgebra::B_dual(int alpha, const ComplexMatrix& phi) const {
  return alg_.bdag(alpha) * phi;
}
ComplexMatrix EnvelopingAlgebra::D(int alpha, const ComplexMatrix& phi) const { return phi * alg_.bdag(alpha); }
ComplexMatrix EnvelopingAlgebra::D_dual(int alpha, const ComplexMatrix& phi) const { return phi * alg_.b(alpha); }

Superoperator EnvelopingAlgebra::op_X(int i) const {
  return {"X_" + std::to_string(i), [this, i](const ComplexMatrix& phi) { return X(i, phi); }};
}

Superoperator EnvelopingAlgebra::op_P(int i) const {
  return {"P_" + std::to_string(i), [this, i](const ComplexMatrix& phi) { return P(i, phi); }};
}

EnvelopingState state_to_operator(const PolyGaussian& phi_tilde, const EnvelopingAlgebra& alg,
                                  const QuadratureOptions& opts) {
  const int N = alg.N();
  const int n = N / 2;
  if (phi_tilde.dim() != N) throw Error(ErrorCode::DimensionMismatch, "momentum function dimension");
  const double h = alg.hbar();
  const BlockFrame& f = alg.frame();
  const int K = alg.levels();
  const long dim = alg.space().dim();

  // weight: |φ̃| times the e^{−θ_α|p_α|²/4ħ²} envelope of the displacement entries
  const RealMatrix P = phi_tilde.quad().real() + frame_lambda(f).matrix() / (2.0 * h * h);
  Eigen::LLT<RealMatrix> llt(P);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "momentum function not integrable");
  const RealVector center = llt.solve(RealVector(phi_tilde.lin().real()));
  const double pref = std::pow(2.0 * kPi * h, -0.5 * N);
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<ComplexMatrix> Ds(n);
  ComplexMatrix full(dim, dim);
  auto integrand = [&](const RealVector& p, cplx* out) {
    const RealVector pf = f.rotation * p;
    for (int a = 0; a < n; ++a) {
      const double th = f.thetas(a);
      const cplx w = kI * th * cplx(pf(2 * a), pf(2 * a + 1)) / h;
      Ds[a] = displacement_matrix(w, 2.0 * th, K, inf);
    }
    const cplx c = pref * phi_tilde(p);
    if (n == 1) {
      Eigen::Map<ComplexMatrix>(out, dim, dim) = c * Ds[0];
      return;
    }
    // Kronecker product, mode 0 slowest
    full = Ds[0];
    for (int a = 1; a < n; ++a) {
      ComplexMatrix next(full.rows() * K, full.cols() * K);
      for (Eigen::Index r = 0; r < full.rows(); ++r)
        for (Eigen::Index s = 0; s < full.cols(); ++s) next.block(r * K, s * K, K, K) = full(r, s) * Ds[a];
      full.swap(next);
    }
    Eigen::Map<ComplexMatrix>(out, dim, dim) = c * full;
  };
  const QuadratureResult r = integrate_gaussian(center, P, static_cast<int>(dim * dim), integrand, opts);
  return alg.wrap(Eigen::Map<const ComplexMatrix>(r.value.data(), dim, dim));
}

ComplexMatrix isotropic_gaussian_image(double lambda, double theta, int levels) {
  const double r = (lambda - theta) / (lambda + theta);
  ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
  double v = 1.0 / (kPi * (lambda + theta));
  for (int k = 0; k < levels; ++k) {
    m(k, k) = v;
    v *= r;
  }
  return m;
}

cplx inner_product(const EnvelopingState& s1, const EnvelopingState& s2) {
  if (!same_frame(s1, s2)) throw Error(ErrorCode::FrameMismatch, "states live on different frames or truncations");
  double c = 1.0;
  for (int a = 0; a < s1.frame.n(); ++a) c *= 2.0 * kPi * s1.frame.thetas(a);
  // Tr(φ₁†φ₂) = Σ conj(φ₁)_ij (φ₂)_ij
  const cplx tr = (s1.op.conjugate().cwiseProduct(s2.op)).sum();
  return c * tr;
}

cplx momentum_inner_product(const PolyGaussian& f1, const PolyGaussian& f2, const QuadratureOptions& opts) {
  if (f1.dim() != f2.dim()) throw Error(ErrorCode::DimensionMismatch, "momentum function dimension");
  const PolyGaussian g = f1.conj().times(f2);
  const RealMatrix P = g.quad().real();
  Eigen::LLT<RealMatrix> llt(P);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "product not integrable");
  const RealVector center = llt.solve(RealVector(g.lin().real()));
  return integrate_gaussian(center, P, 1, [&](const RealVector& p, cplx* out) { out[0] = g(p); }, opts).value(0);
}

HeisenbergResiduals heisenberg_suite(const EnvelopingAlgebra& alg, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const int N = alg.N();
  const int n = N / 2;
  const int dim = alg.dim();
  const double h = alg.hbar();
  const FockSpace& sp = alg.space();
  const RealMatrix& A = alg.field();
  HeisenbergResiduals r;
  r.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix phi = rng.complex_normal_matrix(dim, dim);
    const ComplexMatrix psi = rng.complex_normal_matrix(dim, dim);
    std::vector<ComplexMatrix> Xp(N), Pp(N);
    for (int i = 0; i < N; ++i) {
      Xp[i] = alg.X(i, phi);
      Pp[i] = alg.P(i, phi);
    }
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        const ComplexMatrix xx = alg.X(i, Xp[j]) - alg.X(j, Xp[i]) - (kI * A(i, j)) * phi;
        r.xx = std::max(r.xx, window_max(xx, sp, 1));
        const ComplexMatrix xp = alg.X(i, Pp[j]) - alg.P(j, Xp[i]) - (i == j ? kI * h : cplx(0.0)) * phi;
        r.xp = std::max(r.xp, window_max(xp, sp, 1));
        const ComplexMatrix pp = alg.P(i, Pp[j]) - alg.P(j, Pp[i]);
        r.pp = std::max(r.pp, window_max(pp, sp, 1));
      }
      const EnvelopingState a = alg.wrap(phi), b = alg.wrap(psi);
      r.adjoint = std::max(r.adjoint, std::abs(inner_product(alg.wrap(Xp[i]), b) - inner_product(a, alg.wrap(alg.X(i, psi)))));
      r.adjoint = std::max(r.adjoint, std::abs(inner_product(alg.wrap(Pp[i]), b) - inner_product(a, alg.wrap(alg.P(i, psi)))));
      ComplexMatrix viaFrame = ComplexMatrix::Zero(dim, dim);
      for (int k = 0; k < N; ++k) viaFrame += alg.frame().rotation(k, i) * alg.P_frame(k / 2, k % 2, phi);
      r.frame_form = std::max(r.frame_form, (Pp[i] - viaFrame).cwiseAbs().maxCoeff());
    }
    for (int a = 0; a < n; ++a) {
      const double th = alg.frame().thetas(a);
      const ComplexMatrix pplus = alg.P_frame(a, 0, phi) + kI * alg.P_frame(a, 1, phi);
      const ComplexMatrix pminus = alg.P_frame(a, 0, phi) - kI * alg.P_frame(a, 1, phi);
      r.dual_relations = std::max(r.dual_relations,
                                  (alg.D(a, phi) - alg.B_dual(a, phi) - (kI * th / h) * pminus).cwiseAbs().maxCoeff());
      r.dual_relations = std::max(r.dual_relations,
                                  (alg.D_dual(a, phi) - alg.B(a, phi) + (kI * th / h) * pplus).cwiseAbs().maxCoeff());
      for (int b = 0; b < n; ++b) {
        using Op = ComplexMatrix (EnvelopingAlgebra::*)(int, const ComplexMatrix&) const;
        for (Op left : {static_cast<Op>(&EnvelopingAlgebra::B), static_cast<Op>(&EnvelopingAlgebra::B_dual)}) {
          for (Op right : {static_cast<Op>(&EnvelopingAlgebra::D), static_cast<Op>(&EnvelopingAlgebra::D_dual)}) {
            const ComplexMatrix c = (alg.*left)(a, (alg.*right)(b, phi)) - (alg.*right)(b, (alg.*left)(a, phi));
            r.left_right = std::max(r.left_right, c.cwiseAbs().maxCoeff());
          }
        }
      }
    }
  }
  return r;
}

json enveloping_state_to_json(const EnvelopingState& s) {
  return json{{"frame", {{"rotation", real_matrix_to_json(s.frame.rotation)},
                         {"thetas", real_vector_to_json(s.frame.thetas)},
                         {"orientation", s.frame.orientation}}},
              {"K", s.levels},
              {"hbar", s.hbar},
              {"matrix", complex_matrix_to_json(s.op)}};
}

EnvelopingState enveloping_state_from_json(const json& j) {
  try {
    EnvelopingState s;
    s.frame.rotation = real_matrix_from_json(j.at("frame").at("rotation"));
    s.frame.thetas = real_vector_from_json(j.at("frame").at("thetas"));
    s.frame.orientation = j.at("frame").value("orientation", 1);
    s.levels = j.at("K").get<int>();
    s.hbar = j.value("hbar", 1.0);
    s.op = complex_matrix_from_json(j.at("matrix"));
    long expect = 1;
    for (int a = 0; a < s.frame.n(); ++a) expect *= s.levels;
    if (s.op.rows() != expect || s.op.cols() != expect || s.frame.rotation.rows() != 2 * s.frame.n()) {
      throw Error(ErrorCode::ParseError, "enveloping state shape does not match frame and K");
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace nctk
