#include "nctk/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace nctk {

namespace {
using Triplet = Eigen::Triplet<cplx>;

double eps(int a, int b) { return a == b ? 0.0 : (a == 0 ? 1.0 : -1.0); }
double delta(int a, int b) { return a == b ? 1.0 : 0.0; }
}  // namespace

FockSpace::FockSpace(std::vector<FockMode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw Error(ErrorCode::InvalidArgument, "Fock space needs at least one mode");
  for (const auto& m : modes_) {
    if (m.levels < 4) throw Error(ErrorCode::InvalidArgument, "truncation needs at least 4 levels");
    if (!(m.two_theta > 0.0)) throw Error(ErrorCode::DegenerateTheta, "mode normalization must be positive");
  }
  strides_.assign(modes_.size(), 1);
  for (int k = num_modes() - 1; k >= 0; --k) {
    strides_[k] = dim_;
    dim_ *= modes_[k].levels;
  }
}

bool FockSpace::in_window(long index, int margin) const {
  for (int k = 0; k < num_modes(); ++k) {
    if (level(index, k) > modes_[k].levels - 1 - margin) return false;
  }
  return true;
}

FockOperator FockSpace::lowering(int k) const {
  std::vector<Triplet> t;
  const long s = stride(k);
  const double tt = modes_.at(k).two_theta;
  for (long i = 0; i < dim_; ++i) {
    const int l = level(i, k);
    if (l > 0) t.emplace_back(i - s, i, std::sqrt(tt * l));
  }
  FockOperator m(dim_, dim_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

FockOperator FockSpace::raising(int k) const { return FockOperator(lowering(k).adjoint()); }

FockOperator FockSpace::identity() const {
  FockOperator m(dim_, dim_);
  m.setIdentity();
  return m;
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  return FockOperator(a * b - b * a);
}

double window_residual(const FockOperator& a, const FockOperator& b, const FockSpace& space, int margin) {
  if (a.rows() != space.dim() || b.rows() != space.dim()) throw Error(ErrorCode::DimensionMismatch, "operator size");
  const FockOperator d = a - b;
  double r = 0.0;
  for (int c = 0; c < d.outerSize(); ++c) {
    if (!space.in_window(c, margin)) continue;
    for (FockOperator::InnerIterator it(d, c); it; ++it) {
      if (space.in_window(it.row(), margin)) r = std::max(r, std::abs(it.value()));
    }
  }
  return r;
}

double window_residual(const ComplexMatrix& a, const ComplexMatrix& b, const FockSpace& space, int margin) {
  if (a.rows() != space.dim() || b.rows() != space.dim()) throw Error(ErrorCode::DimensionMismatch, "operator size");
  std::vector<long> w;
  for (long i = 0; i < space.dim(); ++i)
    if (space.in_window(i, margin)) w.push_back(i);
  double r = 0.0;
  for (long c : w)
    for (long i : w) r = std::max(r, std::abs(a(i, c) - b(i, c)));
  return r;
}

ComplexMatrix ladder_lowering(int levels, double two_theta) {
  ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) m(k - 1, k) = std::sqrt(two_theta * k);
  return m;
}

SectorAlgebra::SectorAlgebra(const BlockFrame& frame, int levels, double hbar, bool with_d)
    : frame_(frame), hbar_(hbar), with_d_(with_d), space_([&] {
        std::vector<FockMode> modes;
        for (int a = 0; a < frame.n(); ++a)
          modes.push_back({levels, 2.0 * frame.thetas(a), "b" + std::to_string(a)});
        if (with_d)
          for (int a = 0; a < frame.n(); ++a)
            modes.push_back({levels, 2.0 * frame.thetas(a), "d" + std::to_string(a)});
        return FockSpace(modes);
      }()) {
  if (!(hbar > 0.0)) throw Error(ErrorCode::InvalidArgument, "hbar must be positive");
  const int n = frame.n();
  for (int a = 0; a < n; ++a) {
    b_.push_back(space_.lowering(a));
    bd_.push_back(space_.raising(a));
    if (with_d) {
      d_.push_back(space_.lowering(n + a));
      dd_.push_back(space_.raising(n + a));
    }
  }
}

const FockOperator& SectorAlgebra::d(int alpha) const {
  if (!with_d_) throw Error(ErrorCode::InvalidArgument, "d sector not materialized");
  return d_.at(alpha);
}

const FockOperator& SectorAlgebra::ddag(int alpha) const {
  if (!with_d_) throw Error(ErrorCode::InvalidArgument, "d sector not materialized");
  return dd_.at(alpha);
}

FockOperator SectorAlgebra::x_frame(int alpha, int a) const {
  if (a == 0) return FockOperator(0.5 * (b(alpha) + bdag(alpha)));
  return FockOperator(cplx(0.0, -0.5) * (b(alpha) - bdag(alpha)));
}

FockOperator SectorAlgebra::p_frame(int alpha, int a) const {
  const double th = frame_.thetas(alpha);
  if (a == 0) {
    return FockOperator(kI * hbar_ / (2.0 * th) * (bdag(alpha) - b(alpha) + ddag(alpha) - d(alpha)));
  }
  return FockOperator(-hbar_ / (2.0 * th) * (bdag(alpha) + b(alpha) - ddag(alpha) - d(alpha)));
}

FockOperator SectorAlgebra::p_plus(int alpha) const {
  return FockOperator(p_frame(alpha, 0) + kI * p_frame(alpha, 1));
}

FockOperator SectorAlgebra::p_minus(int alpha) const {
  return FockOperator(p_frame(alpha, 0) - kI * p_frame(alpha, 1));
}

// u_a = x_a + iε_ab x_b, u†_a = x_a − iε_ab x_b
FockOperator SectorAlgebra::u(int alpha, int a) const {
  const int o = 1 - a;
  return FockOperator(x_frame(alpha, a) + kI * eps(a, o) * x_frame(alpha, o));
}

FockOperator SectorAlgebra::udag(int alpha, int a) const {
  const int o = 1 - a;
  return FockOperator(x_frame(alpha, a) - kI * eps(a, o) * x_frame(alpha, o));
}

// v_a = (δ_ab − iε_ab)(x_b + (iθ/ħ)p_b), v†_a = (δ_ab + iε_ab)(x_b − (iθ/ħ)p_b)
FockOperator SectorAlgebra::v(int alpha, int a) const {
  const double c = frame_.thetas(alpha) / hbar_;
  FockOperator r(space_.dim(), space_.dim());
  for (int bb = 0; bb < 2; ++bb) {
    const cplx coef = delta(a, bb) - kI * eps(a, bb);
    r += coef * FockOperator(x_frame(alpha, bb) + kI * c * p_frame(alpha, bb));
  }
  return r;
}

FockOperator SectorAlgebra::vdag(int alpha, int a) const {
  const double c = frame_.thetas(alpha) / hbar_;
  FockOperator r(space_.dim(), space_.dim());
  for (int bb = 0; bb < 2; ++bb) {
    const cplx coef = delta(a, bb) + kI * eps(a, bb);
    r += coef * FockOperator(x_frame(alpha, bb) - kI * c * p_frame(alpha, bb));
  }
  return r;
}

FockOperator SectorAlgebra::x(int i) const {
  FockOperator r(space_.dim(), space_.dim());
  for (int k = 0; k < frame_.dim(); ++k) {
    const double c = frame_.rotation(k, i);
    if (c != 0.0) r += c * x_frame(k / 2, k % 2);
  }
  return r;
}

FockOperator SectorAlgebra::p(int i) const {
  FockOperator r(space_.dim(), space_.dim());
  for (int k = 0; k < frame_.dim(); ++k) {
    const double c = frame_.rotation(k, i);
    if (c != 0.0) r += c * p_frame(k / 2, k % 2);
  }
  return r;
}

cplx inner(const FockState& a, const FockState& b) {
  if (a.coeffs.size() != b.coeffs.size()) throw Error(ErrorCode::DimensionMismatch, "state size");
  if (a.tag != b.tag || a.vacuum_norm2 != b.vacuum_norm2) {
    throw Error(ErrorCode::InvalidArgument, "states carry different normalization tags");
  }
  const cplx v = a.coeffs.dot(b.coeffs);
  return a.tag == NormTag::ScaledVacuum ? a.vacuum_norm2 * v : v;
}

double coherent_tail_mass(double alpha2, int levels) {
  if (alpha2 == 0.0) return 0.0;
  // Poisson tail Σ_{k≥K} e^{−a} a^k / k!
  double logp = -alpha2 + levels * std::log(alpha2) - std::lgamma(levels + 1.0);
  double term = std::exp(logp), sum = 0.0;
  for (int k = levels; k < levels + 100000; ++k) {
    sum += term;
    term *= alpha2 / (k + 1.0);
    if (k > alpha2 && term < 1e-18 * std::max(sum, 1e-300)) break;
  }
  return sum;
}

int levels_for(double alpha2, int start, int cap, double tol) {
  for (int k = start; k <= cap; k *= 2) {
    if (coherent_tail_mass(alpha2, k) < tol) return k;
  }
  throw Error(ErrorCode::TruncationTooSmall,
              "tail mass " + std::to_string(coherent_tail_mass(alpha2, cap)) + " at " + std::to_string(cap) + " levels");
}

namespace {
ComplexVector single_mode_coherent(cplx alpha, int levels) {
  ComplexVector c(levels);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int j = 1; j < levels; ++j) c(j) = c(j - 1) * alpha / std::sqrt(static_cast<double>(j));
  return c;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector r(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) r.segment(i * b.size(), b.size()) = a(i) * b;
  return r;
}
}  // namespace

FockState coherent_vector(const FockSpace& space, const std::vector<cplx>& w, double tail_tol) {
  if (static_cast<int>(w.size()) != space.num_modes()) throw Error(ErrorCode::DimensionMismatch, "one label per mode");
  FockState s;
  ComplexVector v = ComplexVector::Ones(1);
  double keep = 1.0;
  for (int k = 0; k < space.num_modes(); ++k) {
    const FockMode& m = space.mode(k);
    const cplx alpha = w[k] / std::sqrt(m.two_theta);
    const double tail = coherent_tail_mass(std::norm(alpha), m.levels);
    if (tail > tail_tol) {
      throw Error(ErrorCode::TruncationTooSmall, "mode " + std::to_string(k) + " tail mass " + std::to_string(tail));
    }
    keep *= 1.0 - tail;
    v = kron(v, single_mode_coherent(alpha, m.levels));
  }
  s.coeffs = v;
  s.tail_mass = 1.0 - keep;
  return s;
}

PosDefSymMatrix frame_lambda(const BlockFrame& frame) {
  RealVector diag(frame.dim());
  for (int a = 0; a < frame.n(); ++a) diag(2 * a) = diag(2 * a + 1) = frame.thetas(a);
  const RealMatrix& R = frame.rotation;
  return PosDefSymMatrix(RealMatrix(R.transpose() * diag.asDiagonal() * R));
}

FockState configuration_coherent_vector(const SectorAlgebra& alg, const RealVector& x, double tail_tol) {
  if (!alg.has_d()) throw Error(ErrorCode::InvalidArgument, "configuration states live on the full space");
  const int n = alg.n();
  const RealVector xf = rotate_to_frame(x, alg.frame());
  std::vector<cplx> w(2 * n);
  double vac = 1.0;
  for (int a = 0; a < n; ++a) {
    w[a] = cplx(xf(2 * a), xf(2 * a + 1));
    w[n + a] = std::conj(w[a]);
    vac /= 2.0 * kPi * alg.frame().thetas(a);
  }
  FockState s = coherent_vector(alg.space(), w, tail_tol);
  s.tag = NormTag::ScaledVacuum;
  s.vacuum_norm2 = vac;
  return s;
}

ComplexMatrix displacement_matrix(cplx zeta, double two_theta, int levels, double tail_tol) {
  const cplx alpha = zeta / std::sqrt(two_theta);
  const double tail = coherent_tail_mass(std::norm(alpha), levels);
  if (tail > tail_tol) throw Error(ErrorCode::TruncationTooSmall, "displacement tail mass " + std::to_string(tail));
  ComplexMatrix D = ComplexMatrix::Zero(levels, levels);
  const double x = std::norm(alpha);
  if (x == 0.0) return ComplexMatrix::Identity(levels, levels);
  const double r = std::sqrt(x);
  const cplx ph = alpha / r, mph = -std::conj(ph);
  // scaled Laguerre recurrence along each diagonal: f_n = √(n!/(n+k)!) rᵏ e^{−x/2} L_n^(k)(x)
  for (int k = 0; k < levels; ++k) {
    const double f0 = std::exp(k * std::log(r) - 0.5 * x - 0.5 * std::lgamma(k + 1.0));
    const cplx lo = std::pow(ph, k), up = std::pow(mph, k);
    double fm = 0.0, f = f0;
    for (int n = 0; n + k < levels; ++n) {
      D(n + k, n) = lo * f;
      if (k > 0) D(n, n + k) = up * f;
      const double a = (2.0 * n + 1.0 + k - x) * std::sqrt((n + 1.0) / (n + k + 1.0));
      const double b = n > 0 ? (n + k) * std::sqrt(n * (n + 1.0) / ((n + k) * (n + k + 1.0))) : 0.0;
      const double fn = (a * f - b * fm) / (n + 1.0);
      fm = f;
      f = fn;
    }
  }
  return D;
}

ComplexMatrix displacement_matrix_expm(cplx zeta, double two_theta, int levels) {
  const ComplexMatrix c = ladder_lowering(levels, two_theta);
  const ComplexMatrix g = (zeta * c.adjoint() - std::conj(zeta) * c) / two_theta;
  return g.exp();
}

FockOperator embed(const FockSpace& space, int k, const ComplexMatrix& op) {
  const int K = space.mode(k).levels;
  if (op.rows() != K || op.cols() != K) throw Error(ErrorCode::DimensionMismatch, "single-mode operator size");
  std::vector<Triplet> t;
  const long s = space.stride(k);
  for (long i = 0; i < space.dim(); ++i) {
    const int c = space.level(i, k);
    for (int r = 0; r < K; ++r) {
      if (op(r, c) != cplx(0.0)) t.emplace_back(i + (r - c) * s, i, op(r, c));
    }
  }
  FockOperator m(space.dim(), space.dim());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

CommutatorTableReport commutator_table(const SectorAlgebra& alg) {
  CommutatorTableReport rep;
  const FockSpace& sp = alg.space();
  const FockOperator I = sp.identity();
  const FockOperator Z(sp.dim(), sp.dim());
  const double h = alg.hbar();
  const int n = alg.n();
  auto add = [&](const std::string& name, const FockOperator& a, const FockOperator& b, const FockOperator& expect) {
    const double r = window_residual(commutator(a, b), expect, sp, 1);
    rep.rows.emplace_back(name, r);
    rep.max_residual = std::max(rep.max_residual, r);
  };
  auto nm = [](const std::string& a, int i, const std::string& b, int j) {
    return "[" + a + "_" + std::to_string(i) + "," + b + "_" + std::to_string(j) + "]";
  };
  std::vector<FockOperator> pp, pm;
  for (int a = 0; a < n; ++a) {
    pp.push_back(alg.p_plus(a));
    pm.push_back(alg.p_minus(a));
  }
  for (int a = 0; a < n; ++a) {
    const double th = alg.frame().thetas(a);
    for (int b = 0; b < n; ++b) {
      const FockOperator two = (a == b ? 2.0 * th : 0.0) * I;
      const FockOperator ih2 = (a == b ? 2.0 * kI * h : cplx(0.0)) * I;
      add(nm("b", a, "b", b), alg.b(a), alg.b(b), Z);
      add(nm("b", a, "bdag", b), alg.b(a), alg.bdag(b), two);
      add(nm("bdag", a, "bdag", b), alg.bdag(a), alg.bdag(b), Z);
      add(nm("d", a, "d", b), alg.d(a), alg.d(b), Z);
      add(nm("d", a, "ddag", b), alg.d(a), alg.ddag(b), two);
      add(nm("ddag", a, "ddag", b), alg.ddag(a), alg.ddag(b), Z);
      add(nm("b", a, "d", b), alg.b(a), alg.d(b), Z);
      add(nm("b", a, "ddag", b), alg.b(a), alg.ddag(b), Z);
      add(nm("bdag", a, "d", b), alg.bdag(a), alg.d(b), Z);
      add(nm("bdag", a, "ddag", b), alg.bdag(a), alg.ddag(b), Z);
      add(nm("b", a, "pminus", b), alg.b(a), pm[b], ih2);
      add(nm("bdag", a, "pminus", b), alg.bdag(a), pm[b], Z);
      add(nm("b", a, "pplus", b), alg.b(a), pp[b], Z);
      add(nm("bdag", a, "pplus", b), alg.bdag(a), pp[b], ih2);
      add(nm("d", a, "pminus", b), alg.d(a), pm[b], Z);
      add(nm("ddag", a, "pminus", b), alg.ddag(a), pm[b], ih2);
      add(nm("d", a, "pplus", b), alg.d(a), pp[b], ih2);
      add(nm("ddag", a, "pplus", b), alg.ddag(a), pp[b], Z);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const std::string si = std::to_string(a) + std::to_string(i), sj = std::to_string(b) + std::to_string(j);
          const double dd = a == b ? 1.0 : 0.0;
          const FockOperator xf_i = alg.x_frame(a, i), xf_j = alg.x_frame(b, j);
          const FockOperator pf_i = alg.p_frame(a, i), pf_j = alg.p_frame(b, j);
          add("[x_" + si + ",x_" + sj + "]", xf_i, xf_j, (kI * th * dd * eps(i, j)) * I);
          add("[x_" + si + ",p_" + sj + "]", xf_i, pf_j, (kI * h * dd * delta(i, j)) * I);
          add("[p_" + si + ",p_" + sj + "]", pf_i, pf_j, Z);
          const cplx plus = delta(i, j) + kI * eps(i, j), minus = delta(i, j) - kI * eps(i, j);
          const FockOperator ui = alg.u(a, i), udi = alg.udag(a, i), vi = alg.v(a, i), vdi = alg.vdag(a, i);
          add("[u_" + si + ",p_" + sj + "]", ui, pf_j, (kI * h * dd * plus) * I);
          add("[udag_" + si + ",p_" + sj + "]", udi, pf_j, (kI * h * dd * minus) * I);
          add("[u_" + si + ",u_" + sj + "]", ui, alg.u(b, j), Z);
          add("[u_" + si + ",udag_" + sj + "]", ui, alg.udag(b, j), (2.0 * th * dd * plus) * I);
          add("[udag_" + si + ",udag_" + sj + "]", udi, alg.udag(b, j), Z);
          add("[v_" + si + ",v_" + sj + "]", vi, alg.v(b, j), Z);
          add("[v_" + si + ",vdag_" + sj + "]", vi, alg.vdag(b, j), (2.0 * th * dd * minus) * I);
          add("[vdag_" + si + ",vdag_" + sj + "]", vdi, alg.vdag(b, j), Z);
          add("[u_" + si + ",v_" + sj + "]", ui, alg.v(b, j), Z);
          add("[u_" + si + ",vdag_" + sj + "]", ui, alg.vdag(b, j), Z);
          add("[udag_" + si + ",v_" + sj + "]", udi, alg.v(b, j), Z);
          add("[udag_" + si + ",vdag_" + sj + "]", udi, alg.vdag(b, j), Z);
          // projected momenta (δ ∓ iε)p
          FockOperator pmin = alg.p_frame(b, 0) * cplx(0.0), ppl = pmin;
          for (int c = 0; c < 2; ++c) {
            pmin += (delta(j, c) - kI * eps(j, c)) * alg.p_frame(b, c);
            ppl += (delta(j, c) + kI * eps(j, c)) * alg.p_frame(b, c);
          }
          add("[u_" + si + ",(1-ie)p_" + sj + "]", ui, pmin, (2.0 * kI * h * dd * plus) * I);
          add("[u_" + si + ",(1+ie)p_" + sj + "]", ui, ppl, Z);
          add("[udag_" + si + ",(1-ie)p_" + sj + "]", udi, pmin, Z);
          add("[udag_" + si + ",(1+ie)p_" + sj + "]", udi, ppl, (2.0 * kI * h * dd * minus) * I);
        }
      }
    }
  }
  const RealMatrix A = alg.frame().field();
  const int N = alg.frame().dim();
  std::vector<FockOperator> xs, ps;
  for (int i = 0; i < N; ++i) {
    xs.push_back(alg.x(i));
    ps.push_back(alg.p(i));
  }
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const std::string si = std::to_string(i), sj = std::to_string(j);
      add("[x" + si + ",x" + sj + "]", xs[i], xs[j], (kI * A(i, j)) * I);
      add("[x" + si + ",p" + sj + "]", xs[i], ps[j], (kI * h * delta(i, j)) * I);
      add("[p" + si + ",p" + sj + "]", ps[i], ps[j], Z);
    }
  }
  // constraint relations, exact on the whole truncated space
  for (int a = 0; a < n; ++a) {
    auto full = [&](const std::string& name, const FockOperator& lhs, const FockOperator& rhs) {
      const FockOperator d = lhs - rhs;
      double r = 0.0;
      for (int c = 0; c < d.outerSize(); ++c)
        for (FockOperator::InnerIterator it(d, c); it; ++it) r = std::max(r, std::abs(it.value()));
      rep.rows.emplace_back(name, r);
      rep.max_residual = std::max(rep.max_residual, r);
    };
    const std::string s = std::to_string(a);
    full("u_" + s + "1=-iu_" + s + "0", alg.u(a, 1), -kI * alg.u(a, 0));
    full("udag_" + s + "1=iudag_" + s + "0", alg.udag(a, 1), kI * alg.udag(a, 0));
    full("v_" + s + "1=iv_" + s + "0", alg.v(a, 1), kI * alg.v(a, 0));
    full("vdag_" + s + "1=-ivdag_" + s + "0", alg.vdag(a, 1), -kI * alg.vdag(a, 0));
    full("u_" + s + "0=b_" + s, alg.u(a, 0), alg.b(a));
    full("v_" + s + "0=d_" + s, alg.v(a, 0), alg.d(a));
  }
  return rep;
}

}  // namespace nctk
