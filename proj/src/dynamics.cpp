#include "nctk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "nctk/random.hpp"

namespace nctk {

namespace {

using Triplet = Eigen::Triplet<cplx>;

double frame_factor(const BlockFrame& f) {
  double c = 1.0;
  for (int a = 0; a < f.n(); ++a) c *= 2.0 * kPi * f.thetas(a);
  return c;
}

cplx trace_inner(const ComplexMatrix& a, const ComplexMatrix& b, double factor) {
  return factor * (a.conjugate().cwiseProduct(b)).sum();
}

FockOperator sparse_identity(long d) {
  FockOperator I(d, d);
  I.setIdentity();
  return I;
}

ComplexMatrix comm(const FockOperator& a, const ComplexMatrix& phi) {
  return ComplexMatrix(a * phi) - ComplexMatrix(phi * a);
}

}  // namespace

// ---------------------------------------------------------------- potential

PolynomialPotential::PolynomialPotential(Polynomial v, double mu) : v_(std::move(v)), mu_(mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::InvalidArgument, "mass must be positive");
  if (v_.degree() > kMaxDegree) {
    throw Error(ErrorCode::DegreeTooHigh, "potential degree " + std::to_string(v_.degree()) + " exceeds 4");
  }
  for (const auto& [idx, c] : v_.terms()) {
    if (c.imag() != 0.0) throw Error(ErrorCode::InvalidArgument, "potential coefficients must be real");
  }
}

PolynomialPotential PolynomialPotential::free(int dim, double mu) { return PolynomialPotential(Polynomial(dim), mu); }

PolynomialPotential PolynomialPotential::harmonic(int dim, double mu, double omega) {
  Polynomial v(dim);
  for (int i = 0; i < dim; ++i) {
    MultiIndex idx(dim, 0);
    idx[i] = 2;
    v.add_term(idx, 0.5 * mu * omega * omega);
  }
  return PolynomialPotential(v, mu);
}

double PolynomialPotential::harmonic_frequency() const {
  if (v_.is_zero()) return 0.0;
  const int n = dim();
  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    MultiIndex idx(n, 0);
    idx[i] = 2;
    const cplx ci = v_.coeff(idx);
    if (i == 0) c = ci.real();
    if (ci.real() != c || c <= 0.0) return 0.0;
  }
  if (static_cast<int>(v_.terms().size()) != n) return 0.0;
  return std::sqrt(2.0 * c / mu_);
}

// ---------------------------------------------------------------- hermitize

FockOperator weyl_monomial(const MultiIndex& idx, const std::vector<FockOperator>& x) {
  if (idx.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "monomial and operator count");
  if (x.empty()) throw Error(ErrorCode::InvalidArgument, "no position operators");
  const long d = x[0].rows();
  std::vector<int> word;
  for (std::size_t k = 0; k < idx.size(); ++k) word.insert(word.end(), idx[k], static_cast<int>(k));
  if (word.empty()) return sparse_identity(d);
  // distinct orderings of the multiset; the average equals the full symmetrization
  FockOperator sum(d, d);
  long count = 0;
  std::sort(word.begin(), word.end());
  do {
    FockOperator prod = x[word[0]];
    for (std::size_t k = 1; k < word.size(); ++k) prod = (prod * x[word[k]]).pruned();
    sum += prod;
    ++count;
  } while (std::next_permutation(word.begin(), word.end()));
  return sum / cplx(static_cast<double>(count));
}

FockOperator hermitize(const PolynomialPotential& V, const std::vector<FockOperator>& x) {
  if (V.polynomial().degree() > PolynomialPotential::kMaxDegree) throw Error(ErrorCode::DegreeTooHigh, "degree");
  if (static_cast<int>(x.size()) != V.dim()) throw Error(ErrorCode::DimensionMismatch, "potential dimension");
  const long d = x.at(0).rows();
  FockOperator v(d, d);
  for (const auto& [idx, c] : V.polynomial().terms()) v += c * weyl_monomial(idx, x);
  const FockOperator vd = v.adjoint();
  return FockOperator(0.5 * (v + vd));
}

FockOperator hermitize(const PolynomialPotential& V, const EnvelopingAlgebra& alg) {
  std::vector<FockOperator> x;
  for (int i = 0; i < alg.N(); ++i) x.push_back(alg.x(i));
  return hermitize(V, x);
}

// ---------------------------------------------------------------- hamiltonian

Hamiltonian::Hamiltonian(const EnvelopingAlgebra& alg, FockOperator vq, double mu)
    : ainv_(alg.field_inverse()), vq_(std::move(vq)), hbar_(alg.hbar()) {
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "mass must be positive");
  const int N = alg.N();
  if (vq_.rows() != alg.dim() || vq_.cols() != alg.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "potential operator size");
  }
  coeff_ = hbar_ * hbar_ / (2.0 * mu);
  for (int i = 0; i < N; ++i) x_.push_back(alg.x(i));
  for (int i = 0; i < N; ++i) {
    FockOperator y(alg.dim(), alg.dim());
    for (int j = 0; j < N; ++j) {
      if (ainv_(i, j) != 0.0) y += cplx(ainv_(i, j)) * x_[j];
    }
    y_.push_back(y);
  }
}

Hamiltonian Hamiltonian::zero(const EnvelopingAlgebra& alg) {
  Hamiltonian h(alg, FockOperator(alg.dim(), alg.dim()), 1.0);
  h.coeff_ = 0.0;
  return h;
}

ComplexMatrix Hamiltonian::kinetic(const ComplexMatrix& phi) const {
  ComplexMatrix out = ComplexMatrix::Zero(phi.rows(), phi.cols());
  if (coeff_ == 0.0) return out;
  for (const FockOperator& y : y_) out += comm(y, comm(y, phi));
  return coeff_ * out;
}

ComplexMatrix Hamiltonian::kinetic_double_sum(const ComplexMatrix& phi) const {
  const int N = static_cast<int>(x_.size());
  ComplexMatrix out = ComplexMatrix::Zero(phi.rows(), phi.cols());
  if (coeff_ == 0.0) return out;
  for (int k = 0; k < N; ++k) {
    const ComplexMatrix inner = comm(x_[k], phi);
    for (int j = 0; j < N; ++j) {
      double w = 0.0;
      for (int i = 0; i < N; ++i) w += ainv_(i, j) * ainv_(i, k);
      if (w != 0.0) out += w * comm(x_[j], inner);
    }
  }
  return coeff_ * out;
}

ComplexMatrix Hamiltonian::apply(const ComplexMatrix& phi) const {
  return kinetic(phi) + ComplexMatrix(vq_ * phi);
}

FockOperator Hamiltonian::matrix() const {
  const long d = vq_.rows();
  const FockOperator I = sparse_identity(d);
  // vec(Lφ) = (I⊗L)vec φ, vec(φR) = (Rᵀ⊗I)vec φ
  FockOperator S = Eigen::kroneckerProduct(I, vq_).eval();
  if (coeff_ != 0.0) {
    for (const FockOperator& y : y_) {
      const FockOperator y2 = (y * y).pruned();
      const FockOperator y2t = y2.transpose();
      const FockOperator yt = y.transpose();
      FockOperator k = Eigen::kroneckerProduct(I, y2).eval();
      k += Eigen::kroneckerProduct(y2t, I).eval();
      k -= cplx(2.0) * Eigen::kroneckerProduct(yt, y).eval();
      S += coeff_ * k;
    }
  }
  S.prune(cplx(0.0));
  return S;
}

Superoperator Hamiltonian::superop() const {
  auto self = std::make_shared<Hamiltonian>(*this);
  return {"H", [self](const ComplexMatrix& phi) { return self->apply(phi); }};
}

Superoperator hamiltonian_superop(const FockOperator& vq, const EnvelopingAlgebra& alg, double mu) {
  return Hamiltonian(alg, vq, mu).superop();
}

// ---------------------------------------------------------------- evolution

std::string to_string(Integrator i) {
  switch (i) {
    case Integrator::Auto: return "auto";
    case Integrator::Expm: return "expm";
    case Integrator::Rk4: return "rk4";
    case Integrator::Blocks: return "blocks";
    case Integrator::Cayley: return "cayley";
  }
  return "auto";
}

Integrator integrator_from_string(const std::string& s) {
  if (s == "auto") return Integrator::Auto;
  if (s == "expm") return Integrator::Expm;
  if (s == "rk4") return Integrator::Rk4;
  if (s == "blocks") return Integrator::Blocks;
  if (s == "cayley") return Integrator::Cayley;
  throw Error(ErrorCode::InvalidArgument, "unknown integrator '" + s + "'");
}

double hermiticity_residual(const Hamiltonian& H, const EnvelopingAlgebra& alg, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const double fac = frame_factor(alg.frame());
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix a = rng.complex_normal_matrix(alg.dim(), alg.dim());
    const ComplexMatrix b = rng.complex_normal_matrix(alg.dim(), alg.dim());
    const ComplexMatrix ha = H.apply(a), hb = H.apply(b);
    const double scale = a.norm() * hb.norm() + ha.norm() * b.norm();
    if (scale == 0.0) continue;
    const cplx diff = trace_inner(a, hb, fac) - trace_inner(ha, b, fac);
    worst = std::max(worst, std::abs(diff) / (fac * scale));
  }
  return worst;
}

namespace {

/// Invariant subspaces: connected components of the sparsity graph, with the restricted matrices.
struct BlockSet {
  std::vector<std::vector<long>> idx;
  std::vector<FockOperator> mats;
};

BlockSet split_blocks(const FockOperator& S) {
  const long n = S.rows();
  std::vector<long> parent(n);
  std::iota(parent.begin(), parent.end(), 0L);
  auto find = [&](long i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (long k = 0; k < S.outerSize(); ++k) {
    for (FockOperator::InnerIterator it(S, k); it; ++it) {
      const long a = find(it.row()), b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  BlockSet out;
  std::vector<long> block_of(n), local(n), root_id(n, -1);
  for (long i = 0; i < n; ++i) {
    const long r = find(i);
    if (root_id[r] < 0) {
      root_id[r] = static_cast<long>(out.idx.size());
      out.idx.emplace_back();
    }
    block_of[i] = root_id[r];
    local[i] = static_cast<long>(out.idx[root_id[r]].size());
    out.idx[root_id[r]].push_back(i);
  }
  std::vector<std::vector<Triplet>> trip(out.idx.size());
  for (long k = 0; k < S.outerSize(); ++k) {
    for (FockOperator::InnerIterator it(S, k); it; ++it) {
      trip[block_of[it.row()]].emplace_back(local[it.row()], local[it.col()], it.value());
    }
  }
  for (std::size_t b = 0; b < out.idx.size(); ++b) {
    const long m = static_cast<long>(out.idx[b].size());
    FockOperator mat(m, m);
    mat.setFromTriplets(trip[b].begin(), trip[b].end());
    out.mats.push_back(std::move(mat));
  }
  return out;
}

struct Observer {
  const Hamiltonian& H;
  const EnvelopingAlgebra& alg;
  double fac;
  std::vector<FockOperator> xf;

  TrajectoryPoint measure(double t, const ComplexMatrix& phi) const {
    TrajectoryPoint p;
    p.t = t;
    const double nrm = trace_inner(phi, phi, fac).real();
    p.norm = nrm;
    p.energy = nrm > 0.0 ? trace_inner(phi, H.apply(phi), fac).real() / nrm : 0.0;
    for (const FockOperator& x : xf) {
      p.x.push_back(nrm > 0.0 ? trace_inner(phi, ComplexMatrix(x * phi), fac) / nrm : cplx(0.0));
    }
    return p;
  }
};

}  // namespace

Trajectory evolve(const EnvelopingState& s0, const Hamiltonian& H, const EnvelopingAlgebra& alg,
                  const EvolutionConfig& cfg) {
  if (cfg.steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be ≥ 1");
  if (!std::isfinite(cfg.t_final)) throw Error(ErrorCode::InvalidArgument, "t_final must be finite");
  const long d = alg.dim();
  if (s0.op.rows() != d || s0.op.cols() != d || s0.levels != alg.levels()) {
    throw Error(ErrorCode::FrameMismatch, "initial state does not match the algebra");
  }
  const double herm = hermiticity_residual(H, alg, 2, cfg.seed);
  if (herm > cfg.hermiticity_tolerance) {
    throw Error(ErrorCode::NonHermitianHamiltonian, "adjointness residual " + detail::sci(herm));
  }

  Observer obs{H, alg, frame_factor(alg.frame()), {}};
  for (int a = 0; a < alg.frame().n(); ++a)
    for (int b = 0; b < 2; ++b) obs.xf.push_back(alg.x_frame(a, b));

  const double dt = cfg.t_final / cfg.steps;
  const double h = H.hbar();
  const cplx gen = -kI * dt / h;

  Integrator use = cfg.integrator;
  FockOperator S;
  BlockSet blocks;
  if (use != Integrator::Rk4) S = H.matrix();
  if (use == Integrator::Blocks || use == Integrator::Cayley || (use == Integrator::Auto && d > 32)) {
    blocks = split_blocks(S);
  }
  if (use == Integrator::Auto) {
    if (d <= 32) {
      use = Integrator::Expm;
    } else {
      long largest = 0;
      for (const auto& b : blocks.idx) largest = std::max(largest, static_cast<long>(b.size()));
      use = largest <= cfg.max_block ? Integrator::Blocks : Integrator::Cayley;
    }
  }

  Trajectory traj;
  traj.used = use;
  ComplexVector v = Eigen::Map<const ComplexVector>(s0.op.data(), d * d);
  auto as_matrix = [d](const ComplexVector& vec) { return ComplexMatrix(Eigen::Map<const ComplexMatrix>(vec.data(), d, d)); };

  const TrajectoryPoint first = obs.measure(0.0, s0.op);
  traj.points.push_back(first);
  if (cfg.keep_states) traj.states.push_back(s0);

  // blocks never populated by s₀ stay empty, so only populated ones are prepared
  struct Prepared {
    const std::vector<long>* idx = nullptr;
    ComplexVector c;  // spectral coefficients (Blocks) or current local state (Cayley)
    RealVector energies;
    ComplexMatrix vectors;
    FockOperator minus;
    std::shared_ptr<Eigen::SparseLU<FockOperator>> plus;
  };
  std::vector<Prepared> prep;
  ComplexMatrix U;
  if (use == Integrator::Expm) {
    U = (gen * ComplexMatrix(S)).exp();
  } else if (use == Integrator::Blocks || use == Integrator::Cayley) {
    for (std::size_t k = 0; k < blocks.idx.size(); ++k) {
      const std::vector<long>& b = blocks.idx[k];
      const long m = static_cast<long>(b.size());
      ComplexVector c0(m);
      for (long i = 0; i < m; ++i) c0(i) = v(b[i]);
      if (c0.cwiseAbs().maxCoeff() == 0.0) continue;
      Prepared pr;
      pr.idx = &b;
      const FockOperator& hb = blocks.mats[k];
      if (use == Integrator::Blocks) {
        const ComplexMatrix dense(hb);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (dense + dense.adjoint()));
        pr.energies = es.eigenvalues();
        pr.vectors = es.eigenvectors();
        pr.c = pr.vectors.adjoint() * c0;
      } else {
        // (1 + iΔtĤ/2ħ) v' = (1 − iΔtĤ/2ħ) v
        const FockOperator I = sparse_identity(m);
        const cplx half = 0.5 * kI * dt / h;
        pr.minus = I - half * hb;
        FockOperator plus = I + half * hb;
        plus.makeCompressed();
        pr.plus = std::make_shared<Eigen::SparseLU<FockOperator>>();
        pr.plus->compute(plus);
        if (pr.plus->info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "Cayley factorization failed");
        pr.c = c0;
      }
      prep.push_back(std::move(pr));
    }
  }

  auto rhs = [&](const ComplexVector& vec) {
    const ComplexMatrix hp = H.apply(as_matrix(vec));
    return ComplexVector((-kI / h) * Eigen::Map<const ComplexVector>(hp.data(), d * d));
  };

  for (int k = 1; k <= cfg.steps; ++k) {
    const double t = k * dt;
    switch (use) {
      case Integrator::Expm:
        v = U * v;
        break;
      case Integrator::Blocks:
        v.setZero();
        for (const Prepared& pr : prep) {
          const ComplexVector ph = (pr.energies.cast<cplx>() * (-kI * t / h)).array().exp().matrix();
          const ComplexVector local = pr.vectors * ph.cwiseProduct(pr.c);
          for (std::size_t i = 0; i < pr.idx->size(); ++i) v((*pr.idx)[i]) = local(static_cast<long>(i));
        }
        break;
      case Integrator::Cayley:
        v.setZero();
        for (Prepared& pr : prep) {
          pr.c = pr.plus->solve(ComplexVector(pr.minus * pr.c));
          for (std::size_t i = 0; i < pr.idx->size(); ++i) v((*pr.idx)[i]) = pr.c(static_cast<long>(i));
        }
        break;
      default: {
        const ComplexVector k1 = rhs(v);
        const ComplexVector k2 = rhs(v + 0.5 * dt * k1);
        const ComplexVector k3 = rhs(v + 0.5 * dt * k2);
        const ComplexVector k4 = rhs(v + dt * k3);
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        break;
      }
    }
    const ComplexMatrix phi = as_matrix(v);
    const TrajectoryPoint p = obs.measure(t, phi);
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(p.norm - first.norm));
    traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(p.energy - first.energy));
    traj.points.push_back(p);
    if (cfg.keep_states) traj.states.push_back(alg.wrap(phi));
    if (std::abs(p.norm - first.norm) > cfg.norm_tolerance) {
      throw Error(ErrorCode::NormDriftExceeded,
                  "norm drift " + detail::sci(std::abs(p.norm - first.norm)) + " at t=" + detail::sci(t));
    }
  }
  traj.final_state = alg.wrap(as_matrix(v));
  return traj;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os.precision(17);
  os << "t,norm,energy";
  const std::size_t nx = traj.points.empty() ? 0 : traj.points.front().x.size();
  for (std::size_t k = 0; k < nx; ++k) {
    const std::string tag = "x_" + std::to_string(k / 2) + "_" + std::to_string(k % 2 + 1);
    os << "," << tag << "_re," << tag << "_im";
  }
  os << "\n";
  for (const TrajectoryPoint& p : traj.points) {
    os << p.t << "," << p.norm << "," << p.energy;
    for (const cplx& x : p.x) os << "," << x.real() << "," << x.imag();
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- commutative oracle

OscillatorOracle commutative_oscillator(const RealVector& x0, const RealVector& p0, double mu, double omega,
                                        double hbar, int levels, const std::vector<double>& times) {
  if (x0.size() != 2 || p0.size() != 2) throw Error(ErrorCode::DimensionMismatch, "planar oscillator");
  const int K = levels;
  // a|k⟩ = √k|k−1⟩ per axis; x = √(ħ/2μω)(a + a†)
  RealMatrix a = RealMatrix::Zero(K, K);
  for (int k = 1; k < K; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const RealMatrix xq = std::sqrt(hbar / (2.0 * mu * omega)) * (a + a.transpose());
  std::vector<ComplexVector> c(2);
  for (int ax = 0; ax < 2; ++ax) {
    const cplx al = std::sqrt(mu * omega / (2.0 * hbar)) * x0(ax) + kI * p0(ax) / std::sqrt(2.0 * mu * omega * hbar);
    c[ax] = ComplexVector(K);
    c[ax](0) = std::exp(-0.5 * std::norm(al));
    for (int k = 1; k < K; ++k) c[ax](k) = c[ax](k - 1) * al / std::sqrt(static_cast<double>(k));
  }
  // ψ(i, j): i the x₁ level, j the x₂ level
  const ComplexMatrix psi = c[0] * c[1].transpose();
  const ComplexMatrix xc = xq.cast<cplx>();

  OscillatorOracle out;
  for (double t : times) {
    // H = ħω(n₁ + n₂ + 1) is diagonal in this basis
    ComplexMatrix pt(K, K);
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) pt(i, j) = std::exp(-kI * omega * (i + j + 1.0) * t) * psi(i, j);
    const double nrm = pt.squaredNorm();
    RealVector x(2);
    x(0) = (pt.conjugate().cwiseProduct(xc * pt)).sum().real() / nrm;
    x(1) = (pt.conjugate().cwiseProduct(pt * xc.transpose())).sum().real() / nrm;
    out.t.push_back(t);
    out.x.push_back(x);
  }
  return out;
}

OscillatorComparison compare_with_commutative_oscillator(double theta, int levels, const RealVector& x0,
                                                         double t_final, int steps, double mu, double omega,
                                                         double hbar) {
  const EnvelopingAlgebra alg(BlockFrame::canonical(RealVector{{theta}}), levels, hbar);
  const Hamiltonian H(alg, hermitize(PolynomialPotential::harmonic(2, mu, omega), alg), mu);
  const auto label = CoherentLabel::real(x0, PosDefSymMatrix::identity(2, 2.0 * hbar / (mu * omega)), hbar);
  const EnvelopingState s0 = state_to_operator(momentum_wavefunction(label), alg);
  EvolutionConfig cfg;
  cfg.t_final = t_final;
  cfg.steps = steps;
  OscillatorComparison out;
  out.theta = theta;
  out.levels = levels;
  out.nc = evolve(s0, H, alg, cfg);
  std::vector<double> times;
  for (const auto& p : out.nc.points) times.push_back(p.t);
  out.oracle = commutative_oscillator(x0, RealVector::Zero(2), mu, omega, hbar, 48, times);
  double worst = 0.0, scale = 0.0;
  const RealMatrix& R = alg.frame().rotation;
  for (std::size_t k = 0; k < times.size(); ++k) {
    RealVector xf(2);
    xf << out.nc.points[k].x[0].real(), out.nc.points[k].x[1].real();
    const RealVector x = R.transpose() * xf;
    worst = std::max(worst, (x - out.oracle.x[k]).cwiseAbs().maxCoeff());
    scale = std::max(scale, out.oracle.x[k].cwiseAbs().maxCoeff());
  }
  out.max_relative_error = scale > 0.0 ? worst / scale : worst;
  return out;
}

// ---------------------------------------------------------------- commutative Gaussian dynamics

namespace {

void require_gaussian(const PolyGaussian& f) {
  if (!f.poly().is_constant()) throw Error(ErrorCode::InvalidArgument, "pure Gaussian momentum function required");
}

cplx constant_term(const PolyGaussian& f) { return f.scalar() * f.poly().coeff(MultiIndex(f.dim(), 0)); }

/// ∏ eᵢ^{−1/2} with principal roots; valid when every eigenvalue has positive real part.
cplx inv_sqrt_det(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  cplx r = 1.0;
  for (long i = 0; i < m.rows(); ++i) r /= std::sqrt(es.eigenvalues()(i));
  return r;
}

}  // namespace

PolyGaussian evolve_momentum_gaussian(const PolyGaussian& phi, const PolynomialPotential& V, double t, double hbar) {
  require_gaussian(phi);
  const int N = phi.dim();
  if (V.dim() != N) throw Error(ErrorCode::DimensionMismatch, "potential dimension");
  const double mu = V.mass();
  const cplx s = constant_term(phi);
  const ComplexMatrix I = ComplexMatrix::Identity(N, N);
  if (V.is_free()) {
    // φ̃(p,t) = φ̃(p) e^{−ip²t/2μħ}
    return PolyGaussian(phi.quad() + (kI * t / (mu * hbar)) * I, phi.lin(), s, Polynomial::constant(N, 1.0));
  }
  const double w = V.harmonic_frequency();
  if (w <= 0.0) throw Error(ErrorCode::UnsupportedPotential, "only free or isotropic harmonic potentials");

  // In momentum space the oscillator has mass m' = 1/(μω²) and coordinate p.
  // Gaussian packet e^{(i/ħ)[½(p−P)Z(p−P) + Π·(p−P)]} with classical (P, Π).
  const double m = 1.0 / (mu * w * w);
  const ComplexMatrix& M = phi.quad();
  const RealMatrix Mr = M.real(), Mi = M.imag();
  const RealVector P0 = Mr.llt().solve(RealVector(phi.lin().real()));
  const RealVector Pi0 = hbar * (RealVector(phi.lin().imag()) - Mi * P0);
  const ComplexMatrix Z0 = kI * hbar * M;
  const ComplexVector P0c = P0.cast<cplx>();
  const cplx sH = s * std::exp(cplx(0.5) * P0c.dot(M * P0c) + kI * Pi0.dot(P0) / hbar);

  auto flow = [&](double tau, double& a, double& b, double& c, double& d) {
    a = std::cos(w * tau);
    b = std::sin(w * tau) / (m * w);
    c = -m * w * std::sin(w * tau);
    d = std::cos(w * tau);
  };
  double a, b, c, d;
  flow(t, a, b, c, d);
  const ComplexMatrix den = a * I + b * Z0;
  const ComplexMatrix Zt = (c * I + d * Z0) * den.inverse();
  const RealVector Pt = a * P0 + b * Pi0;
  const RealVector Pit = c * P0 + d * Pi0;

  // det(a + bZ₀)^{−1/2} continued along the path from τ = 0
  const int J = 64 + static_cast<int>(std::ceil(8.0 * std::abs(w * t)));
  double arg = 0.0, prev = 0.0;
  cplx det = 1.0;
  for (int j = 1; j <= J; ++j) {
    double aj, bj, cj, dj;
    flow(t * j / J, aj, bj, cj, dj);
    det = (aj * I + bj * Z0).determinant();
    double cur = std::arg(det);
    double step = cur - prev;
    while (step > kPi) step -= 2.0 * kPi;
    while (step < -kPi) step += 2.0 * kPi;
    arg += step;
    prev = cur;
  }
  const cplx amp = std::pow(std::abs(det), -0.5) * std::exp(-0.5 * kI * arg);
  const cplx action = std::exp(kI * 0.5 * (Pit.dot(Pt) - Pi0.dot(P0)) / hbar);

  const ComplexMatrix Mt = -kI * Zt / hbar;
  const ComplexMatrix Ms = 0.5 * (Mt + Mt.transpose());
  const ComplexVector Ptc = Pt.cast<cplx>();
  const ComplexVector lt = Ms * Ptc + kI * Pit.cast<cplx>() / hbar;
  const cplx st = sH * amp * action * std::exp(cplx(-0.5) * Ptc.dot(Ms * Ptc) - kI * Pit.dot(Pt) / hbar);
  return PolyGaussian(Ms, lt, st, Polynomial::constant(N, 1.0));
}

PolyGaussian configuration_wavefunction(const PolyGaussian& phi, const PosDefSymMatrix& lambda, double hbar) {
  require_gaussian(phi);
  const int N = phi.dim();
  if (lambda.dim() != N) throw Error(ErrorCode::DimensionMismatch, "lambda dimension");
  const ComplexMatrix Mp = phi.quad() + (lambda.matrix() / (2.0 * hbar * hbar)).cast<cplx>();
  if (Eigen::LLT<RealMatrix>(Mp.real()).info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "momentum integral diverges");
  }
  const ComplexMatrix Mi = Mp.inverse();
  const ComplexMatrix Mis = 0.5 * (Mi + Mi.transpose());
  const ComplexVector& l = phi.lin();
  const cplx scalar = constant_term(phi) * std::pow(hbar, -0.5 * N) * inv_sqrt_det(Mp) *
                      std::exp(cplx(0.5) * (l.transpose() * Mis * l)(0, 0));
  return PolyGaussian(Mis / (hbar * hbar), (kI / hbar) * (Mis * l), scalar, Polynomial::constant(N, 1.0));
}

namespace {

double integrate_density(const PolyGaussian& rho) {
  const RealMatrix P = rho.quad().real();
  Eigen::LLT<RealMatrix> llt(P);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "density not integrable");
  const RealVector center = llt.solve(RealVector(rho.lin().real()));
  // the density is a Gaussian times a constant: the rule is exact once the weight matches
  const auto res = integrate_gaussian(center, P, 1, [&](const RealVector& y, cplx* out) { out[0] = rho(y); });
  return res.value(0).real();
}

struct DensityCurrent {
  PolyGaussian rho;
  std::vector<PolyGaussian> J;
};

DensityCurrent density_and_current(const PolyGaussian& psi, const PosDefSymMatrix& lambda, double mu, double hbar) {
  const PolyGaussian pc = psi.conj();
  DensityCurrent out{star_product(pc, psi, lambda), {}};
  const cplx pref = hbar / (2.0 * kI * mu);
  for (int k = 0; k < psi.dim(); ++k) {
    const PolyGaussian dpsi = psi.derivative(k);
    const PolyGaussian a = star_product(pc, dpsi, lambda);
    const PolyGaussian b = star_product(dpsi.conj(), psi, lambda);
    out.J.push_back(a.plus(b.scaled(-1.0)).scaled(pref));
  }
  return out;
}

}  // namespace

ContinuityReport continuity_check_commutative(const PolyGaussian& psi0_tilde, const PolynomialPotential& V,
                                              const PosDefSymMatrix& lambda, const ContinuityGrid& grid,
                                              double t_final, double hbar) {
  require_gaussian(psi0_tilde);
  const int N = psi0_tilde.dim();
  if (grid.center.size() != N) throw Error(ErrorCode::DimensionMismatch, "grid centre dimension");
  if (grid.points < 1 || grid.time_samples < 1 || !(grid.h > 0.0) || !(grid.dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "grid parameters");
  }
  const double nrm = momentum_inner_product(psi0_tilde, psi0_tilde).real();
  const PolyGaussian phi0 = psi0_tilde.scaled(1.0 / std::sqrt(nrm));
  const double mu = V.mass();

  auto psi_at = [&](double t) {
    return configuration_wavefunction(evolve_momentum_gaussian(phi0, V, t, hbar), lambda, hbar);
  };

  // grid nodes
  std::vector<RealVector> nodes;
  const long total = static_cast<long>(std::pow(grid.points, N));
  for (long idx = 0; idx < total; ++idx) {
    RealVector x = grid.center;
    long r = idx;
    for (int k = 0; k < N; ++k) {
      const int i = static_cast<int>(r % grid.points);
      r /= grid.points;
      const double u = grid.points == 1 ? 0.0 : -1.0 + 2.0 * i / (grid.points - 1);
      x(k) += grid.half_width * u;
    }
    nodes.push_back(x);
  }

  ContinuityReport rep;
  auto residual_at = [&](double h, double dt, bool record) {
    double worst = 0.0;
    for (int s = 0; s < grid.time_samples; ++s) {
      const double t = grid.time_samples == 1 ? t_final : t_final * s / (grid.time_samples - 1);
      const DensityCurrent now = density_and_current(psi_at(t), lambda, mu, hbar);
      const PolyGaussian rp = density_and_current(psi_at(t + dt), lambda, mu, hbar).rho;
      const PolyGaussian rm = density_and_current(psi_at(t - dt), lambda, mu, hbar).rho;
      if (record) rep.norm_error = std::max(rep.norm_error, std::abs(integrate_density(now.rho) - 1.0));
      for (const RealVector& x : nodes) {
        const cplx drho = (rp(x) - rm(x)) / (2.0 * dt);
        cplx div = 0.0;
        for (int k = 0; k < N; ++k) {
          RealVector xp = x, xm = x;
          xp(k) += h;
          xm(k) -= h;
          div += (now.J[k](xp) - now.J[k](xm)) / (2.0 * h);
        }
        worst = std::max(worst, std::abs(drho + div));
        if (record) {
          rep.max_density_rate = std::max(rep.max_density_rate, std::abs(drho));
          rep.max_divergence = std::max(rep.max_divergence, std::abs(div));
          ++rep.samples;
        }
      }
    }
    return worst;
  };
  rep.max_residual = residual_at(grid.h, grid.dt, true);
  rep.residual_half_step = residual_at(0.5 * grid.h, 0.5 * grid.dt, false);
  const double floor = 1e-10;
  const double ratio = std::max(rep.max_residual, floor) / std::max(rep.residual_half_step, floor);
  // central differences: a resolved grid shows ratio ≈ 4 unless both sit at the noise floor
  const bool at_floor = std::max(rep.max_residual, rep.residual_half_step) <= floor;
  if (!at_floor && (ratio > 8.0 || ratio < 2.0)) {
    throw Error(ErrorCode::GridTooCoarse, "halving the step changes the residual from " +
                                              detail::sci(rep.max_residual) + " to " +
                                              detail::sci(rep.residual_half_step));
  }
  return rep;
}

}  // namespace nctk
