#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nctk/types.hpp"

namespace nctk {

/// Gauss–Hermite rule for the weight e^{−t²} on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (Golub–Welsch seed, Newton-polished).
const GaussHermiteRule& gauss_hermite(int order);

/// Escalation ladder 20 → 40 → 80, capped by NC_QUADRATURE_MAX when set.
std::vector<int> quadrature_orders(int start_order = 20);
int quadrature_max_order();

struct QuadratureOptions {
  double tol = 1e-10;
  int start_order = 20;
  /// Fixed order, skipping escalation, when > 0.
  int fixed_order = 0;
};

struct QuadratureResult {
  ComplexVector value;
  int order = 0;
  double change = 0.0;  // difference between the last two orders
};

namespace detail {
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}
// Tensor-product rule over d dimensions for a fixed order; f(y, out) writes
// nout integrand values at y (the full integrand, not divided by the weight).
template <class F>
ComplexVector tensor_rule(const RealVector& center, const RealMatrix& whiten, double jac, int nout,
                          int order, F&& f) {
  const int d = static_cast<int>(center.size());
  const GaussHermiteRule& rule = gauss_hermite(order);
  std::vector<double> wexp(order);
  for (int i = 0; i < order; ++i) {
    const double t = rule.nodes[i];
    wexp[i] = rule.weights[i] * std::exp(t * t);
  }
  // contrib[k][i] = whiten.col(k) · t_i; partial[k] = center + Σ_{j ≥ k} contrib[j][idx_j]
  std::vector<RealMatrix> contrib(d);
  for (int k = 0; k < d; ++k) {
    contrib[k].resize(d, order);
    for (int i = 0; i < order; ++i) contrib[k].col(i) = whiten.col(k) * rule.nodes[i];
  }
  ComplexVector acc = ComplexVector::Zero(nout);
  ComplexVector buf(nout);
  std::vector<int> idx(d, 0);
  std::vector<RealVector> partial(d + 1, center);
  std::vector<double> wpart(d + 1, jac);
  auto refresh = [&](int from) {
    for (int k = from; k >= 1; --k) {
      partial[k] = partial[k + 1] + contrib[k].col(idx[k]);
      wpart[k] = wpart[k + 1] * wexp[idx[k]];
    }
  };
  if (d == 0) {
    RealVector y = center;
    f(y, buf.data());
    return jac * buf;
  }
  refresh(d - 1);
  RealVector y(d);
  while (true) {
    for (int i = 0; i < order; ++i) {
      y.noalias() = partial[1] + contrib[0].col(i);
      f(y, buf.data());
      const double w = wpart[1] * wexp[i];
      for (int o = 0; o < nout; ++o) acc[o] += w * buf[o];
    }
    int k = 1;
    while (k < d && ++idx[k] == order) idx[k++] = 0;
    if (k >= d) break;
    refresh(k);
  }
  return acc;
}
}  // namespace detail

/// ∫ f(y) dy over R^d, where f is dominated by exp(−½(y−m)ᵀP(y−m)).
/// Orders escalate until two successive results agree to tol·max(1,|value|).
template <class F>
QuadratureResult integrate_gaussian(const RealVector& center, const RealMatrix& precision, int nout,
                                    F&& f, const QuadratureOptions& opts = {}) {
  const int d = static_cast<int>(center.size());
  if (precision.rows() != d || precision.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "quadrature precision shape");
  }
  Eigen::LLT<RealMatrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "quadrature weight is not positive definite");
  }
  // y = m + √2 L⁻ᵀ t maps the weight to e^{−|t|²}.
  const RealMatrix Lt = llt.matrixU();
  const RealMatrix whiten =
      std::sqrt(2.0) * Lt.triangularView<Eigen::Upper>().solve(RealMatrix::Identity(d, d));
  const double jac = std::abs(whiten.determinant());

  QuadratureResult res;
  if (opts.fixed_order > 0) {
    res.value = detail::tensor_rule(center, whiten, jac, nout, opts.fixed_order, f);
    res.order = opts.fixed_order;
    return res;
  }
  const std::vector<int> orders = quadrature_orders(opts.start_order);
  ComplexVector prev;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    ComplexVector cur = detail::tensor_rule(center, whiten, jac, nout, orders[i], f);
    if (i > 0) {
      const double change = nout ? (cur - prev).cwiseAbs().maxCoeff() : 0.0;
      const double scale = nout ? std::max(1.0, cur.cwiseAbs().maxCoeff()) : 1.0;
      if (change <= opts.tol * scale) {
        res.value = cur;
        res.order = orders[i];
        res.change = change;
        return res;
      }
      res.change = change;
    }
    prev = std::move(cur);
  }
  throw Error(ErrorCode::QuadratureNotConverged,
              "successive orders differ by " + detail::sci(res.change) + " at order " +
                  std::to_string(orders.back()));
}

}  // namespace nctk
