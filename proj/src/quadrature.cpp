#include "nctk/quadrature.hpp"

#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>

namespace nctk {

namespace {

GaussHermiteRule build_rule(int n) {
  // Jacobi matrix of the physicists' Hermite recurrence.
  RealMatrix J = RealMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(J, Eigen::EigenvaluesOnly);
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = std::pow(kPi, -0.25);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    double pp = 0.0;
    for (int it = 0; it < 10; ++it) {
      // orthonormal Hermite functions: p_j = x √(2/j) p_{j−1} − √((j−1)/j) p_{j−2}
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / (pp * pp);
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > 400) {
    throw Error(ErrorCode::InvalidArgument, "Gauss-Hermite order out of range");
  }
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(order));
  return *slot;
}

int quadrature_max_order() {
  if (const char* env = std::getenv("NC_QUADRATURE_MAX")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 400));
  }
  return 80;
}

std::vector<int> quadrature_orders(int start_order) {
  const int cap = quadrature_max_order();
  std::vector<int> orders;
  for (int o = start_order; o <= cap; o *= 2) orders.push_back(o);
  if (orders.empty()) orders.push_back(cap);
  return orders;
}

}  // namespace nctk
