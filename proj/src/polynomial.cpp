#include "nctk/polynomial.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace nctk {

namespace {
int total(const MultiIndex& idx) { return std::accumulate(idx.begin(), idx.end(), 0); }

void check_degree(const MultiIndex& idx) {
  if (total(idx) > kMaxPolyDegree) {
    throw Error(ErrorCode::DegreeTooHigh,
                "total degree " + std::to_string(total(idx)) + " exceeds " +
                    std::to_string(kMaxPolyDegree));
  }
}
}  // namespace

Polynomial Polynomial::constant(int nvars, cplx c) {
  Polynomial p(nvars);
  p.add_term(MultiIndex(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int k) {
  MultiIndex idx(nvars, 0);
  idx.at(k) = 1;
  return monomial(idx);
}

Polynomial Polynomial::linear(const ComplexVector& a, cplx c) {
  const int n = static_cast<int>(a.size());
  Polynomial p = constant(n, c);
  for (int k = 0; k < n; ++k) {
    MultiIndex idx(n, 0);
    idx[k] = 1;
    p.add_term(idx, a(k));
  }
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& idx, cplx c) {
  Polynomial p(static_cast<int>(idx.size()));
  p.add_term(idx, c);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [idx, c] : terms_) d = std::max(d, total(idx));
  return d;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && total(terms_.begin()->first) == 0);
}

cplx Polynomial::coeff(const MultiIndex& idx) const {
  auto it = terms_.find(idx);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

void Polynomial::add_term(const MultiIndex& idx, cplx c) {
  if (static_cast<int>(idx.size()) != nvars_) {
    throw Error(ErrorCode::DimensionMismatch, "multi-index length does not match variable count");
  }
  for (int e : idx) {
    if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
  }
  if (c == cplx(0.0)) return;
  check_degree(idx);
  auto [it, inserted] = terms_.emplace(idx, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

cplx Polynomial::eval(const ComplexVector& x) const {
  if (x.size() != nvars_) throw Error(ErrorCode::DimensionMismatch, "evaluation point size");
  cplx sum = 0.0;
  for (const auto& [idx, c] : terms_) {
    cplx m = c;
    for (int k = 0; k < nvars_; ++k) {
      for (int e = 0; e < idx[k]; ++e) m *= x(k);
    }
    sum += m;
  }
  return sum;
}

Polynomial Polynomial::derivative(int k) const {
  Polynomial d(nvars_);
  for (const auto& [idx, c] : terms_) {
    if (idx[k] == 0) continue;
    MultiIndex j = idx;
    j[k] -= 1;
    d.add_term(j, c * static_cast<double>(idx[k]));
  }
  return d;
}

Polynomial Polynomial::substitute(const ComplexMatrix& L, const ComplexVector& b) const {
  if (L.rows() != nvars_ || b.size() != nvars_) {
    throw Error(ErrorCode::DimensionMismatch, "substitution shape");
  }
  const int m = static_cast<int>(L.cols());
  std::vector<Polynomial> lin;
  for (int k = 0; k < nvars_; ++k) lin.push_back(linear(L.row(k).transpose(), b(k)));
  // powers[k][e] = (L z + b)_k^e, built lazily
  std::vector<std::vector<Polynomial>> powers(nvars_);
  auto power = [&](int k, int e) -> const Polynomial& {
    auto& pk = powers[k];
    if (pk.empty()) pk.push_back(constant(m, 1.0));
    while (static_cast<int>(pk.size()) <= e) pk.push_back(pk.back() * lin[k]);
    return pk[e];
  };
  Polynomial out(m);
  for (const auto& [idx, c] : terms_) {
    Polynomial term = constant(m, c);
    for (int k = 0; k < nvars_; ++k) {
      if (idx[k] > 0) term = term * power(k, idx[k]);
    }
    out += term;
  }
  return out;
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial p(nvars_);
  for (const auto& [idx, c] : terms_) {
    if (std::abs(c) > tol) p.terms_.emplace(idx, c);
  }
  return p;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [idx, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw Error(ErrorCode::DimensionMismatch, "polynomial variable count");
  for (const auto& [idx, c] : o.terms_) add_term(idx, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw Error(ErrorCode::DimensionMismatch, "polynomial variable count");
  for (const auto& [idx, c] : o.terms_) add_term(idx, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [idx, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw Error(ErrorCode::DimensionMismatch, "polynomial variable count");
  Polynomial p(a.nvars_);
  MultiIndex idx(a.nvars_);
  for (const auto& [ia, ca] : a.terms_) {
    for (const auto& [ib, cb] : b.terms_) {
      for (int k = 0; k < a.nvars_; ++k) idx[k] = ia[k] + ib[k];
      p.add_term(idx, ca * cb);
    }
  }
  return p;
}

double max_coeff_diff(const Polynomial& a, const Polynomial& b) { return (a - b).max_abs_coeff(); }

Polynomial tensor_product(const Polynomial& p, const Polynomial& q) {
  const int n = p.nvars(), m = q.nvars();
  Polynomial out(n + m);
  MultiIndex idx(n + m);
  for (const auto& [ip, cp] : p.terms()) {
    for (const auto& [iq, cq] : q.terms()) {
      std::copy(ip.begin(), ip.end(), idx.begin());
      std::copy(iq.begin(), iq.end(), idx.begin() + n);
      out.add_term(idx, cp * cq);
    }
  }
  return out;
}

}  // namespace nctk
