#pragma once

#include "bvflow/poly.hpp"

#include <random>

namespace bvtest {

using namespace bvflow;
using Q = mpq_class;

// Paired coordinates (2k, 2k+1) with omega(2k,2k+1) = w[k].
template <class T = Q>
inline GradedBasis<T> paired_basis(const std::vector<int>& first_degrees, const std::vector<long>& w = {}) {
  const int n = 2 * static_cast<int>(first_degrees.size());
  std::vector<int> eps(n);
  Matrix<T> om(n, n);
  for (size_t k = 0; k < first_degrees.size(); ++k) {
    eps[2 * k] = first_degrees[k];
    eps[2 * k + 1] = -1 - first_degrees[k];
    T v = Scalar<T>::from_int(k < w.size() ? w[k] : 1);
    om(2 * k, 2 * k + 1) = v;
    om(2 * k + 1, 2 * k) = -v;
  }
  return GradedBasis<T>(eps, om);
}

// A small zoo of bases at dimension 2, 4 and 6 with mixed parities and non-unit omega.
inline std::vector<GradedBasis<Q>> basis_zoo() {
  std::vector<GradedBasis<Q>> z;
  z.push_back(paired_basis<Q>({0}));
  {
    Matrix<Q> om(4, 4);
    om(0, 2) = 1, om(2, 0) = -1, om(1, 3) = 2, om(3, 1) = -2;
    z.emplace_back(std::vector<int>{0, 0, -1, -1}, om);
  }
  z.push_back(paired_basis<Q>({1, 0}, {3, 1}));
  z.push_back(paired_basis<Q>({0, -2}, {1, -1}));
  z.push_back(paired_basis<Q>({0, 1, 0}, {1, 2, -1}));
  return z;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long seed) : gen(seed) {}
  long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen); }
  Q small() { return Q(range(-3, 3)); }
  Q frac() {
    Q q(range(-4, 4), range(1, 3));
    q.canonicalize();
    return q;
  }
};

template <class T = Q> inline T to_t(const Q& q) {
  if constexpr (std::is_same_v<T, Q>) return q;
  else return q.get_d();
}

template <class T = Q> Endomorphism<T> random_endo(const GradedBasis<T>& b, int p, Rng& r) {
  const int n = b.dim();
  Matrix<T> m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (b.eps(j) == b.eps(i) + p) m(i, j) = to_t<T>(r.small());
  return {p, m};
}

template <class T = Q> Endomorphism<T> sym_part(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  return to_t<T>(Q(1, 2)) * (A + transpose(b, A));
}
template <class T = Q> Endomorphism<T> anti_part(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  return to_t<T>(Q(1, 2)) * (A - transpose(b, A));
}

// Random polynomial of one internal degree with a few terms of total degree <= max_total.
template <class T = Q>
Poly<T> random_poly(const GradedBasis<T>& b, int internal_degree, int max_total, int terms, Rng& r) {
  auto pool = monomials_of_degree(*b.grading(), internal_degree, max_total);
  Poly<T> p(b.grading());
  if (pool.empty()) return p;
  for (int k = 0; k < terms; ++k) p.add_term(pool[r.range(0, static_cast<long>(pool.size()) - 1)], to_t<T>(r.frac()));
  return p;
}

// Internal degrees that carry at least one monomial of total degree in [1, max_total].
inline std::vector<int> populated_degrees(const Grading& g, int max_total) {
  std::set<int> s;
  for (const auto& m : monomials_up_to(g, max_total)) {
    if (m.total() == 0) continue;
    int d = 0;
    for (int i = 0; i < g.dim(); ++i) d += m.e[i] * g.eps[i];
    s.insert(d);
  }
  return {s.begin(), s.end()};
}

}  // namespace bvtest
