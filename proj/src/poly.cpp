#include "bvflow/poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace bvflow {

namespace {

void require_same(const std::shared_ptr<const Grading>& a, const std::shared_ptr<const Grading>& b) {
  if (a && b && a != b && !(*a == *b)) throw std::invalid_argument("polynomial basis mismatch");
}

bool odd_coord(const Grading& g, int i) { return odd(g.eps[i]); }

}  // namespace

template <class T> Poly<T> Poly<T>::constant(std::shared_ptr<const Grading> g, const T& c) {
  Poly p(std::move(g));
  p.add_term(Monomial{}, c);
  return p;
}

template <class T> Poly<T> Poly<T>::coordinate(std::shared_ptr<const Grading> g, int i) {
  Poly p(std::move(g));
  Monomial m;
  m.e[i] = 1;
  p.add_term(m, T(1));
  return p;
}

template <class T>
Poly<T> Poly<T>::from_factors(std::shared_ptr<const Grading> g, const std::vector<int>& factors, const T& c) {
  std::vector<int> f = factors;
  int sign = 1;
  // Insertion sort; each transposition of two odd factors flips the sign.
  for (size_t k = 1; k < f.size(); ++k)
    for (size_t j = k; j > 0 && f[j - 1] > f[j]; --j) {
      if (odd_coord(*g, f[j - 1]) && odd_coord(*g, f[j])) sign = -sign;
      std::swap(f[j - 1], f[j]);
    }
  Poly p(g);
  Monomial m;
  for (size_t k = 0; k < f.size(); ++k) {
    if (k > 0 && f[k] == f[k - 1] && odd_coord(*g, f[k])) return p;
    ++m.e[f[k]];
  }
  p.add_term(m, sign > 0 ? c : T(-c));
  return p;
}

template <class T> void Poly<T>::add_term(const Monomial& m, const T& c) {
  if (Scalar<T>::is_zero(c)) return;
  auto [it, inserted] = t_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (Scalar<T>::is_zero(it->second)) t_.erase(it);
  }
}

template <class T> T Poly<T>::coeff(const Monomial& m) const {
  auto it = t_.find(m);
  return it == t_.end() ? T(0) : it->second;
}

template <class T> T Poly<T>::constant_term() const { return coeff(Monomial{}); }

template <class T> T Poly<T>::max_abs() const {
  T r(0);
  for (const auto& [m, c] : t_)
    if (Scalar<T>::abs(c) > r) r = Scalar<T>::abs(c);
  return r;
}

template <class T> int Poly<T>::degree_of(const Monomial& m) const {
  int d = 0;
  for (int i = 0; i < dim(); ++i) d += m.e[i] * g_->eps[i];
  return d;
}

template <class T> std::set<int> Poly<T>::degrees() const {
  std::set<int> s;
  for (const auto& kv : t_) s.insert(degree_of(kv.first));
  return s;
}

template <class T> int Poly<T>::poly_degree() const {
  int d = -1;
  for (const auto& kv : t_) d = std::max(d, kv.first.total());
  return d;
}

template <class T> Poly<T> Poly<T>::homogeneous_part(int degree) const {
  Poly r(g_);
  for (const auto& [m, c] : t_)
    if (degree_of(m) == degree) r.t_.emplace(m, c);
  return r;
}

template <class T> Poly<T> Poly<T>::truncated(int d, bool* dropped) const {
  Poly r(g_);
  for (const auto& [m, c] : t_) {
    if (m.total() <= d) r.t_.emplace(m, c);
    else if (dropped) *dropped = true;
  }
  return r;
}

template <class T> Poly<T> Poly<T>::without_constant() const {
  Poly r = *this;
  r.t_.erase(Monomial{});
  return r;
}

template <class T> Poly<T>& Poly<T>::operator+=(const Poly& o) {
  if (!g_) g_ = o.g_;
  require_same(g_, o.g_);
  for (const auto& [m, c] : o.t_) add_term(m, c);
  return *this;
}

template <class T> Poly<T>& Poly<T>::operator-=(const Poly& o) {
  if (!g_) g_ = o.g_;
  require_same(g_, o.g_);
  for (const auto& [m, c] : o.t_) add_term(m, -c);
  return *this;
}

template <class T> Poly<T> Poly<T>::operator-() const {
  Poly r = *this;
  for (auto& kv : r.t_) kv.second = -kv.second;
  return r;
}

template <class T> Poly<T> Poly<T>::scaled(const T& c) const {
  Poly r(g_);
  if (Scalar<T>::is_zero(c)) return r;
  for (const auto& [m, v] : t_) r.add_term(m, v * c);
  return r;
}

template <class T> Poly<T> multiply(const Poly<T>& a, const Poly<T>& b, int max_total, bool* dropped) {
  require_same(a.grading(), b.grading());
  auto g = a.grading() ? a.grading() : b.grading();
  Poly<T> r(g);
  if (a.is_zero() || b.is_zero()) return r;
  const int n = g->dim();
  std::array<bool, kMaxDim> oddc{};
  for (int i = 0; i < n; ++i) oddc[i] = odd(g->eps[i]);
  for (const auto& [ma, ca] : a.terms()) {
    // suffix[j] = number of odd factors of ma at positions > j
    std::array<int, kMaxDim + 1> suffix{};
    for (int j = n - 1; j >= 0; --j) suffix[j] = suffix[j + 1] + (oddc[j] ? ma.e[j] : 0);
    for (const auto& [mb, cb] : b.terms()) {
      Monomial m;
      bool vanish = false;
      int swaps = 0;
      for (int i = 0; i < n; ++i) {
        int e = ma.e[i] + mb.e[i];
        if (oddc[i] && e > 1) { vanish = true; break; }
        m.e[i] = static_cast<std::uint8_t>(e);
        if (oddc[i] && mb.e[i]) swaps += suffix[i + 1];
      }
      if (vanish) continue;
      if (max_total >= 0 && m.total() > max_total) {
        if (dropped) *dropped = true;
        continue;
      }
      T c = ca * cb;
      r.add_term(m, odd(swaps) ? T(-c) : c);
    }
  }
  return r;
}

template <class T> Poly<T> operator*(const Poly<T>& a, const Poly<T>& b) { return multiply(a, b); }

template <class T> Poly<T> partial(int i, const Poly<T>& u) {
  Poly<T> r(u.grading());
  if (u.is_zero()) return r;
  const auto& eps = u.grading()->eps;
  for (const auto& [m, c] : u.terms()) {
    if (m.e[i] == 0) continue;
    long before = 0;
    for (int k = 0; k < i; ++k) before += static_cast<long>(m.e[k]) * eps[k];
    Monomial d = m;
    --d.e[i];
    T v = c * Scalar<T>::from_int(m.e[i]);
    r.add_term(d, odd(eps[i] * before) ? T(-v) : v);
  }
  return r;
}

template <class T> Poly<T> partial_right(int i, const Poly<T>& u) {
  Poly<T> r(u.grading());
  if (u.is_zero()) return r;
  const auto& eps = u.grading()->eps;
  for (const auto& [m, c] : u.terms()) {
    if (m.e[i] == 0) continue;
    long before = 0;
    for (int k = 0; k < i; ++k) before += static_cast<long>(m.e[k]) * eps[k];
    long deg = u.degree_of(m);
    Monomial d = m;
    --d.e[i];
    T v = c * Scalar<T>::from_int(m.e[i]);
    r.add_term(d, odd(eps[i] * before + eps[i] * (deg + 1)) ? T(-v) : v);
  }
  return r;
}

namespace {
void enumerate(const Grading& g, int i, int left, Monomial& cur, std::vector<Monomial>& out) {
  if (i == g.dim()) {
    out.push_back(cur);
    return;
  }
  int cap = odd(g.eps[i]) ? std::min(1, left) : left;
  for (int e = 0; e <= cap; ++e) {
    cur.e[i] = static_cast<std::uint8_t>(e);
    enumerate(g, i + 1, left - e, cur, out);
  }
  cur.e[i] = 0;
}
}  // namespace

std::vector<Monomial> monomials_up_to(const Grading& g, int max_total) {
  std::vector<Monomial> out;
  Monomial cur;
  enumerate(g, 0, max_total, cur, out);
  std::sort(out.begin(), out.end(), GradedLex{});
  return out;
}

std::vector<Monomial> monomials_of_degree(const Grading& g, int internal_degree, int max_total) {
  std::vector<Monomial> out;
  for (const auto& m : monomials_up_to(g, max_total)) {
    int d = 0;
    for (int i = 0; i < g.dim(); ++i) d += m.e[i] * g.eps[i];
    if (d == internal_degree) out.push_back(m);
  }
  return out;
}

template <class T>
HbarSeries<T>::HbarSeries(std::shared_ptr<const Grading> g, int order) : g_(g), c_(order + 1, Poly<T>(g)) {
  if (order < 0) throw std::invalid_argument("hbar order must be non-negative");
}

template <class T> HbarSeries<T> HbarSeries<T>::from_poly(const Poly<T>& p, int order) {
  HbarSeries s(p.grading(), order);
  s.c_[0] = p;
  return s;
}

template <class T> bool HbarSeries<T>::is_zero() const {
  for (const auto& p : c_)
    if (!p.is_zero()) return false;
  return true;
}

template <class T> T HbarSeries<T>::max_abs() const {
  T r(0);
  for (const auto& p : c_) {
    T m = p.max_abs();
    if (m > r) r = m;
  }
  return r;
}

template <class T> HbarSeries<T> HbarSeries<T>::shifted() const {
  HbarSeries r(g_, order());
  for (int k = 1; k <= order(); ++k) r.c_[k] = c_[k - 1];
  return r;
}

template <class T> HbarSeries<T> HbarSeries<T>::scaled(const T& c) const {
  HbarSeries r = *this;
  for (auto& p : r.c_) p = p.scaled(c);
  return r;
}

template <class T> HbarSeries<T>& HbarSeries<T>::operator+=(const HbarSeries& o) {
  if (o.order() != order()) throw std::invalid_argument("hbar order mismatch");
  for (int k = 0; k <= order(); ++k) c_[k] += o.c_[k];
  return *this;
}

template <class T> HbarSeries<T>& HbarSeries<T>::operator-=(const HbarSeries& o) {
  if (o.order() != order()) throw std::invalid_argument("hbar order mismatch");
  for (int k = 0; k <= order(); ++k) c_[k] -= o.c_[k];
  return *this;
}

template <class T> HbarSeries<T> operator*(const HbarSeries<T>& a, const HbarSeries<T>& b) {
  if (a.order() != b.order()) throw std::invalid_argument("hbar order mismatch");
  HbarSeries<T> r(a.grading(), a.order());
  for (int i = 0; i <= a.order(); ++i)
    for (int j = 0; i + j <= a.order(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

#define BVFLOW_INST(T)                                                                \
  template class Poly<T>;                                                             \
  template class HbarSeries<T>;                                                       \
  template Poly<T> multiply(const Poly<T>&, const Poly<T>&, int, bool*);              \
  template Poly<T> operator*(const Poly<T>&, const Poly<T>&);                         \
  template Poly<T> partial(int, const Poly<T>&);                                      \
  template Poly<T> partial_right(int, const Poly<T>&);                                \
  template HbarSeries<T> operator*(const HbarSeries<T>&, const HbarSeries<T>&);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
