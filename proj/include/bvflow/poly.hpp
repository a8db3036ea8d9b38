#pragma once

#include "bvflow/graded_linear.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace bvflow {

// Exponent vector in canonical coordinate order: x^{e_0}_0 x^{e_1}_1 ...
struct Monomial {
  std::array<std::uint8_t, kMaxDim> e{};

  int total() const {
    int s = 0;
    for (auto v : e) s += v;
    return s;
  }
  bool operator==(const Monomial& o) const { return e == o.e; }
  bool operator!=(const Monomial& o) const { return e != o.e; }
};

// Graded-lex: total degree ascending, then larger exponent of earlier coordinates first.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int ta = a.total(), tb = b.total();
    if (ta != tb) return ta < tb;
    for (int i = 0; i < kMaxDim; ++i)
      if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
    return false;
  }
};

// Element of the graded-commutative polynomial algebra on the coordinates.
template <class T> class Poly {
 public:
  using Terms = std::map<Monomial, T, GradedLex>;

  Poly() = default;
  explicit Poly(std::shared_ptr<const Grading> g) : g_(std::move(g)) {}

  static Poly constant(std::shared_ptr<const Grading> g, const T& c);
  static Poly coordinate(std::shared_ptr<const Grading> g, int i);
  // Product of the listed coordinates in the given order, sorted with its Koszul sign.
  static Poly from_factors(std::shared_ptr<const Grading> g, const std::vector<int>& factors, const T& c);

  const std::shared_ptr<const Grading>& grading() const { return g_; }
  const Terms& terms() const { return t_; }
  int dim() const { return g_ ? g_->dim() : 0; }

  void add_term(const Monomial& m, const T& c);
  bool is_zero() const { return t_.empty(); }
  T coeff(const Monomial& m) const;
  T constant_term() const;
  T max_abs() const;

  // Internal degree sum_i e_i eps^i of one monomial, and the set present.
  int degree_of(const Monomial& m) const;
  std::set<int> degrees() const;
  // Largest polynomial (total) degree; -1 for zero.
  int poly_degree() const;
  Poly homogeneous_part(int degree) const;
  // Keep monomials of total degree <= d; sets *dropped when anything was removed.
  Poly truncated(int d, bool* dropped = nullptr) const;
  Poly without_constant() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly operator-() const;
  Poly scaled(const T& c) const;
  bool operator==(const Poly& o) const { return t_ == o.t_; }

 private:
  std::shared_ptr<const Grading> g_;
  Terms t_;
};

template <class T> Poly<T> operator+(Poly<T> a, const Poly<T>& b) { return a += b; }
template <class T> Poly<T> operator-(Poly<T> a, const Poly<T>& b) { return a -= b; }
template <class T> Poly<T> operator*(const Poly<T>& a, const Poly<T>& b);
// Product dropping monomials of total degree above max_total (negative: no limit).
template <class T> Poly<T> multiply(const Poly<T>& a, const Poly<T>& b, int max_total = -1, bool* dropped = nullptr);

// Left derivative: d_i(x^j m) = delta^j_i m + (-1)^{eps^i eps^j} x^j d_i m.
template <class T> Poly<T> partial(int i, const Poly<T>& u);
// Right derivative: u d<_i = (-1)^{eps^i (|u|+1)} d_i u on homogeneous pieces.
template <class T> Poly<T> partial_right(int i, const Poly<T>& u);

// Every monomial over the grading with total degree <= max_total (odd exponents <= 1),
// optionally restricted to one internal degree.
std::vector<Monomial> monomials_up_to(const Grading& g, int max_total);
std::vector<Monomial> monomials_of_degree(const Grading& g, int internal_degree, int max_total);

// Truncated formal power series in hbar with polynomial coefficients.
template <class T> class HbarSeries {
 public:
  HbarSeries() = default;
  HbarSeries(std::shared_ptr<const Grading> g, int order);
  static HbarSeries from_poly(const Poly<T>& p, int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const std::shared_ptr<const Grading>& grading() const { return g_; }
  Poly<T>& operator[](int k) { return c_[k]; }
  const Poly<T>& operator[](int k) const { return c_[k]; }
  const std::vector<Poly<T>>& coeffs() const { return c_; }

  bool is_zero() const;
  T max_abs() const;
  // Multiply by hbar (drops the top coefficient).
  HbarSeries shifted() const;
  HbarSeries scaled(const T& c) const;
  HbarSeries& operator+=(const HbarSeries& o);
  HbarSeries& operator-=(const HbarSeries& o);
  bool operator==(const HbarSeries& o) const { return c_ == o.c_; }

 private:
  std::shared_ptr<const Grading> g_;
  std::vector<Poly<T>> c_;
};

template <class T> HbarSeries<T> operator+(HbarSeries<T> a, const HbarSeries<T>& b) { return a += b; }
template <class T> HbarSeries<T> operator-(HbarSeries<T> a, const HbarSeries<T>& b) { return a -= b; }
template <class T> HbarSeries<T> operator*(const HbarSeries<T>& a, const HbarSeries<T>& b);

}  // namespace bvflow
