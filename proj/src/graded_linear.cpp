#include "bvflow/graded_linear.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <map>
#include <stdexcept>

namespace bvflow {

template <class T>
GradedBasis<T>::GradedBasis(std::vector<int> degrees, Matrix<T> omega) : omega_(std::move(omega)) {
  const int n = static_cast<int>(degrees.size());
  if (n == 0) throw std::invalid_argument("basis: empty degree list");
  if (n > kMaxDim) throw std::invalid_argument("basis: dimension exceeds " + std::to_string(kMaxDim));
  if (omega_.rows != n || omega_.cols != n) throw std::invalid_argument("basis: omega is not " + std::to_string(n) + "x" + std::to_string(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!Scalar<T>::is_zero(omega_(i, j)) && degrees[i] + degrees[j] + 1 != 0)
        throw std::invalid_argument("basis: degree -1 pairing violated at omega(" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (!Scalar<T>::is_zero(omega_(i, j) + omega_(j, i)))
        throw std::invalid_argument("basis: omega not antisymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  std::map<int, int> count;
  for (int e : degrees) ++count[e];
  for (auto [e, c] : count)
    if (count[-1 - e] != c) throw std::invalid_argument("basis: unmatched degree block " + std::to_string(e));
  auto inv = inverse(omega_);
  if (!inv) throw std::invalid_argument("basis: omega singular");
  omega_inv_ = *inv;
  grading_ = std::make_shared<const Grading>(Grading{std::move(degrees)});
}

template <class T> bool respects_degree(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  const int n = b.dim();
  if (A.m.rows != n || A.m.cols != n) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!Scalar<T>::is_zero(A.m(i, j)) && b.eps(j) != b.eps(i) + A.degree) return false;
  return true;
}

template <class T> void check_endomorphism(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  if (A.m.rows != b.dim() || A.m.cols != b.dim()) throw std::invalid_argument("endomorphism: dimension mismatch");
  if (!respects_degree(b, A))
    throw std::invalid_argument("endomorphism: entry violates degree " + std::to_string(A.degree));
}

template <class T> Endomorphism<T> operator+(const Endomorphism<T>& A, const Endomorphism<T>& B) {
  return {A.degree, A.m + B.m};
}
template <class T> Endomorphism<T> operator-(const Endomorphism<T>& A, const Endomorphism<T>& B) {
  return {A.degree, A.m - B.m};
}
template <class T> Endomorphism<T> operator*(const Endomorphism<T>& A, const Endomorphism<T>& B) {
  return {A.degree + B.degree, A.m * B.m};
}
template <class T> Endomorphism<T> operator*(const T& c, const Endomorphism<T>& A) {
  return {A.degree, c * A.m};
}

template <class T> T graded_trace(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  if (A.m.rows != b.dim()) throw std::invalid_argument("graded_trace: dimension mismatch");
  T s(0);
  for (int i = 0; i < b.dim(); ++i) {
    if (odd(static_cast<long>(A.degree + 1) * b.eps(i))) s -= A.m(i, i);
    else s += A.m(i, i);
  }
  return s;
}

template <class T> Endomorphism<T> transpose(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  const int n = b.dim();
  if (A.m.rows != n) throw std::invalid_argument("transpose: dimension mismatch");
  const auto& W = b.omega_inv();
  const auto& w = b.omega();
  const long p = A.degree;
  // (A~)_kl = -W_ki s_ij A^j_i w_jl
  Matrix<T> mid(n, n);  // mid(i,l) = sum_j s_ij A(j,i) w(j,l)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (Scalar<T>::is_zero(A.m(j, i))) continue;
      long el = b.eps_low(j);
      T a = A.m(j, i);
      if (odd(p * (b.eps(i) + el) + static_cast<long>(b.eps(i)) * el)) a = -a;
      for (int l = 0; l < n; ++l)
        if (!Scalar<T>::is_zero(w(j, l))) mid(i, l) += a * w(j, l);
    }
  Matrix<T> r = W * mid;
  for (auto& x : r.a) x = -x;
  return {A.degree, r};
}

template <class T> Endomorphism<T> euler(const GradedBasis<T>& b) {
  Matrix<T> m(b.dim(), b.dim());
  for (int i = 0; i < b.dim(); ++i) m(i, i) = Scalar<T>::from_int(b.eps(i));
  return {0, m};
}

template <class T> Endomorphism<T> commutator(const Endomorphism<T>& A, const Endomorphism<T>& B) {
  if (A.m.rows != B.m.rows) throw std::invalid_argument("commutator: dimension mismatch");
  Matrix<T> ab = A.m * B.m, ba = B.m * A.m;
  if (odd(static_cast<long>(A.degree) * B.degree)) return {A.degree + B.degree, ab + ba};
  return {A.degree + B.degree, ab - ba};
}

template <class T> bool is_nilpotent(const Endomorphism<T>& A) {
  Matrix<T> p = A.m;
  for (int k = 1; k < A.m.rows; ++k) p = p * A.m;
  if constexpr (Scalar<T>::exact) return p.is_zero();
  else return Scalar<T>::to_double(p.max_abs()) <= 1e-12;
}

template <> Endomorphism<mpq_class> matrix_exp(const Endomorphism<mpq_class>& A, const mpq_class& tau) {
  if (A.degree != 0) throw std::invalid_argument("matrix_exp: nonzero degree " + std::to_string(A.degree));
  if (!is_nilpotent(A)) throw std::invalid_argument("matrix_exp: non-nilpotent matrix in rational mode");
  const int n = A.m.rows;
  Matrix<mpq_class> term = Matrix<mpq_class>::identity(n), sum = term;
  for (int k = 1; k < n; ++k) {
    term = mpq_class(tau / k) * (term * A.m);
    if (term.is_zero()) break;
    sum = sum + term;
  }
  return {0, sum};
}

template <> Endomorphism<double> matrix_exp(const Endomorphism<double>& A, const double& tau) {
  if (A.degree != 0) throw std::invalid_argument("matrix_exp: nonzero degree " + std::to_string(A.degree));
  const int n = A.m.rows;
  Eigen::MatrixXd e(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e(i, j) = tau * A.m(i, j);
  Eigen::MatrixXd x = e.exp();
  // Entries outside the reachability pattern of A are structurally zero; keep them exact.
  std::vector<char> reach(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) reach[i * n + i] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        if (!reach[i * n + k]) continue;
        for (int j = 0; j < n; ++j)
          if (A.m(k, j) != 0.0 && !reach[i * n + j]) reach[i * n + j] = 1, grew = true;
      }
  }
  Matrix<double> r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = reach[i * n + j] ? x(i, j) : 0.0;
  return {0, r};
}

template <class T> T antisymmetry_defect(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  return (transpose(b, A) + A).m.max_abs();
}

template <class T> T transpose_pairing_defect(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  // Internal basis vectors a_k (|a_k| = -eps^k), <a_k,a_l>_E = omega_kl:
  // <a_k, A a_l> = (-1)^{(p+1)(|a_k|+|a_l|) + |a_k||a_l|} <(-1)^{|a_l|F} a_l, A~ (-1)^{|a_k|F} a_k>.
  const int n = b.dim();
  const Endomorphism<T> At = transpose(b, A);
  const Matrix<T> lhs = b.omega() * A.m, rhs = b.omega() * At.m;
  T worst(0);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      long ek = b.eps(k), el = b.eps(l);
      long s = (A.degree + 1L) * (ek + el) + ek * el + ek + el;
      T d = odd(s) ? T(lhs(k, l) + rhs(l, k)) : T(lhs(k, l) - rhs(l, k));
      if (Scalar<T>::abs(d) > worst) worst = Scalar<T>::abs(d);
    }
  return worst;
}

#define BVFLOW_INST(T)                                                                        \
  template class GradedBasis<T>;                                                              \
  template bool respects_degree(const GradedBasis<T>&, const Endomorphism<T>&);               \
  template void check_endomorphism(const GradedBasis<T>&, const Endomorphism<T>&);            \
  template Endomorphism<T> operator+(const Endomorphism<T>&, const Endomorphism<T>&);         \
  template Endomorphism<T> operator-(const Endomorphism<T>&, const Endomorphism<T>&);         \
  template Endomorphism<T> operator*(const Endomorphism<T>&, const Endomorphism<T>&);         \
  template Endomorphism<T> operator*(const T&, const Endomorphism<T>&);                       \
  template T graded_trace(const GradedBasis<T>&, const Endomorphism<T>&);                     \
  template Endomorphism<T> transpose(const GradedBasis<T>&, const Endomorphism<T>&);          \
  template Endomorphism<T> euler(const GradedBasis<T>&);                                      \
  template Endomorphism<T> commutator(const Endomorphism<T>&, const Endomorphism<T>&);        \
  template bool is_nilpotent(const Endomorphism<T>&);                                         \
  template T antisymmetry_defect(const GradedBasis<T>&, const Endomorphism<T>&);              \
  template T transpose_pairing_defect(const GradedBasis<T>&, const Endomorphism<T>&);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
