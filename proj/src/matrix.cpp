#include "bvflow/matrix.hpp"

#include <Eigen/Dense>

namespace bvflow {

template <class T> Matrix<T> operator+(const Matrix<T>& x, const Matrix<T>& y) {
  Matrix<T> r = x;
  for (size_t k = 0; k < r.a.size(); ++k) r.a[k] += y.a[k];
  return r;
}

template <class T> Matrix<T> operator-(const Matrix<T>& x, const Matrix<T>& y) {
  Matrix<T> r = x;
  for (size_t k = 0; k < r.a.size(); ++k) r.a[k] -= y.a[k];
  return r;
}

template <class T> Matrix<T> operator*(const Matrix<T>& x, const Matrix<T>& y) {
  Matrix<T> r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const T& xik = x(i, k);
      if (Scalar<T>::is_zero(xik)) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

template <class T> Matrix<T> operator*(const T& c, const Matrix<T>& x) {
  Matrix<T> r = x;
  for (auto& v : r.a) v *= c;
  return r;
}

template <class T> Matrix<T> transposed(const Matrix<T>& x) {
  Matrix<T> r(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) r(j, i) = x(i, j);
  return r;
}

namespace {

using Q = mpq_class;

// In-place RREF; returns pivot columns.
std::vector<int> rref(Matrix<Q>& m, int ncols) {
  std::vector<int> piv;
  int row = 0;
  for (int c = 0; c < ncols && row < m.rows; ++c) {
    int p = -1;
    for (int r = row; r < m.rows; ++r)
      if (sgn(m(r, c)) != 0) { p = r; break; }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j < m.cols; ++j) std::swap(m(p, j), m(row, j));
    Q inv = 1 / m(row, c);
    for (int j = 0; j < m.cols; ++j) m(row, j) *= inv;
    for (int r = 0; r < m.rows; ++r) {
      if (r == row || sgn(m(r, c)) == 0) continue;
      Q f = m(r, c);
      for (int j = c; j < m.cols; ++j) m(r, j) -= f * m(row, j);
    }
    piv.push_back(c);
    ++row;
  }
  return piv;
}

std::optional<std::vector<Q>> exact_solve(const Matrix<Q>& A, const std::vector<Q>& b) {
  Matrix<Q> aug(A.rows, A.cols + 1);
  for (int i = 0; i < A.rows; ++i) {
    for (int j = 0; j < A.cols; ++j) aug(i, j) = A(i, j);
    aug(i, A.cols) = b[i];
  }
  auto piv = rref(aug, A.cols);
  for (int r = static_cast<int>(piv.size()); r < A.rows; ++r)
    if (sgn(aug(r, A.cols)) != 0) return std::nullopt;
  std::vector<Q> x(A.cols, Q(0));
  for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(static_cast<int>(r), A.cols);
  return x;
}

using EM = Eigen::MatrixXd;
EM to_eigen(const Matrix<double>& m) {
  EM e(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}
Matrix<double> from_eigen(const EM& e) {
  Matrix<double> m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m(i, j) = e(i, j);
  return m;
}

template <class T> T residual_of(const Matrix<T>& A, const std::vector<T>& x, const std::vector<T>& b) {
  T worst(0);
  for (int i = 0; i < A.rows; ++i) {
    T s = -b[i];
    for (int j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
    if (Scalar<T>::abs(s) > worst) worst = Scalar<T>::abs(s);
  }
  return worst;
}

}  // namespace

template <> std::optional<Matrix<Q>> inverse(const Matrix<Q>& m) {
  int n = m.rows;
  Matrix<Q> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto piv = rref(aug, n);
  if (static_cast<int>(piv.size()) < n) return std::nullopt;
  Matrix<Q> r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = aug(i, n + j);
  return r;
}

template <> std::optional<Matrix<double>> inverse(const Matrix<double>& m) {
  Eigen::FullPivLU<EM> lu(to_eigen(m));
  if (!lu.isInvertible()) return std::nullopt;
  return from_eigen(lu.inverse());
}

template <> int rank(const Matrix<Q>& m) {
  Matrix<Q> c = m;
  return static_cast<int>(rref(c, c.cols).size());
}

template <> int rank(const Matrix<double>& m) {
  if (m.rows == 0 || m.cols == 0) return 0;
  Eigen::FullPivLU<EM> lu(to_eigen(m));
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

template <> LeastSquares<Q> least_squares(const Matrix<Q>& A, const std::vector<Q>& b) {
  if (auto x = exact_solve(A, b)) return {*x, Q(0), true};
  Matrix<Q> At = transposed(A);
  Matrix<Q> N = At * A;
  std::vector<Q> rhs(A.cols, Q(0));
  for (int j = 0; j < A.cols; ++j)
    for (int i = 0; i < A.rows; ++i) rhs[j] += A(i, j) * b[i];
  auto x = exact_solve(N, rhs);
  // Normal equations are always consistent.
  return {*x, residual_of(A, *x, b), false};
}

template <> LeastSquares<double> least_squares(const Matrix<double>& A, const std::vector<double>& b) {
  std::vector<double> x(A.cols, 0.0);
  if (A.rows > 0 && A.cols > 0) {
    Eigen::VectorXd eb = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<long>(b.size()));
    Eigen::CompleteOrthogonalDecomposition<EM> cod(to_eigen(A));
    cod.setThreshold(1e-12);
    Eigen::VectorXd ex = cod.solve(eb);
    for (int j = 0; j < A.cols; ++j) x[j] = ex(j);
  }
  double r = residual_of(A, x, b);
  return {x, r, r <= 1e-12};
}

template <> std::vector<std::vector<Q>> null_space(const Matrix<Q>& A) {
  Matrix<Q> c = A;
  auto piv = rref(c, c.cols);
  std::vector<bool> is_piv(A.cols, false);
  for (int p : piv) is_piv[p] = true;
  std::vector<std::vector<Q>> out;
  for (int f = 0; f < A.cols; ++f) {
    if (is_piv[f]) continue;
    std::vector<Q> v(A.cols, Q(0));
    v[f] = 1;
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -c(static_cast<int>(r), f);
    out.push_back(v);
  }
  return out;
}

template <> std::vector<std::vector<double>> null_space(const Matrix<double>& A) {
  std::vector<std::vector<double>> out;
  if (A.cols == 0) return out;
  if (A.rows == 0) {
    for (int f = 0; f < A.cols; ++f) {
      std::vector<double> v(A.cols, 0.0);
      v[f] = 1;
      out.push_back(v);
    }
    return out;
  }
  Eigen::FullPivLU<EM> lu(to_eigen(A));
  lu.setThreshold(1e-10);
  EM k = lu.kernel();
  if (lu.rank() == A.cols) return out;
  for (int c = 0; c < k.cols(); ++c) {
    std::vector<double> v(A.cols);
    for (int j = 0; j < A.cols; ++j) v[j] = k(j, c);
    out.push_back(v);
  }
  return out;
}

#define BVFLOW_INST(T)                                                  \
  template Matrix<T> operator+(const Matrix<T>&, const Matrix<T>&);     \
  template Matrix<T> operator-(const Matrix<T>&, const Matrix<T>&);     \
  template Matrix<T> operator*(const Matrix<T>&, const Matrix<T>&);     \
  template Matrix<T> operator*(const T&, const Matrix<T>&);             \
  template Matrix<T> transposed(const Matrix<T>&);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
