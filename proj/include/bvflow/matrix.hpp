#pragma once

#include "bvflow/scalar.hpp"

#include <optional>
#include <vector>

namespace bvflow {

// Dense row-major matrix over a scalar field.
template <class T> struct Matrix {
  int rows = 0, cols = 0;
  std::vector<T> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T(0)) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  bool is_zero() const {
    for (const auto& x : a)
      if (!Scalar<T>::is_zero(x)) return false;
    return true;
  }
  T max_abs() const {
    T m(0);
    for (const auto& x : a)
      if (Scalar<T>::abs(x) > m) m = Scalar<T>::abs(x);
    return m;
  }
  bool operator==(const Matrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

template <class T> Matrix<T> operator+(const Matrix<T>& x, const Matrix<T>& y);
template <class T> Matrix<T> operator-(const Matrix<T>& x, const Matrix<T>& y);
template <class T> Matrix<T> operator*(const Matrix<T>& x, const Matrix<T>& y);
template <class T> Matrix<T> operator*(const T& c, const Matrix<T>& x);
template <class T> Matrix<T> transposed(const Matrix<T>& x);

template <class T> std::optional<Matrix<T>> inverse(const Matrix<T>& m);
template <class T> int rank(const Matrix<T>& m);

template <class T> struct LeastSquares {
  std::vector<T> x;
  T residual;       // max |A x - b|
  bool consistent;  // exact solve succeeded (rational) or residual below 1e-12 (float)
};

// Exact in rational mode: RREF when consistent, normal equations otherwise.
template <class T>
LeastSquares<T> least_squares(const Matrix<T>& A, const std::vector<T>& b);

// Basis of the null space, one vector per column.
template <class T> std::vector<std::vector<T>> null_space(const Matrix<T>& A);

template <> std::optional<Matrix<mpq_class>> inverse(const Matrix<mpq_class>&);
template <> std::optional<Matrix<double>> inverse(const Matrix<double>&);
template <> int rank(const Matrix<mpq_class>&);
template <> int rank(const Matrix<double>&);
template <> LeastSquares<mpq_class> least_squares(const Matrix<mpq_class>&, const std::vector<mpq_class>&);
template <> LeastSquares<double> least_squares(const Matrix<double>&, const std::vector<double>&);
template <> std::vector<std::vector<mpq_class>> null_space(const Matrix<mpq_class>&);
template <> std::vector<std::vector<double>> null_space(const Matrix<double>&);

}  // namespace bvflow
