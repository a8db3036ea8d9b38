#pragma once

#include "bvflow/matrix.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bvflow {

constexpr int kMaxDim = 8;

// Coordinate degrees; shared by polynomials built over one basis.
struct Grading {
  std::vector<int> eps;
  int dim() const { return static_cast<int>(eps.size()); }
  bool operator==(const Grading& o) const { return eps == o.eps; }
};

// Degree -1 symplectic vector space in coordinates x^i of degree eps[i].
// omega(i,j) != 0 only when eps[i] + eps[j] + 1 == 0.
template <class T> class GradedBasis {
 public:
  // Throws std::invalid_argument naming the violated invariant.
  GradedBasis(std::vector<int> degrees, Matrix<T> omega);

  int dim() const { return grading_->dim(); }
  const std::vector<int>& degrees() const { return grading_->eps; }
  int eps(int i) const { return grading_->eps[i]; }
  // Degree of the dual coordinate x_i.
  int eps_low(int i) const { return -grading_->eps[i] - 1; }
  const Matrix<T>& omega() const { return omega_; }
  const Matrix<T>& omega_inv() const { return omega_inv_; }
  const std::shared_ptr<const Grading>& grading() const { return grading_; }

 private:
  std::shared_ptr<const Grading> grading_;
  Matrix<T> omega_, omega_inv_;
};

// Homogeneous endomorphism of degree p: m(i,j) != 0 only when eps[j] == eps[i] + p.
template <class T> struct Endomorphism {
  int degree = 0;
  Matrix<T> m;

  Endomorphism() = default;
  Endomorphism(int p, Matrix<T> mat) : degree(p), m(std::move(mat)) {}

  static Endomorphism zero(int n, int p = 0) { return {p, Matrix<T>(n, n)}; }
  static Endomorphism identity(int n) { return {0, Matrix<T>::identity(n)}; }
  int dim() const { return m.rows; }
};

// Throws when the entry-degree invariant fails.
template <class T> void check_endomorphism(const GradedBasis<T>& b, const Endomorphism<T>& A);
template <class T> bool respects_degree(const GradedBasis<T>& b, const Endomorphism<T>& A);

template <class T> Endomorphism<T> operator+(const Endomorphism<T>& A, const Endomorphism<T>& B);
template <class T> Endomorphism<T> operator-(const Endomorphism<T>& A, const Endomorphism<T>& B);
template <class T> Endomorphism<T> operator*(const Endomorphism<T>& A, const Endomorphism<T>& B);
template <class T> Endomorphism<T> operator*(const T& c, const Endomorphism<T>& A);

template <class T> T graded_trace(const GradedBasis<T>& b, const Endomorphism<T>& A);
template <class T> Endomorphism<T> transpose(const GradedBasis<T>& b, const Endomorphism<T>& A);
template <class T> Endomorphism<T> euler(const GradedBasis<T>& b);
// AB - (-1)^{|A||B|} BA
template <class T> Endomorphism<T> commutator(const Endomorphism<T>& A, const Endomorphism<T>& B);
// e^{tau A}; rational mode requires A nilpotent.
template <class T> Endomorphism<T> matrix_exp(const Endomorphism<T>& A, const T& tau);
template <class T> bool is_nilpotent(const Endomorphism<T>& A);
template <> Endomorphism<mpq_class> matrix_exp(const Endomorphism<mpq_class>&, const mpq_class&);
template <> Endomorphism<double> matrix_exp(const Endomorphism<double>&, const double&);

// max |A~ + A| (zero for deformers of BV Laplacians).
template <class T> T antisymmetry_defect(const GradedBasis<T>& b, const Endomorphism<T>& A);

// Bilinear pairing <e,f>_E = e^i omega_ij f^j on coordinate vectors, and the
// largest violation of the transpose pairing property over basis-vector pairs.
template <class T> T transpose_pairing_defect(const GradedBasis<T>& b, const Endomorphism<T>& A);

}  // namespace bvflow
