#pragma once

#include "bvflow/poly.hpp"

namespace bvflow {

// Algebra morphism given by coordinate images, plus its logarithmic Jacobian.
template <class T> struct FlowMap {
  std::vector<Poly<T>> images;  // image of x^i
  int max_degree = 6;
  Poly<T> log_jacobian;
  bool truncated = false;

  static FlowMap identity(std::shared_ptr<const Grading> g, int max_degree = 6);
  // x^k -> sum_m M(k,m) x^m
  static FlowMap linear(std::shared_ptr<const Grading> g, const Matrix<T>& M, int max_degree = 6);
  const std::shared_ptr<const Grading>& grading() const { return log_jacobian.grading(); }
  // Coefficient matrix of the linear parts of the images.
  Matrix<T> linear_part() const;
};

template <class R> struct Flagged {
  R value;
  bool truncated = false;
};

// Throws when some image is not homogeneous of its coordinate's degree.
template <class T> void check_flow_map(const FlowMap<T>& phi);

template <class T> Flagged<Poly<T>> apply_flow(const FlowMap<T>& phi, const Poly<T>& u);
template <class T> Flagged<HbarSeries<T>> apply_flow(const FlowMap<T>& phi, const HbarSeries<T>& u);
// (phi psi)(x) = phi(psi(x)), r = r_phi + phi(r_psi)
template <class T> FlowMap<T> compose_flows(const FlowMap<T>& phi, const FlowMap<T>& psi);
// Inverse of a linear substitution; r_{phi^-1} = -phi^-1(r_phi).
template <class T> FlowMap<T> invert_linear(const FlowMap<T>& phi);

}  // namespace bvflow
