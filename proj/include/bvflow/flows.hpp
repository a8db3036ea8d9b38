#pragma once

#include "bvflow/bv.hpp"
#include "bvflow/report.hpp"

#include <functional>
#include <map>

namespace bvflow {

// Two-parameter family of flow maps chi_{t,s} (with Jacobians) over a family of deformers A_t.
template <class T> struct FlowFamily {
  std::function<FlowMap<T>(const T& t, const T& s)> map_at;
  std::function<Endomorphism<T>(const T& t)> laplacian_at;
  std::vector<T> grid;
  T fd_step;
  // Points per side of the central difference stencil; m points are exact for
  // families polynomial in t of degree <= 2m.
  int stencil = 1;
};

// Weights w_{-m..m} of the first-derivative stencil sum_k w_k f(t + k h) / h.
template <class T> std::vector<T> central_weights(int m);

// d/dt of a t-indexed polynomial family with the family's stencil.
template <class T>
Poly<T> derive(const std::function<Poly<T>(const T&)>& f, const T& t, const T& h, int stencil);
template <class T>
Matrix<T> derive(const std::function<Matrix<T>(const T&)>& f, const T& t, const T& h, int stencil);

// Degree-0 derivation acting on coordinates by images c_k: D f = sum_k c_k d_k f.
template <class T> Poly<T> apply_derivation(const std::vector<Poly<T>>& images, const Poly<T>& f);

struct SuiteTolerance {
  double exact = 0;  // groupoid, cocycle, canonicality
  double fd = 0;     // evolution and Jacobian equations through finite differences
};

// Groupoid laws, Jacobian cocycle and normalization, canonicality at every grid pair and
// the evolution/Jacobian equations at every grid point. Names are prefixed with `prefix`.
template <class T>
std::vector<CheckRecord> flow_suite(const GradedBasis<T>& b, const FlowFamily<T>& F, const std::vector<Poly<T>>& probes,
                                    const SuiteTolerance& tol, const std::string& prefix = "flow.");

// Delta_{chi t} f = chi_{t,o} (Delta_o + ad_o r_{chi o,t}) chi_{t,o}^{-1} f with chi_{t,o}^{-1} = chi_{o,t}.
template <class T>
Flagged<Poly<T>> flow_built_laplacian(const GradedBasis<T>& b, const FlowFamily<T>& F, const T& o, const T& t, const Poly<T>& f);

// gamma_t with its inverse; the Jacobian of the inverse must be -gamma^{-1} r_gamma.
template <class T> struct Conjugator {
  FlowMap<T> map, inverse;
};

template <class T>
FlowFamily<T> conjugate_flow(const FlowFamily<T>& F, const std::function<Conjugator<T>(const T&)>& gamma);
template <class T> Conjugator<T> linear_conjugator(std::shared_ptr<const Grading> g, const Matrix<T>& M, const Poly<T>& r, int max_degree);

// Infinitesimal generator: chi.(x^k) = sum_m linear(k,m) x^m + (hamiltonian, x^k)_deformer.
template <class T> struct Generator {
  Matrix<T> linear;
  Poly<T> hamiltonian;
  Endomorphism<T> deformer;
  Poly<T> r_dot;
};

template <class T> std::vector<Poly<T>> generator_images(const GradedBasis<T>& b, const Generator<T>& g);

// Classical RK4 on coordinate images and Jacobian: P' = chi.(P), r' = chi.(r) + r.
template <class T>
FlowMap<T> reconstruct_flow(const GradedBasis<T>& b, const std::function<Generator<T>(const T&)>& gen, const T& s, const T& t,
                            int steps, int max_degree);

// Residuals of the generator hypotheses at time t on the probes:
//   chi.(f,g)_t - (chi.f,g)_t - (f,chi.g)_t - d/dt (f,g)_t
//   dDelta_t/dt - [chi., Delta_t] + ad_t r.
template <class T> struct GeneratorHypotheses {
  T bracket_law;
  T evolution;
};
template <class T>
GeneratorHypotheses<T> check_generator(const GradedBasis<T>& b, const std::function<Generator<T>(const T&)>& gen,
                                       const std::function<Endomorphism<T>(const T&)>& deformer, const T& t, const T& h,
                                       int stencil, const std::vector<Poly<T>>& probes);

// ker - im of Delta_A per internal degree on polynomials of total degree <= D_max.
template <class T> std::map<int, int> laplacian_cohomology_dims(const GradedBasis<T>& b, const Endomorphism<T>& A, int D_max);

}  // namespace bvflow
