#pragma once

#include "bvflow/flows.hpp"

#include <set>

namespace bvflow {

template <class T> struct Gl11Structure {
  Endomorphism<T> Q, Qbar, H, F;
};

// The grading endomorphism obeying [F,Q] = Q, [F,Qbar] = -Qbar and F~ = F + 1: diag(-eps^i - 1).
template <class T> Endomorphism<T> gl11_F(const GradedBasis<T>& b);
template <class T>
Gl11Structure<T> make_gl11(const GradedBasis<T>& b, Endomorphism<T> Q, Endomorphism<T> Qbar, Endomorphism<T> H);
// {Qbar,Q} = Qbar Q - Q Qbar
template <class T> Endomorphism<T> qbar_q_bracket(const Gl11Structure<T>& s);

// Axiom names, in report order.
const std::vector<std::string>& gl11_axiom_names();

// One record per axiom, named "gl11.<axiom>"; axioms listed in `skip` are omitted.
// Throws on dimension or degree mismatches. Tolerance 0 means exact (rational) or 1e-12 (float).
template <class T>
std::vector<CheckRecord> validate_gl11(const GradedBasis<T>& b, const Gl11Structure<T>& s, double tolerance = 0,
                                       const std::set<std::string>& skip = {});

template <class T> struct FreeModel {
  GradedBasis<T> basis;
  Gl11Structure<T> s;
  FreeModel(GradedBasis<T> b, Gl11Structure<T> st);
};

// Coefficient matrix M(k,m) of x^m in D(x^k) for a degree-0 derivation D.
template <class T>
Matrix<T> coordinate_matrix(const GradedBasis<T>& b, const std::function<Poly<T>(const Poly<T>&)>& D);

// e^{-tH}
template <class T> Endomorphism<T> free_deformer(const FreeModel<T>& m, const T& t);
template <class T> DeformedLaplacian<T> free_laplacian(const FreeModel<T>& m, const T& t);
// Coordinate action of 1/2 <x,H ad x>.
template <class T> Matrix<T> free_generator_matrix(const FreeModel<T>& m);
// exp((t-s)/2 <x,H ad x>) as a linear substitution, zero Jacobian.
template <class T> FlowMap<T> free_flow(const FreeModel<T>& m, const T& t, const T& s, int max_degree = 6);
// -1/2 <x, Q e^{tH} x>
template <class T> Poly<T> free_action(const FreeModel<T>& m, const T& t);
// d/dt of the free action in closed form: -1/2 <x, Q H e^{tH} x>
template <class T> Poly<T> free_action_rate(const FreeModel<T>& m, const T& t);
template <class T>
FlowFamily<T> free_family(const FreeModel<T>& m, std::vector<T> grid, const T& fd_step, int max_degree = 6);

// Componentwise element body + theta soul.
template <class T> struct ExtendedElement {
  Poly<T> body, soul;
};

template <class T> struct ExtendedFamily {
  DeformedLaplacian<T> body;  // Delta_{e^{-tH}}
  DeformedLaplacian<T> soul;  // Delta_{Qbar e^{-tH}}
  ExtendedElement<T> action;  // (S^0_t, -1/4 <x,{Qbar,Q} e^{tH} x>)
};

template <class T> ExtendedFamily<T> extended_family(const FreeModel<T>& m, const T& t);
// chi* = 1/2 <x, Qbar ad x>
template <class T> Poly<T> soul_derivation(const FreeModel<T>& m, const Poly<T>& u);

// Body and soul equations of the extended master equation.
template <class T> struct ExtendedMe {
  T body, soul;
};
template <class T> ExtendedMe<T> extended_me_residual(const FreeModel<T>& m, const T& t);

// Named checks of the extended flow on the grid: the soul Laplacian built by conjugation,
// soul canonicality, soul transport of the action, and the two master equations.
template <class T>
std::vector<CheckRecord> extended_suite(const FreeModel<T>& m, const std::vector<T>& grid, int probe_degree, double tol);

// |dS/dt + Delta_{Qbar e} S + 1/2 (S,S)_{Qbar e} + 1/2 grtr(Qbar Q)| with dS/dt by central differences (h > 0)
// or in closed form (h == 0).
template <class T> T polchinski_residual(const FreeModel<T>& m, const T& t, const T& h);

// Linear derivation of the Hamiltonian flow of (<x,Bx>,.)_A on coordinates.
template <class T>
Matrix<T> hamiltonian_matrix(const GradedBasis<T>& b, const Endomorphism<T>& B, const Endomorphism<T>& A);

// Random gl(1|1) structure on a paired basis of dimension 2, 4 or 6 (dimension 3 is rejected).
// Deterministic per seed; rational mode requires nilpotent H. Throws when the budget runs out.
template <class T> FreeModel<T> sample_gl11(int dim, unsigned long seed, int budget = 200000);

}  // namespace bvflow
