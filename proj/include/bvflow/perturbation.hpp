#pragma once

#include "bvflow/gl11.hpp"

namespace bvflow {

// Truncation window: the hbar^g coefficient keeps monomials of total degree <= D - 2g.
// The window is closed under every operation below, so windowed residuals are exact.
template <class T> HbarSeries<T> window(const HbarSeries<T>& u, int D, bool* dropped = nullptr);

// Q u = <x, Q (x,u)_E>_E and H u = <x, H (x,u)_E>_E
template <class T> Poly<T> q_op(const FreeModel<T>& m, const Poly<T>& u);
template <class T> Poly<T> h_op(const FreeModel<T>& m, const Poly<T>& u);
template <class T> HbarSeries<T> q_op(const FreeModel<T>& m, const HbarSeries<T>& u);
template <class T> HbarSeries<T> h_op(const FreeModel<T>& m, const HbarSeries<T>& u);

// Throws unless every coefficient has degree `degree` and the hbar^0 one is at least of order `min_order` in x.
template <class T> void check_series(const HbarSeries<T>& u, int degree, int min_order, const char* what);

// hbar Delta_e I - Q I + 1/2 (I,I)_e with e = e^{-tH}
template <class T> HbarSeries<T> interaction_me_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D);
// hbar Delta_e S + 1/2 (S,S)_e with S = S^0_t + I
template <class T> HbarSeries<T> full_me_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D);

// hbar Delta_{Qbar e} I + 1/2 (I,I)_{Qbar e}
template <class T> HbarSeries<T> rge_rhs(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D);
// Classical RK4 on [s,t]; the flag reports window truncation.
template <class T>
Flagged<HbarSeries<T>> rge_evolve(const FreeModel<T>& m, const HbarSeries<T>& I_s, const T& s, const T& t, int steps, int D);

// dS/dt - (hbar Delta_{Qbar e} S + 1/2 (S,S)_{Qbar e} + chibar S + hbar rbar) with
// chibar = -(S^0, .)_{Qbar e} and rbar = -2 Delta_{Qbar e} S^0 - 1/2 grtr(Qbar Q); dI/dt supplied by the caller.
template <class T>
HbarSeries<T> polchinski_split_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& dIdt, const T& t, int D);

template <class T> struct PartnerTerm {
  HbarSeries<T> series;
  T residual;       // max coefficient of the partner-equation residual
  bool consistent;  // the linear system was solvable
};

// hbar Delta_e X - Q X + (I,X)_e, linear in X
template <class T>
HbarSeries<T> partner_operator(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& X, const T& t, int D);
// hbar Delta_{Qbar e} I - 1/2 H I + 1/2 (I,I)_{Qbar e}
template <class T> HbarSeries<T> partner_rhs(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D);
template <class T>
HbarSeries<T> partner_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& Istar, const T& t, int D);
// hbar Delta_e S* + (S,S*)_e - hbar Delta_{Qbar e} S - 1/2 (S,S)_{Qbar e} with S* = S^0*_t + I*.
template <class T>
HbarSeries<T> full_partner_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& Istar, const T& t,
                                    int D);

// Least-squares I* over degree -1 monomials in the window; the hbar^0 coefficient starts at x-order min_order.
template <class T>
PartnerTerm<T> partner_solve(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D, int min_order = 3);

// Extends a cubic hbar^0 term I0 with QI0 = 1/2 (I0,I0)_e to hbar order K by solving, order by order,
// -Q I_g + (I0, I_g)_e = -(residual of the lower orders). `residual` is the final interaction ME residual.
template <class T>
PartnerTerm<T> complete_interaction(const FreeModel<T>& m, const Poly<T>& I0, const T& t, int D, int K);

// chi. = 1/2 <x,H ad x> - (I*, .)_e and r. = Delta_e I*
template <class T> struct FullGenerator {
  Matrix<T> linear;
  HbarSeries<T> hamiltonian;  // -I*
  Endomorphism<T> deformer;
  HbarSeries<T> r_dot;
};

template <class T> FullGenerator<T> full_generator(const FreeModel<T>& m, const HbarSeries<T>& Istar, const T& t);
template <class T> HbarSeries<T> apply_generator(const GradedBasis<T>& b, const FullGenerator<T>& G, const HbarSeries<T>& u, int D);
// The hbar^g component as a plain generator: the linear part and deformer dependence sit at g = 0.
template <class T> Generator<T> generator_component(const FreeModel<T>& m, const HbarSeries<T>& Istar, const T& t, int g);

// dS/dt - chi. S - hbar r. with dS/dt = dS^0/dt + dI/dt from the RGE.
template <class T>
HbarSeries<T> transport_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& Istar, const T& t, int D);

}  // namespace bvflow
