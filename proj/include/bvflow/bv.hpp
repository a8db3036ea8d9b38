#pragma once

#include "bvflow/flow_map.hpp"

#include <array>
#include <functional>

namespace bvflow {

// Sign factors (-1)^{a eps^i + b p + c eps^i p} inserted into
// <x,Bx> = x_i B^i_j x^j and <x,A ad x> u = x_i A^i_j (x^j,u)_E, plus the
// overall normalization of (.,.)_E. The pinned convention has every bit 0 and bracket = +1.
struct SignConvention {
  std::array<int, 3> quad{};
  std::array<int, 3> ad{};
  int bracket = 1;
  static SignConvention pinned() { return {}; }
  bool operator==(const SignConvention& o) const { return quad == o.quad && ad == o.ad && bracket == o.bracket; }
};

// x_i = -omega_ij x^j
template <class T> Poly<T> x_low(const GradedBasis<T>& b, int i);
template <class T> Poly<T> coord(const GradedBasis<T>& b, int i);

// sum_{a,c} (u d<_a) M_ac (d_c v)
template <class T> Poly<T> bracket_matrix(const Poly<T>& u, const Poly<T>& v, const Matrix<T>& M);
// Canonical bracket, (x^i, x^j)_E = omega^{ij}.
template <class T>
Poly<T> bracket_E(const GradedBasis<T>& b, const Poly<T>& u, const Poly<T>& v, const SignConvention& s = SignConvention::pinned());

// Throws unless A~ = -A (exactly, or to 1e-9 relative in float mode).
template <class T> void require_antisymmetric(const GradedBasis<T>& b, const Endomorphism<T>& A, const char* what);

// (u,v)_A = (u,x_i)_E A^i_j (x^j,v)_E
template <class T>
Poly<T> bracket(const GradedBasis<T>& b, const Poly<T>& u, const Poly<T>& v, const Endomorphism<T>& A,
                const SignConvention& s = SignConvention::pinned());
// Delta_A u = 1/2 (-1)^{1+(|A|+1)eps^i} A^i_j (x^j,(x_i,u)_E)_E
template <class T>
Poly<T> laplacian(const GradedBasis<T>& b, const Poly<T>& u, const Endomorphism<T>& A,
                  const SignConvention& s = SignConvention::pinned());
template <class T>
Poly<T> quad_form(const GradedBasis<T>& b, const Endomorphism<T>& B, const SignConvention& s = SignConvention::pinned());
// <x, A ad x> u, a first-order derivation of degree |A|
template <class T>
Poly<T> ad_form(const GradedBasis<T>& b, const Endomorphism<T>& A, const Poly<T>& u,
                const SignConvention& s = SignConvention::pinned());
// [u,v]_{A,B} in coordinates; u, v split into homogeneous parts.
template <class T>
Poly<T> mixed_bracket(const GradedBasis<T>& b, const Poly<T>& u, const Poly<T>& v, const Endomorphism<T>& A,
                      const Endomorphism<T>& B);

// Series versions: (S,S) mixes hbar orders, Delta acts order by order.
template <class T>
HbarSeries<T> bracket(const GradedBasis<T>& b, const HbarSeries<T>& u, const HbarSeries<T>& v, const Endomorphism<T>& A);
template <class T> HbarSeries<T> laplacian(const GradedBasis<T>& b, const HbarSeries<T>& u, const Endomorphism<T>& A);

// A deformer with A~ = -A, checked at construction.
template <class T> struct DeformedLaplacian {
  Endomorphism<T> A;
  DeformedLaplacian(const GradedBasis<T>& b, Endomorphism<T> a) : A(std::move(a)) {
    require_antisymmetric(b, A, "deformed Laplacian");
  }
};

// Delta S + 1/2 (S,S), or hbar Delta S + 1/2 (S,S) when hbar_weighted.
template <class T>
HbarSeries<T> qme_residual(const GradedBasis<T>& b, const HbarSeries<T>& S, const DeformedLaplacian<T>& L, bool hbar_weighted);

template <class T> struct CanonicalMapWitness {
  FlowMap<T> map;  // carries r_alpha as log_jacobian
  Endomorphism<T> source, target;
};

template <class T> struct CanonicalReport {
  T canonical;        // max over probes of |Delta_Y a f - a Delta_X f + (r, a f)_Y|
  T jacobian_me;      // |Delta_Y r + 1/2 (r,r)_Y|
  T bracket_pres;     // max over probe pairs of |a (f,g)_X - (a f, a g)_Y|
  bool truncated = false;
};

// Bracket preservation uses the probe pairs of polynomial degree <= bracket_degree (negative: all).
template <class T>
CanonicalReport<T> canonical_residual(const GradedBasis<T>& b, const CanonicalMapWitness<T>& w, const std::vector<Poly<T>>& probes,
                                      int bracket_degree = -1);

// Every monomial of total degree <= d as a probe.
template <class T> std::vector<Poly<T>> monomial_probes(const GradedBasis<T>& b, int d);

// Sign-pinning search over all 128 conventions; returns those for which the three
// quadratic-form identities hold exactly on random inputs over the given bases.
struct PinningResult {
  std::vector<SignConvention> survivors;
  int candidates = 0;
};
PinningResult sign_pinning_search(const std::vector<GradedBasis<mpq_class>>& bases, unsigned long seed, int trials);

}  // namespace bvflow
