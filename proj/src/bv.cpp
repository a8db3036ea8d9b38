#include "bvflow/bv.hpp"

#include <random>
#include <stdexcept>

namespace bvflow {

namespace {

// On the support of a degree-p map eps^j = eps^i + p, so these three parities exhaust the sign functions.
int kappa(const std::array<int, 3>& bits, long ei, long p) { return sgn_pow(bits[0] * ei + bits[1] * p + bits[2] * ei * p); }

template <class T> int homogeneous_degree(const Poly<T>& u, const char* what) {
  auto d = u.degrees();
  if (d.size() > 1) throw std::invalid_argument(std::string(what) + ": inhomogeneous argument");
  return d.empty() ? 0 : *d.begin();
}

}  // namespace

template <class T> Poly<T> coord(const GradedBasis<T>& b, int i) { return Poly<T>::coordinate(b.grading(), i); }

template <class T> Poly<T> x_low(const GradedBasis<T>& b, int i) {
  Poly<T> r(b.grading());
  for (int j = 0; j < b.dim(); ++j)
    if (!Scalar<T>::is_zero(b.omega()(i, j))) r += coord(b, j).scaled(-b.omega()(i, j));
  return r;
}

template <class T> Poly<T> bracket_matrix(const Poly<T>& u, const Poly<T>& v, const Matrix<T>& M) {
  Poly<T> out(u.grading() ? u.grading() : v.grading());
  if (u.is_zero() || v.is_zero()) return out;
  const int n = M.rows;
  std::vector<Poly<T>> dv(n);
  std::vector<bool> have(n, false);
  for (int a = 0; a < n; ++a) {
    Poly<T> ua = partial_right(a, u);
    if (ua.is_zero()) continue;
    Poly<T> right(out.grading());
    for (int c = 0; c < n; ++c) {
      if (Scalar<T>::is_zero(M(a, c))) continue;
      if (!have[c]) dv[c] = partial(c, v), have[c] = true;
      right += dv[c].scaled(M(a, c));
    }
    out += ua * right;
  }
  return out;
}

template <class T>
Poly<T> bracket_E(const GradedBasis<T>& b, const Poly<T>& u, const Poly<T>& v, const SignConvention& s) {
  Poly<T> r = bracket_matrix(u, v, b.omega_inv());
  return s.bracket == 1 ? r : -r;
}

template <class T> void require_antisymmetric(const GradedBasis<T>& b, const Endomorphism<T>& A, const char* what) {
  check_endomorphism(b, A);
  T d = antisymmetry_defect(b, A);
  if constexpr (Scalar<T>::exact) {
    if (!Scalar<T>::is_zero(d)) throw std::invalid_argument(std::string(what) + ": deformer is not antisymmetric (A~ != -A)");
  } else {
    if (d > 1e-9 * std::max(1.0, A.m.max_abs()))
      throw std::invalid_argument(std::string(what) + ": deformer is not antisymmetric (A~ != -A)");
  }
}

template <class T>
Poly<T> bracket(const GradedBasis<T>& b, const Poly<T>& u, const Poly<T>& v, const Endomorphism<T>& A, const SignConvention& s) {
  require_antisymmetric(b, A, "bracket");
  const int n = b.dim();
  Poly<T> out(b.grading());
  if (u.is_zero() || v.is_zero()) return out;
  std::vector<Poly<T>> right(n);
  for (int j = 0; j < n; ++j) right[j] = bracket_E(b, coord(b, j), v, s);
  for (int i = 0; i < n; ++i) {
    Poly<T> left = bracket_E(b, u, x_low(b, i), s);
    if (left.is_zero()) continue;
    Poly<T> r(b.grading());
    for (int j = 0; j < n; ++j)
      if (!Scalar<T>::is_zero(A.m(i, j))) r += right[j].scaled(A.m(i, j));
    out += left * r;
  }
  return out;
}

template <class T>
Poly<T> laplacian(const GradedBasis<T>& b, const Poly<T>& u, const Endomorphism<T>& A, const SignConvention& s) {
  const int n = b.dim();
  Poly<T> out(b.grading());
  if (u.is_zero()) return out;
  const T half = Scalar<T>::frac(1, 2);
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int j = 0; j < n; ++j) any = any || !Scalar<T>::is_zero(A.m(i, j));
    if (!any) continue;
    Poly<T> inner = bracket_E(b, x_low(b, i), u, s);
    if (inner.is_zero()) continue;
    T sign = odd(1L + (A.degree + 1L) * b.eps(i)) ? -half : half;
    for (int j = 0; j < n; ++j)
      if (!Scalar<T>::is_zero(A.m(i, j))) out += bracket_E(b, coord(b, j), inner, s).scaled(sign * A.m(i, j));
  }
  return out;
}

template <class T> Poly<T> quad_form(const GradedBasis<T>& b, const Endomorphism<T>& B, const SignConvention& s) {
  Poly<T> out(b.grading());
  for (int i = 0; i < b.dim(); ++i) {
    Poly<T> xi = x_low(b, i);
    for (int j = 0; j < b.dim(); ++j) {
      if (Scalar<T>::is_zero(B.m(i, j))) continue;
      T c = B.m(i, j);
      if (kappa(s.quad, b.eps(i), B.degree) < 0) c = -c;
      out += (xi * coord(b, j)).scaled(c);
    }
  }
  return out;
}

template <class T>
Poly<T> ad_form(const GradedBasis<T>& b, const Endomorphism<T>& A, const Poly<T>& u, const SignConvention& s) {
  Poly<T> out(b.grading());
  if (u.is_zero()) return out;
  std::vector<Poly<T>> xu(b.dim());
  for (int j = 0; j < b.dim(); ++j) xu[j] = bracket_E(b, coord(b, j), u, s);
  for (int i = 0; i < b.dim(); ++i) {
    Poly<T> r(b.grading());
    for (int j = 0; j < b.dim(); ++j) {
      if (Scalar<T>::is_zero(A.m(i, j))) continue;
      T c = A.m(i, j);
      if (kappa(s.ad, b.eps(i), A.degree) < 0) c = -c;
      r += xu[j].scaled(c);
    }
    if (!r.is_zero()) out += x_low(b, i) * r;
  }
  return out;
}

template <class T>
Poly<T> mixed_bracket(const GradedBasis<T>& b, const Poly<T>& u, const Poly<T>& v, const Endomorphism<T>& A,
                      const Endomorphism<T>& B) {
  require_antisymmetric(b, A, "mixed_bracket");
  require_antisymmetric(b, B, "mixed_bracket");
  const int n = b.dim();
  Poly<T> out(b.grading());
  std::vector<Poly<T>> xl(n), xc(n);
  for (int k = 0; k < n; ++k) xl[k] = x_low(b, k), xc[k] = coord(b, k);
  for (int du : u.degrees())
    for (int dv : v.degrees()) {
      Poly<T> uh = u.homogeneous_part(du), vh = v.homogeneous_part(dv);
      // U(j,k) = (x^j,(u,x_k)_E)_E, V(l,i) = (x^l,(v,x_i)_E)_E
      std::vector<Poly<T>> U(n * n), V(n * n);
      for (int k = 0; k < n; ++k) {
        Poly<T> uk = bracket_E(b, uh, xl[k]), vk = bracket_E(b, vh, xl[k]);
        for (int j = 0; j < n; ++j) {
          U[j * n + k] = bracket_E(b, xc[j], uk);
          V[j * n + k] = bracket_E(b, xc[j], vk);
        }
      }
      for (int i = 0; i < n; ++i) {
        bool flip = odd((A.degree + B.degree + du + dv + 1L) * b.eps(i));
        for (int k = 0; k < n; ++k) {
          Poly<T> au(b.grading()), bv(b.grading());
          for (int j = 0; j < n; ++j)
            if (!Scalar<T>::is_zero(A.m(i, j))) au += U[j * n + k].scaled(A.m(i, j));
          if (au.is_zero()) continue;
          for (int l = 0; l < n; ++l)
            if (!Scalar<T>::is_zero(B.m(k, l))) bv += V[l * n + i].scaled(B.m(k, l));
          if (bv.is_zero()) continue;
          Poly<T> t = au * bv;
          out += flip ? -t : t;
        }
      }
    }
  return out;
}

template <class T>
HbarSeries<T> bracket(const GradedBasis<T>& b, const HbarSeries<T>& u, const HbarSeries<T>& v, const Endomorphism<T>& A) {
  HbarSeries<T> r(b.grading(), u.order());
  for (int i = 0; i <= u.order(); ++i) {
    if (u[i].is_zero()) continue;
    for (int j = 0; i + j <= u.order(); ++j)
      if (!v[j].is_zero()) r[i + j] += bracket(b, u[i], v[j], A);
  }
  return r;
}

template <class T> HbarSeries<T> laplacian(const GradedBasis<T>& b, const HbarSeries<T>& u, const Endomorphism<T>& A) {
  HbarSeries<T> r(b.grading(), u.order());
  for (int i = 0; i <= u.order(); ++i) r[i] = laplacian(b, u[i], A);
  return r;
}

template <class T>
HbarSeries<T> qme_residual(const GradedBasis<T>& b, const HbarSeries<T>& S, const DeformedLaplacian<T>& L, bool hbar_weighted) {
  for (int k = 0; k <= S.order(); ++k) homogeneous_degree(S[k], "qme_residual");
  HbarSeries<T> d = laplacian(b, S, L.A);
  if (hbar_weighted) d = d.shifted();
  return d + bracket(b, S, S, L.A).scaled(Scalar<T>::frac(1, 2));
}

template <class T>
CanonicalReport<T> canonical_residual(const GradedBasis<T>& b, const CanonicalMapWitness<T>& w, const std::vector<Poly<T>>& probes,
                                      int bracket_degree) {
  CanonicalReport<T> rep{T(0), T(0), T(0), w.map.truncated};
  auto upd = [](T& worst, const Poly<T>& p) {
    T m = p.max_abs();
    if (m > worst) worst = m;
  };
  const Poly<T>& r = w.map.log_jacobian;
  std::vector<Poly<T>> images;
  for (const auto& f : probes) {
    auto af = apply_flow(w.map, f);
    auto alf = apply_flow(w.map, laplacian(b, f, w.source));
    rep.truncated = rep.truncated || af.truncated || alf.truncated;
    upd(rep.canonical, laplacian(b, af.value, w.target) - alf.value + bracket(b, r, af.value, w.target));
    images.push_back(af.value);
  }
  upd(rep.jacobian_me, laplacian(b, r, w.target) + bracket(b, r, r, w.target).scaled(Scalar<T>::frac(1, 2)));
  auto in_pairs = [&](size_t i) { return bracket_degree < 0 || probes[i].poly_degree() <= bracket_degree; };
  for (size_t i = 0; i < probes.size(); ++i)
    for (size_t j = i; j < probes.size(); ++j) {
      if (!in_pairs(i) || !in_pairs(j)) continue;
      auto lhs = apply_flow(w.map, bracket(b, probes[i], probes[j], w.source));
      rep.truncated = rep.truncated || lhs.truncated;
      upd(rep.bracket_pres, lhs.value - bracket(b, images[i], images[j], w.target));
    }
  return rep;
}

template <class T> std::vector<Poly<T>> monomial_probes(const GradedBasis<T>& b, int d) {
  std::vector<Poly<T>> out;
  for (const auto& m : monomials_up_to(*b.grading(), d)) {
    Poly<T> p(b.grading());
    p.add_term(m, T(1));
    out.push_back(p);
  }
  return out;
}

PinningResult sign_pinning_search(const std::vector<GradedBasis<mpq_class>>& bases, unsigned long seed, int trials) {
  using Q = mpq_class;
  PinningResult res;
  std::mt19937_64 gen(seed);
  auto rnd = [&](const GradedBasis<Q>& b, int p) {
    Matrix<Q> m(b.dim(), b.dim());
    for (int i = 0; i < b.dim(); ++i)
      for (int j = 0; j < b.dim(); ++j)
        if (b.eps(j) == b.eps(i) + p) m(i, j) = Q(static_cast<long>(gen() % 7) - 3);
    return Endomorphism<Q>{p, m};
  };
  auto sym = [](const GradedBasis<Q>& b, const Endomorphism<Q>& A) { return Q(1, 2) * (A + transpose(b, A)); };
  auto anti = [](const GradedBasis<Q>& b, const Endomorphism<Q>& A) { return Q(1, 2) * (A - transpose(b, A)); };

  // Fixed random instances shared by all candidates.
  struct Inst {
    const GradedBasis<Q>* b;
    Endomorphism<Q> A, B, C;
  };
  std::vector<Inst> inst;
  for (const auto& b : bases)
    for (int t = 0; t < trials; ++t)
      for (int pa : {0, 1, -1, 2})
        for (int pb : {0, 1, -1}) inst.push_back({&b, anti(b, rnd(b, pa)), sym(b, rnd(b, pb)), sym(b, rnd(b, pb))});

  for (int code = 0; code < 128; ++code) {
    SignConvention s;
    for (int k = 0; k < 3; ++k) s.quad[k] = (code >> k) & 1, s.ad[k] = (code >> (3 + k)) & 1;
    s.bracket = (code >> 6) & 1 ? -1 : 1;
    ++res.candidates;
    bool ok = true;
    for (const auto& in : inst) {
      const auto& b = *in.b;
      Poly<Q> qB = quad_form(b, in.B, s), qC = quad_form(b, in.C, s);
      // Delta_A <x,Bx> = grtr(AB)
      if (!(laplacian(b, qB, in.A, s) == Poly<Q>::constant(b.grading(), graded_trace(b, in.A * in.B)))) { ok = false; break; }
      // (<x,Bx>,<x,Cx>)_A = 4 <x,BACx>
      if (!(bracket(b, qB, qC, in.A, s) == quad_form(b, in.B * in.A * in.C, s).scaled(Q(4)))) { ok = false; break; }
      // <x,A ad x><x,Bx> = <x,(AB + (-1)^{|A||B|} BA)x>
      Endomorphism<Q> ab = in.A * in.B, ba = in.B * in.A;
      Endomorphism<Q> rhs = odd(static_cast<long>(in.A.degree) * in.B.degree) ? ab - ba : ab + ba;
      if (!(ad_form(b, in.A, qB, s) == quad_form(b, rhs, s))) { ok = false; break; }
    }
    if (ok) res.survivors.push_back(s);
  }
  return res;
}

#define BVFLOW_INST(T)                                                                                               \
  template Poly<T> coord(const GradedBasis<T>&, int);                                                                \
  template Poly<T> x_low(const GradedBasis<T>&, int);                                                                \
  template Poly<T> bracket_matrix(const Poly<T>&, const Poly<T>&, const Matrix<T>&);                                 \
  template Poly<T> bracket_E(const GradedBasis<T>&, const Poly<T>&, const Poly<T>&, const SignConvention&);          \
  template void require_antisymmetric(const GradedBasis<T>&, const Endomorphism<T>&, const char*);                   \
  template Poly<T> bracket(const GradedBasis<T>&, const Poly<T>&, const Poly<T>&, const Endomorphism<T>&,            \
                           const SignConvention&);                                                                   \
  template Poly<T> laplacian(const GradedBasis<T>&, const Poly<T>&, const Endomorphism<T>&, const SignConvention&);  \
  template Poly<T> quad_form(const GradedBasis<T>&, const Endomorphism<T>&, const SignConvention&);                  \
  template Poly<T> ad_form(const GradedBasis<T>&, const Endomorphism<T>&, const Poly<T>&, const SignConvention&);    \
  template Poly<T> mixed_bracket(const GradedBasis<T>&, const Poly<T>&, const Poly<T>&, const Endomorphism<T>&,      \
                                 const Endomorphism<T>&);                                                            \
  template HbarSeries<T> bracket(const GradedBasis<T>&, const HbarSeries<T>&, const HbarSeries<T>&,                  \
                                 const Endomorphism<T>&);                                                            \
  template HbarSeries<T> laplacian(const GradedBasis<T>&, const HbarSeries<T>&, const Endomorphism<T>&);             \
  template HbarSeries<T> qme_residual(const GradedBasis<T>&, const HbarSeries<T>&, const DeformedLaplacian<T>&, bool); \
  template CanonicalReport<T> canonical_residual(const GradedBasis<T>&, const CanonicalMapWitness<T>&,               \
                                                 const std::vector<Poly<T>>&, int);                                     \
  template std::vector<Poly<T>> monomial_probes(const GradedBasis<T>&, int);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
