#include "bvflow/perturbation.hpp"

#include <map>
#include <stdexcept>

namespace bvflow {

namespace {

template <class T> HbarSeries<T> per_order(const HbarSeries<T>& u, const std::function<Poly<T>(const Poly<T>&)>& f) {
  HbarSeries<T> r(u.grading(), u.order());
  for (int g = 0; g <= u.order(); ++g)
    if (!u[g].is_zero()) r[g] = f(u[g]);
  return r;
}

template <class T> HbarSeries<T> free_series(const Poly<T>& p, int order) {
  return HbarSeries<T>::from_poly(p, order);
}

}  // namespace

template <class T> HbarSeries<T> window(const HbarSeries<T>& u, int D, bool* dropped) {
  HbarSeries<T> r(u.grading(), u.order());
  for (int g = 0; g <= u.order(); ++g) {
    const int cap = D - 2 * g;
    if (cap < 0) {
      if (!u[g].is_zero() && dropped) *dropped = true;
      continue;
    }
    r[g] = u[g].truncated(cap, dropped);
  }
  return r;
}

template <class T> Poly<T> q_op(const FreeModel<T>& m, const Poly<T>& u) { return ad_form(m.basis, m.s.Q, u); }
template <class T> Poly<T> h_op(const FreeModel<T>& m, const Poly<T>& u) { return ad_form(m.basis, m.s.H, u); }
template <class T> HbarSeries<T> q_op(const FreeModel<T>& m, const HbarSeries<T>& u) {
  return per_order<T>(u, [&](const Poly<T>& p) { return q_op(m, p); });
}
template <class T> HbarSeries<T> h_op(const FreeModel<T>& m, const HbarSeries<T>& u) {
  return per_order<T>(u, [&](const Poly<T>& p) { return h_op(m, p); });
}

template <class T> void check_series(const HbarSeries<T>& u, int degree, int min_order, const char* what) {
  for (int g = 0; g <= u.order(); ++g)
    for (int d : u[g].degrees())
      if (d != degree)
        throw std::invalid_argument(std::string(what) + ": hbar^" + std::to_string(g) + " coefficient has degree " +
                                    std::to_string(d) + ", expected " + std::to_string(degree));
  for (const auto& [mono, c] : u[0].terms())
    if (mono.total() < min_order)
      throw std::invalid_argument(std::string(what) + ": hbar^0 coefficient must be at least of order " +
                                  std::to_string(min_order) + " in x");
}

template <class T> HbarSeries<T> interaction_me_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D) {
  const auto& b = m.basis;
  Endomorphism<T> e = free_deformer(m, t);
  HbarSeries<T> r = laplacian(b, I, e).shifted() - q_op(m, I) + bracket(b, I, I, e).scaled(Scalar<T>::frac(1, 2));
  return window(r, D);
}

template <class T> HbarSeries<T> full_me_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D) {
  HbarSeries<T> S = free_series(free_action(m, t), I.order()) + I;
  return window(qme_residual(m.basis, S, free_laplacian(m, t), true), D);
}

template <class T> HbarSeries<T> rge_rhs(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D) {
  const auto& b = m.basis;
  Endomorphism<T> Qe = m.s.Qbar * free_deformer(m, t);
  return window(laplacian(b, I, Qe).shifted() + bracket(b, I, I, Qe).scaled(Scalar<T>::frac(1, 2)), D);
}

template <class T>
Flagged<HbarSeries<T>> rge_evolve(const FreeModel<T>& m, const HbarSeries<T>& I_s, const T& s, const T& t, int steps, int D) {
  if (steps < 2) throw std::invalid_argument("rge_evolve: at least 2 steps required");
  check_series(I_s, 0, 0, "rge_evolve");
  bool dropped = false;
  HbarSeries<T> I = window(I_s, D, &dropped);
  const T h = (t - s) / Scalar<T>::from_int(steps);
  const T half = Scalar<T>::frac(1, 2), sixth = Scalar<T>::frac(1, 6);
  auto f = [&](const T& tau, const HbarSeries<T>& x) {
    Endomorphism<T> Qe = m.s.Qbar * free_deformer(m, tau);
    HbarSeries<T> r = laplacian(m.basis, x, Qe).shifted() + bracket(m.basis, x, x, Qe).scaled(half);
    return window(r, D, &dropped);
  };
  for (int i = 0; i < steps; ++i) {
    T tau = s + Scalar<T>::from_int(i) * h;
    auto k1 = f(tau, I);
    auto k2 = f(tau + half * h, I + k1.scaled(half * h));
    auto k3 = f(tau + half * h, I + k2.scaled(half * h));
    auto k4 = f(tau + h, I + k3.scaled(h));
    I += (k1 + k4).scaled(sixth * h) + (k2 + k3).scaled(T(2) * sixth * h);
  }
  return {I, dropped};
}

template <class T>
HbarSeries<T> polchinski_split_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& dIdt, const T& t,
                                        int D) {
  const auto& b = m.basis;
  const int K = I.order();
  const T half = Scalar<T>::frac(1, 2);
  Endomorphism<T> Qe = m.s.Qbar * free_deformer(m, t);
  Poly<T> S0 = free_action(m, t);
  HbarSeries<T> S = free_series(S0, K) + I;
  HbarSeries<T> dS = free_series(free_action_rate(m, t), K) + dIdt;
  HbarSeries<T> chibar = bracket(b, free_series(S0, K), S, Qe).scaled(T(-1));
  Poly<T> rbar = laplacian(b, S0, Qe).scaled(T(-2)) -
                 Poly<T>::constant(b.grading(), T(half * graded_trace(b, m.s.Qbar * m.s.Q)));
  HbarSeries<T> rhs = laplacian(b, S, Qe).shifted() + bracket(b, S, S, Qe).scaled(half) + chibar +
                      free_series(rbar, K).shifted();
  return window(dS - rhs, D);
}

template <class T>
HbarSeries<T> partner_operator(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& X, const T& t, int D) {
  const auto& b = m.basis;
  Endomorphism<T> e = free_deformer(m, t);
  return window(laplacian(b, X, e).shifted() - q_op(m, X) + bracket(b, I, X, e), D);
}

template <class T> HbarSeries<T> partner_rhs(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D) {
  const auto& b = m.basis;
  const T half = Scalar<T>::frac(1, 2);
  Endomorphism<T> Qe = m.s.Qbar * free_deformer(m, t);
  return window(laplacian(b, I, Qe).shifted() - h_op(m, I).scaled(half) + bracket(b, I, I, Qe).scaled(half), D);
}

template <class T>
HbarSeries<T> partner_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& Istar, const T& t, int D) {
  return partner_operator(m, I, Istar, t, D) - partner_rhs(m, I, t, D);
}

template <class T>
HbarSeries<T> full_partner_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& Istar, const T& t,
                                    int D) {
  const auto& b = m.basis;
  const int K = I.order();
  const T half = Scalar<T>::frac(1, 2);
  auto X = extended_family(m, t);
  HbarSeries<T> S = free_series(X.action.body, K) + I;
  HbarSeries<T> Ss = free_series(X.action.soul, K) + Istar;
  HbarSeries<T> r = laplacian(b, Ss, X.body.A).shifted() + bracket(b, S, Ss, X.body.A) - laplacian(b, S, X.soul.A).shifted() -
                    bracket(b, S, S, X.soul.A).scaled(half);
  return window(r, D);
}

namespace {

struct Unknown {
  int order;
  Monomial mono;
};

struct OrderedKey {
  bool operator()(const std::pair<int, Monomial>& a, const std::pair<int, Monomial>& b) const {
    if (a.first != b.first) return a.first < b.first;
    return GradedLex{}(a.second, b.second);
  }
};

// Least-squares X = sum c_u u over the unknowns with op(X) = rhs, op linear.
template <class T>
std::pair<HbarSeries<T>, bool> solve_series(const std::shared_ptr<const Grading>& g, int K, const std::vector<Unknown>& unknowns,
                                            const std::function<HbarSeries<T>(const HbarSeries<T>&)>& op,
                                            const HbarSeries<T>& rhs) {
  std::map<std::pair<int, Monomial>, int, OrderedKey> rows;
  auto touch = [&](const HbarSeries<T>& s) {
    for (int k = 0; k <= K; ++k)
      for (const auto& [mono, c] : s[k].terms()) rows.emplace(std::make_pair(k, mono), static_cast<int>(rows.size()));
  };
  std::vector<HbarSeries<T>> images;
  for (const auto& u : unknowns) {
    HbarSeries<T> X(g, K);
    X[u.order].add_term(u.mono, T(1));
    images.push_back(op(X));
    touch(images.back());
  }
  touch(rhs);
  HbarSeries<T> x(g, K);
  if (rows.empty()) return {x, true};
  if (unknowns.empty()) return {x, rhs.is_zero()};
  Matrix<T> A(static_cast<int>(rows.size()), static_cast<int>(unknowns.size()));
  std::vector<T> y(rows.size(), T(0));
  for (size_t c = 0; c < unknowns.size(); ++c)
    for (int k = 0; k <= K; ++k)
      for (const auto& [mono, v] : images[c][k].terms()) A(rows.at({k, mono}), static_cast<int>(c)) = v;
  for (int k = 0; k <= K; ++k)
    for (const auto& [mono, v] : rhs[k].terms()) y[rows.at({k, mono})] = v;
  auto ls = least_squares(A, y);
  for (size_t c = 0; c < unknowns.size(); ++c)
    if (!Scalar<T>::is_zero(ls.x[c])) x[unknowns[c].order].add_term(unknowns[c].mono, ls.x[c]);
  return {x, ls.consistent};
}

}  // namespace

template <class T>
PartnerTerm<T> partner_solve(const FreeModel<T>& m, const HbarSeries<T>& I, const T& t, int D, int min_order) {
  check_series(I, 0, 0, "partner_solve");
  const auto& g = m.basis.grading();
  const int K = I.order();
  std::vector<Unknown> unknowns;
  for (int k = 0; k <= K; ++k)
    for (const auto& mono : monomials_of_degree(*g, -1, D - 2 * k))
      if (k > 0 || mono.total() >= min_order) unknowns.push_back({k, mono});
  auto [x, consistent] = solve_series<T>(
      g, K, unknowns, [&](const HbarSeries<T>& X) { return partner_operator(m, I, X, t, D); }, partner_rhs(m, I, t, D));
  return {x, partner_residual(m, I, x, t, D).max_abs(), consistent};
}

template <class T>
PartnerTerm<T> complete_interaction(const FreeModel<T>& m, const Poly<T>& I0, const T& t, int D, int K) {
  const auto& g = m.basis.grading();
  HbarSeries<T> I(g, K);
  I[0] = I0;
  check_series(I, 0, 3, "complete_interaction");
  const Endomorphism<T> e = free_deformer(m, t);
  bool consistent = true;
  for (int k = 1; k <= K; ++k) {
    std::vector<Unknown> unknowns;
    for (const auto& mono : monomials_of_degree(*g, 0, D - 2 * k)) unknowns.push_back({k, mono});
    HbarSeries<T> res = interaction_me_residual(m, I, t, D);
    HbarSeries<T> rhs(g, K);
    rhs[k] = -res[k];
    auto op = [&](const HbarSeries<T>& X) {
      HbarSeries<T> r(g, K);
      r[k] = bracket(m.basis, I0, X[k], e) - q_op(m, X[k]);
      return window(r, D);
    };
    auto [x, ok] = solve_series<T>(g, K, unknowns, op, rhs);
    consistent = consistent && ok;
    I[k] = x[k];
  }
  return {I, interaction_me_residual(m, I, t, D).max_abs(), consistent};
}

template <class T> FullGenerator<T> full_generator(const FreeModel<T>& m, const HbarSeries<T>& Istar, const T& t) {
  check_series(Istar, -1, 0, "full_generator");
  Endomorphism<T> e = free_deformer(m, t);
  return {free_generator_matrix(m), Istar.scaled(T(-1)), e, laplacian(m.basis, Istar, e)};
}

template <class T>
HbarSeries<T> apply_generator(const GradedBasis<T>& b, const FullGenerator<T>& G, const HbarSeries<T>& u, int D) {
  std::vector<Poly<T>> lin(b.dim(), Poly<T>(b.grading()));
  for (int k = 0; k < b.dim(); ++k)
    for (int j = 0; j < b.dim(); ++j)
      if (!Scalar<T>::is_zero(G.linear(k, j))) lin[k] += coord(b, j).scaled(G.linear(k, j));
  HbarSeries<T> r = per_order<T>(u, [&](const Poly<T>& p) { return apply_derivation(lin, p); });
  return window(r + bracket(b, G.hamiltonian, u, G.deformer), D);
}

template <class T> Generator<T> generator_component(const FreeModel<T>& m, const HbarSeries<T>& Istar, const T& t, int g) {
  Endomorphism<T> e = free_deformer(m, t);
  Generator<T> G;
  G.linear = g == 0 ? free_generator_matrix(m) : Matrix<T>(m.basis.dim(), m.basis.dim());
  G.hamiltonian = Istar[g].scaled(T(-1));
  G.deformer = e;
  G.r_dot = laplacian(m.basis, Istar[g], e);
  return G;
}

template <class T>
HbarSeries<T> transport_residual(const FreeModel<T>& m, const HbarSeries<T>& I, const HbarSeries<T>& Istar, const T& t, int D) {
  const int K = I.order();
  FullGenerator<T> G = full_generator(m, Istar, t);
  HbarSeries<T> S = free_series(free_action(m, t), K) + I;
  HbarSeries<T> dS = free_series(free_action_rate(m, t), K) + rge_rhs(m, I, t, D);
  return window(dS - apply_generator(m.basis, G, S, D) - G.r_dot.shifted(), D);
}

#define BVFLOW_INST(T)                                                                                                    \
  template HbarSeries<T> window(const HbarSeries<T>&, int, bool*);                                                        \
  template Poly<T> q_op(const FreeModel<T>&, const Poly<T>&);                                                             \
  template Poly<T> h_op(const FreeModel<T>&, const Poly<T>&);                                                             \
  template HbarSeries<T> q_op(const FreeModel<T>&, const HbarSeries<T>&);                                                 \
  template HbarSeries<T> h_op(const FreeModel<T>&, const HbarSeries<T>&);                                                 \
  template void check_series(const HbarSeries<T>&, int, int, const char*);                                                \
  template HbarSeries<T> interaction_me_residual(const FreeModel<T>&, const HbarSeries<T>&, const T&, int);               \
  template HbarSeries<T> full_me_residual(const FreeModel<T>&, const HbarSeries<T>&, const T&, int);                      \
  template HbarSeries<T> rge_rhs(const FreeModel<T>&, const HbarSeries<T>&, const T&, int);                               \
  template Flagged<HbarSeries<T>> rge_evolve(const FreeModel<T>&, const HbarSeries<T>&, const T&, const T&, int, int);    \
  template HbarSeries<T> polchinski_split_residual(const FreeModel<T>&, const HbarSeries<T>&, const HbarSeries<T>&,       \
                                                   const T&, int);                                                        \
  template HbarSeries<T> partner_operator(const FreeModel<T>&, const HbarSeries<T>&, const HbarSeries<T>&, const T&, int); \
  template HbarSeries<T> partner_rhs(const FreeModel<T>&, const HbarSeries<T>&, const T&, int);                           \
  template HbarSeries<T> partner_residual(const FreeModel<T>&, const HbarSeries<T>&, const HbarSeries<T>&, const T&, int); \
  template HbarSeries<T> full_partner_residual(const FreeModel<T>&, const HbarSeries<T>&, const HbarSeries<T>&, const T&, \
                                               int);                                                                      \
  template PartnerTerm<T> partner_solve(const FreeModel<T>&, const HbarSeries<T>&, const T&, int, int);                   \
  template PartnerTerm<T> complete_interaction(const FreeModel<T>&, const Poly<T>&, const T&, int, int);                  \
  template FullGenerator<T> full_generator(const FreeModel<T>&, const HbarSeries<T>&, const T&);                          \
  template HbarSeries<T> apply_generator(const GradedBasis<T>&, const FullGenerator<T>&, const HbarSeries<T>&, int);      \
  template Generator<T> generator_component(const FreeModel<T>&, const HbarSeries<T>&, const T&, int);                    \
  template HbarSeries<T> transport_residual(const FreeModel<T>&, const HbarSeries<T>&, const HbarSeries<T>&, const T&, int);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
