#include "bvflow/flows.hpp"

#include <stdexcept>

namespace bvflow {

namespace {

template <class T> T max_of(const T& a, const T& b) { return a < b ? b : a; }

template <class T> void upd(T& worst, const Poly<T>& p) { worst = max_of(worst, p.max_abs()); }

// Drop rounding noise from a finite-difference deformer derivative (the exact one is antisymmetric).
template <class T> Endomorphism<T> antisymmetrized(const GradedBasis<T>& b, const Endomorphism<T>& A) {
  if constexpr (Scalar<T>::exact) return A;
  else return 0.5 * (A - transpose(b, A));
}

}  // namespace

template <class T> std::vector<T> central_weights(int m) {
  if (m < 1) throw std::invalid_argument("stencil must have at least one point per side");
  const int n = 2 * m + 1;
  Matrix<T> V(n, n);
  std::vector<T> rhs(n, T(0));
  for (int j = 0; j < n; ++j) {
    for (int k = -m; k <= m; ++k) {
      T p(1);
      for (int e = 0; e < j; ++e) p *= Scalar<T>::from_int(k);
      V(j, k + m) = p;
    }
  }
  rhs[1] = T(1);
  return least_squares(V, rhs).x;
}

template <class T>
Poly<T> derive(const std::function<Poly<T>(const T&)>& f, const T& t, const T& h, int stencil) {
  auto w = central_weights<T>(stencil);
  Poly<T> out;
  for (int k = -stencil; k <= stencil; ++k) {
    if (Scalar<T>::is_zero(w[k + stencil])) continue;
    T tk = t + Scalar<T>::from_int(k) * h;
    out += f(tk).scaled(T(w[k + stencil] / h));
  }
  return out;
}

template <class T>
Matrix<T> derive(const std::function<Matrix<T>(const T&)>& f, const T& t, const T& h, int stencil) {
  auto w = central_weights<T>(stencil);
  Matrix<T> out;
  for (int k = -stencil; k <= stencil; ++k) {
    if (Scalar<T>::is_zero(w[k + stencil])) continue;
    T tk = t + Scalar<T>::from_int(k) * h;
    Matrix<T> term = T(w[k + stencil] / h) * f(tk);
    out = out.rows == 0 ? term : out + term;
  }
  return out;
}

template <class T> Poly<T> apply_derivation(const std::vector<Poly<T>>& images, const Poly<T>& f) {
  Poly<T> out(f.grading());
  for (size_t k = 0; k < images.size(); ++k) {
    if (images[k].is_zero()) continue;
    Poly<T> d = partial(static_cast<int>(k), f);
    if (!d.is_zero()) out += images[k] * d;
  }
  return out;
}

template <class T>
std::vector<CheckRecord> flow_suite(const GradedBasis<T>& b, const FlowFamily<T>& F, const std::vector<Poly<T>>& probes,
                                    const SuiteTolerance& tol, const std::string& prefix) {
  if (F.grid.size() < 3) throw std::invalid_argument("flow_suite: grid needs at least 3 points");
  const auto& grid = F.grid;
  const size_t G = grid.size();
  const int n = b.dim();
  auto g = b.grading();

  std::vector<std::vector<FlowMap<T>>> chi(G, std::vector<FlowMap<T>>(G));
  for (size_t i = 0; i < G; ++i)
    for (size_t j = 0; j < G; ++j) chi[i][j] = F.map_at(grid[i], grid[j]);

  T id_res(0), norm_res(0), grp(0), coc(0), can(0), jme(0), brp(0), evo(0), jev(0);
  bool trunc = false;

  for (size_t i = 0; i < G; ++i) {
    for (int k = 0; k < n; ++k) upd(id_res, chi[i][i].images[k] - Poly<T>::coordinate(g, k));
    upd(norm_res, chi[i][i].log_jacobian);
  }

  for (size_t u = 0; u < G; ++u)
    for (size_t t = 0; t < G; ++t)
      for (size_t s = 0; s < G; ++s) {
        FlowMap<T> c = compose_flows(chi[u][t], chi[t][s]);
        trunc = trunc || c.truncated;
        for (int k = 0; k < n; ++k) upd(grp, c.images[k] - chi[u][s].images[k]);
        // r_{u,s} - r_{u,t} - chi_{u,t} r_{t,s}, modulo constants
        upd(coc, (chi[u][s].log_jacobian - c.log_jacobian).without_constant());
      }

  for (size_t t = 0; t < G; ++t)
    for (size_t s = 0; s < G; ++s) {
      CanonicalMapWitness<T> w{chi[t][s], F.laplacian_at(grid[s]), F.laplacian_at(grid[t])};
      auto rep = canonical_residual(b, w, probes, 2);
      can = max_of(can, rep.canonical);
      jme = max_of(jme, rep.jacobian_me);
      brp = max_of(brp, rep.bracket_pres);
      trunc = trunc || rep.truncated;
    }

  for (size_t i = 0; i < G; ++i) {
    const T t = grid[i];
    std::vector<Poly<T>> chiD(n);
    for (int k = 0; k < n; ++k)
      chiD[k] = derive<T>([&](const T& u) { return F.map_at(u, t).images[k]; }, t, F.fd_step, F.stencil);
    Poly<T> rD = derive<T>([&](const T& u) { return F.map_at(u, t).log_jacobian; }, t, F.fd_step, F.stencil);
    Matrix<T> dA = derive<T>([&](const T& u) { return F.laplacian_at(u).m; }, t, F.fd_step, F.stencil);
    Endomorphism<T> At = F.laplacian_at(t);
    Endomorphism<T> AD = antisymmetrized(b, Endomorphism<T>{At.degree, dA});
    for (const auto& f : probes) {
      Poly<T> e = laplacian(b, f, AD) - apply_derivation(chiD, laplacian(b, f, At)) +
                  laplacian(b, apply_derivation(chiD, f), At) + bracket(b, rD, f, At);
      upd(evo, e);
    }
    upd(jev, laplacian(b, rD, At));
  }

  std::vector<CheckRecord> out;
  out.push_back(make_check(prefix + "identity", id_res, tol.exact, false));
  out.push_back(make_check(prefix + "jacobian_normalization", norm_res, tol.exact, false));
  out.push_back(make_check(prefix + "groupoid", grp, tol.exact, trunc));
  out.push_back(make_check(prefix + "cocycle", coc, tol.exact, trunc));
  out.push_back(make_check(prefix + "canonical", can, tol.exact, trunc));
  out.push_back(make_check(prefix + "jacobian_me", jme, tol.exact, trunc));
  out.push_back(make_check(prefix + "bracket_preservation", brp, tol.exact, trunc));
  out.push_back(make_check(prefix + "evolution", evo, tol.fd, trunc));
  out.push_back(make_check(prefix + "jacobian_evolution", jev, tol.fd, trunc));
  return out;
}

template <class T>
Flagged<Poly<T>> flow_built_laplacian(const GradedBasis<T>& b, const FlowFamily<T>& F, const T& o, const T& t, const Poly<T>& f) {
  FlowMap<T> to_o = F.map_at(o, t), from_o = F.map_at(t, o);
  Endomorphism<T> Ao = F.laplacian_at(o);
  auto g = apply_flow(to_o, f);
  auto h = apply_flow(from_o, laplacian(b, g.value, Ao) + bracket(b, to_o.log_jacobian, g.value, Ao));
  return {h.value, g.truncated || h.truncated};
}

template <class T>
FlowFamily<T> conjugate_flow(const FlowFamily<T>& F, const std::function<Conjugator<T>(const T&)>& gamma) {
  FlowFamily<T> out = F;
  auto inner = F.map_at;
  out.map_at = [inner, gamma](const T& t, const T& s) {
    Conjugator<T> gt = gamma(t), gs = gamma(s);
    return compose_flows(gt.map, compose_flows(inner(t, s), gs.inverse));
  };
  return out;
}

template <class T>
Conjugator<T> linear_conjugator(std::shared_ptr<const Grading> g, const Matrix<T>& M, const Poly<T>& r, int max_degree) {
  Conjugator<T> c;
  c.map = FlowMap<T>::linear(g, M, max_degree);
  c.map.log_jacobian = r;
  c.inverse = invert_linear(c.map);
  return c;
}

template <class T> std::vector<Poly<T>> generator_images(const GradedBasis<T>& b, const Generator<T>& g) {
  const int n = b.dim();
  std::vector<Poly<T>> img(n, Poly<T>(b.grading()));
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m)
      if (g.linear.rows && !Scalar<T>::is_zero(g.linear(k, m))) img[k] += coord(b, m).scaled(g.linear(k, m));
    if (!g.hamiltonian.is_zero()) img[k] += bracket(b, g.hamiltonian, coord(b, k), g.deformer);
  }
  for (int k = 0; k < n; ++k)
    for (int d : img[k].degrees())
      if (d != b.eps(k)) throw std::invalid_argument("generator: image of x^" + std::to_string(k) + " violates degree 0");
  return img;
}

template <class T>
FlowMap<T> reconstruct_flow(const GradedBasis<T>& b, const std::function<Generator<T>(const T&)>& gen, const T& s, const T& t,
                            int steps, int max_degree) {
  if (steps < 1) throw std::invalid_argument("reconstruct_flow: steps must be positive");
  const int n = b.dim();
  const T h = (t - s) / Scalar<T>::from_int(steps);
  FlowMap<T> phi = FlowMap<T>::identity(b.grading(), max_degree);
  bool dropped = false;

  struct State {
    std::vector<Poly<T>> P;
    Poly<T> r;
  };
  auto rhs = [&](const T& tau, const State& x) {
    Generator<T> g = gen(tau);
    auto img = generator_images(b, g);
    State d;
    for (int k = 0; k < n; ++k) d.P.push_back(apply_derivation(img, x.P[k]).truncated(max_degree, &dropped));
    d.r = (apply_derivation(img, x.r) + g.r_dot).truncated(max_degree, &dropped);
    return d;
  };
  auto axpy = [&](const State& x, const T& c, const State& d) {
    State y = x;
    for (int k = 0; k < n; ++k) y.P[k] += d.P[k].scaled(c);
    y.r += d.r.scaled(c);
    return y;
  };

  State x{phi.images, Poly<T>(b.grading())};
  const T half = Scalar<T>::frac(1, 2), sixth = Scalar<T>::frac(1, 6);
  for (int i = 0; i < steps; ++i) {
    T tau = s + Scalar<T>::from_int(i) * h;
    State k1 = rhs(tau, x);
    State k2 = rhs(tau + half * h, axpy(x, half * h, k1));
    State k3 = rhs(tau + half * h, axpy(x, half * h, k2));
    State k4 = rhs(tau + h, axpy(x, h, k3));
    T c1 = sixth * h, c2 = T(2) * sixth * h;
    x = axpy(axpy(axpy(axpy(x, c1, k1), c2, k2), c2, k3), c1, k4);
  }
  phi.images = x.P;
  phi.log_jacobian = x.r;
  phi.truncated = dropped;
  return phi;
}

template <class T>
GeneratorHypotheses<T> check_generator(const GradedBasis<T>& b, const std::function<Generator<T>(const T&)>& gen,
                                       const std::function<Endomorphism<T>(const T&)>& deformer, const T& t, const T& h,
                                       int stencil, const std::vector<Poly<T>>& probes) {
  Generator<T> g = gen(t);
  auto img = generator_images(b, g);
  Endomorphism<T> A = deformer(t);
  Endomorphism<T> dA = antisymmetrized(b, Endomorphism<T>{A.degree, derive<T>([&](const T& u) { return deformer(u).m; }, t, h, stencil)});
  GeneratorHypotheses<T> res{T(0), T(0)};
  for (size_t i = 0; i < probes.size(); ++i) {
    const auto& f = probes[i];
    for (size_t j = i; j < probes.size(); ++j) {
      const auto& k = probes[j];
      Poly<T> e = apply_derivation(img, bracket(b, f, k, A)) - bracket(b, apply_derivation(img, f), k, A) -
                  bracket(b, f, apply_derivation(img, k), A) - bracket(b, f, k, dA);
      upd(res.bracket_law, e);
    }
    Poly<T> e = laplacian(b, f, dA) - apply_derivation(img, laplacian(b, f, A)) + laplacian(b, apply_derivation(img, f), A) +
                bracket(b, g.r_dot, f, A);
    upd(res.evolution, e);
  }
  return res;
}

template <class T> std::map<int, int> laplacian_cohomology_dims(const GradedBasis<T>& b, const Endomorphism<T>& A, int D_max) {
  if (odd(A.degree)) throw std::invalid_argument("cohomology: odd-degree deformer gives no complex");
  const auto& g = *b.grading();
  auto all = monomials_up_to(g, D_max);
  std::map<int, std::vector<Monomial>> by_degree;
  for (const auto& m : all) {
    int d = 0;
    for (int i = 0; i < g.dim(); ++i) d += m.e[i] * g.eps[i];
    by_degree[d].push_back(m);
  }
  const int shift = A.degree + 1;
  // Nilpotency recheck.
  for (const auto& [d, mons] : by_degree)
    for (const auto& m : mons) {
      Poly<T> p(b.grading());
      p.add_term(m, T(1));
      if (!laplacian(b, laplacian(b, p, A), A).is_zero())
        throw std::invalid_argument("cohomology: Laplacian is not nilpotent");
    }
  auto rank_from = [&](int d) {
    auto it = by_degree.find(d);
    if (it == by_degree.end()) return 0;
    auto tgt = by_degree.find(d + shift);
    if (tgt == by_degree.end()) return 0;
    std::map<Monomial, int, GradedLex> row;
    for (size_t r = 0; r < tgt->second.size(); ++r) row[tgt->second[r]] = static_cast<int>(r);
    Matrix<T> M(static_cast<int>(tgt->second.size()), static_cast<int>(it->second.size()));
    for (size_t c = 0; c < it->second.size(); ++c) {
      Poly<T> p(b.grading());
      p.add_term(it->second[c], T(1));
      const auto img = laplacian(b, p, A);
      for (const auto& [m, v] : img.terms()) M(row.at(m), static_cast<int>(c)) = v;
    }
    return rank(M);
  };
  std::map<int, int> dims;
  for (const auto& [d, mons] : by_degree)
    dims[d] = static_cast<int>(mons.size()) - rank_from(d) - rank_from(d - shift);
  return dims;
}

#define BVFLOW_INST(T)                                                                                                   \
  template std::vector<T> central_weights(int);                                                                          \
  template Poly<T> derive(const std::function<Poly<T>(const T&)>&, const T&, const T&, int);                             \
  template Matrix<T> derive(const std::function<Matrix<T>(const T&)>&, const T&, const T&, int);                         \
  template Poly<T> apply_derivation(const std::vector<Poly<T>>&, const Poly<T>&);                                        \
  template std::vector<CheckRecord> flow_suite(const GradedBasis<T>&, const FlowFamily<T>&, const std::vector<Poly<T>>&, \
                                               const SuiteTolerance&, const std::string&);                               \
  template Flagged<Poly<T>> flow_built_laplacian(const GradedBasis<T>&, const FlowFamily<T>&, const T&, const T&,        \
                                                 const Poly<T>&);                                                        \
  template FlowFamily<T> conjugate_flow(const FlowFamily<T>&, const std::function<Conjugator<T>(const T&)>&);            \
  template Conjugator<T> linear_conjugator(std::shared_ptr<const Grading>, const Matrix<T>&, const Poly<T>&, int);       \
  template std::vector<Poly<T>> generator_images(const GradedBasis<T>&, const Generator<T>&);                            \
  template FlowMap<T> reconstruct_flow(const GradedBasis<T>&, const std::function<Generator<T>(const T&)>&, const T&,    \
                                       const T&, int, int);                                                              \
  template GeneratorHypotheses<T> check_generator(const GradedBasis<T>&, const std::function<Generator<T>(const T&)>&,   \
                                                  const std::function<Endomorphism<T>(const T&)>&, const T&, const T&,   \
                                                  int, const std::vector<Poly<T>>&);                                     \
  template std::map<int, int> laplacian_cohomology_dims(const GradedBasis<T>&, const Endomorphism<T>&, int);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
