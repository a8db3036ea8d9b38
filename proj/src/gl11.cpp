#include "bvflow/gl11.hpp"

#include <random>
#include <stdexcept>

namespace bvflow {

namespace {

template <class T> T mat_defect(const Matrix<T>& a, const Matrix<T>& b) { return (a - b).max_abs(); }

template <class T> T worse(const T& a, const T& b) { return a < b ? b : a; }

template <class T> T convert(const mpq_class& q) {
  if constexpr (Scalar<T>::exact) return q;
  else return q.get_d();
}

}  // namespace

template <class T> Endomorphism<T> gl11_F(const GradedBasis<T>& b) {
  Endomorphism<T> F = Endomorphism<T>::zero(b.dim(), 0);
  for (int i = 0; i < b.dim(); ++i) F.m(i, i) = Scalar<T>::from_int(-b.eps(i) - 1);
  return F;
}

template <class T>
Gl11Structure<T> make_gl11(const GradedBasis<T>& b, Endomorphism<T> Q, Endomorphism<T> Qbar, Endomorphism<T> H) {
  return {std::move(Q), std::move(Qbar), std::move(H), gl11_F(b)};
}

template <class T> Endomorphism<T> qbar_q_bracket(const Gl11Structure<T>& s) { return s.Qbar * s.Q - s.Q * s.Qbar; }

const std::vector<std::string>& gl11_axiom_names() {
  static const std::vector<std::string> names = {
      "comm_QQ",     "comm_QbarQbar", "comm_QQbar_H", "comm_QH",    "comm_QbarH",  "comm_FQ",      "comm_FQbar", "comm_FH",
      "transpose_Q", "transpose_Qbar", "transpose_H", "transpose_F", "trace_Q",    "trace_Qbar", "trace_H"};
  return names;
}

template <class T>
std::vector<CheckRecord> validate_gl11(const GradedBasis<T>& b, const Gl11Structure<T>& s, double tolerance,
                                       const std::set<std::string>& skip) {
  const int n = b.dim();
  auto shape = [&](const Endomorphism<T>& A, int p, const char* what) {
    if (A.m.rows != n || A.m.cols != n)
      throw std::invalid_argument(std::string("gl(1|1): ") + what + " has dimension " + std::to_string(A.m.rows) + "x" +
                                  std::to_string(A.m.cols) + ", basis has " + std::to_string(n));
    if (A.degree != p)
      throw std::invalid_argument(std::string("gl(1|1): ") + what + " must have degree " + std::to_string(p));
    check_endomorphism(b, A);
  };
  shape(s.Q, 1, "Q");
  shape(s.Qbar, -1, "Qbar");
  shape(s.H, 0, "H");
  shape(s.F, 0, "F");

  const double tol = tolerance > 0 ? tolerance : (Scalar<T>::exact ? 0.0 : 1e-12);
  const Endomorphism<T> one = Endomorphism<T>::identity(n);
  std::vector<std::pair<std::string, std::function<T()>>> axioms = {
      {"comm_QQ", [&] { return commutator(s.Q, s.Q).m.max_abs(); }},
      {"comm_QbarQbar", [&] { return commutator(s.Qbar, s.Qbar).m.max_abs(); }},
      {"comm_QQbar_H", [&] { return mat_defect(commutator(s.Q, s.Qbar).m, s.H.m); }},
      {"comm_QH", [&] { return commutator(s.Q, s.H).m.max_abs(); }},
      {"comm_QbarH", [&] { return commutator(s.Qbar, s.H).m.max_abs(); }},
      {"comm_FQ", [&] { return mat_defect(commutator(s.F, s.Q).m, s.Q.m); }},
      {"comm_FQbar", [&] { return mat_defect(commutator(s.F, s.Qbar).m, (T(-1) * s.Qbar).m); }},
      {"comm_FH", [&] { return commutator(s.F, s.H).m.max_abs(); }},
      {"transpose_Q", [&] { return mat_defect(transpose(b, s.Q).m, s.Q.m); }},
      {"transpose_Qbar", [&] { return mat_defect(transpose(b, s.Qbar).m, (T(-1) * s.Qbar).m); }},
      {"transpose_H", [&] { return mat_defect(transpose(b, s.H).m, (T(-1) * s.H).m); }},
      {"transpose_F", [&] { return mat_defect(transpose(b, s.F).m, (s.F + one).m); }},
      {"trace_Q", [&] { return Scalar<T>::abs(graded_trace(b, s.Q)); }},
      {"trace_Qbar", [&] { return Scalar<T>::abs(graded_trace(b, s.Qbar)); }},
      {"trace_H", [&] { return Scalar<T>::abs(graded_trace(b, s.H)); }},
  };
  std::vector<CheckRecord> out;
  for (const auto& [name, f] : axioms)
    if (!skip.count(name)) out.push_back(make_check("gl11." + name, f(), tol));
  return out;
}

template <class T>
FreeModel<T>::FreeModel(GradedBasis<T> b, Gl11Structure<T> st) : basis(std::move(b)), s(std::move(st)) {
  if (s.F.m.rows != basis.dim() || !(s.F.m == gl11_F(basis).m))
    throw std::invalid_argument("free model: F must be the grading endomorphism diag(-eps - 1) of the basis");
}

template <class T>
Matrix<T> coordinate_matrix(const GradedBasis<T>& b, const std::function<Poly<T>(const Poly<T>&)>& D) {
  const int n = b.dim();
  Matrix<T> M(n, n);
  for (int k = 0; k < n; ++k) {
    Poly<T> img = D(coord(b, k));
    for (const auto& [mono, c] : img.terms()) {
      if (mono.total() != 1) throw std::invalid_argument("coordinate_matrix: derivation is not linear");
      for (int m = 0; m < n; ++m)
        if (mono.e[m]) M(k, m) = c;
    }
  }
  return M;
}

template <class T> Endomorphism<T> free_deformer(const FreeModel<T>& m, const T& t) { return matrix_exp(m.s.H, T(-t)); }

template <class T> DeformedLaplacian<T> free_laplacian(const FreeModel<T>& m, const T& t) {
  return DeformedLaplacian<T>(m.basis, free_deformer(m, t));
}

template <class T> Matrix<T> free_generator_matrix(const FreeModel<T>& m) {
  const Endomorphism<T> halfH = Scalar<T>::frac(1, 2) * m.s.H;
  return coordinate_matrix<T>(m.basis, [&](const Poly<T>& u) { return ad_form(m.basis, halfH, u); });
}

template <class T> FlowMap<T> free_flow(const FreeModel<T>& m, const T& t, const T& s, int max_degree) {
  Endomorphism<T> L{0, free_generator_matrix(m)};
  return FlowMap<T>::linear(m.basis.grading(), matrix_exp(L, T(t - s)).m, max_degree);
}

template <class T> Poly<T> free_action(const FreeModel<T>& m, const T& t) {
  return quad_form(m.basis, m.s.Q * matrix_exp(m.s.H, t)).scaled(Scalar<T>::frac(-1, 2));
}

template <class T> Poly<T> free_action_rate(const FreeModel<T>& m, const T& t) {
  return quad_form(m.basis, m.s.Q * m.s.H * matrix_exp(m.s.H, t)).scaled(Scalar<T>::frac(-1, 2));
}

template <class T>
FlowFamily<T> free_family(const FreeModel<T>& m, std::vector<T> grid, const T& fd_step, int max_degree) {
  FlowFamily<T> F;
  F.map_at = [m, max_degree](const T& t, const T& s) { return free_flow(m, t, s, max_degree); };
  F.laplacian_at = [m](const T& t) { return free_deformer(m, t); };
  F.grid = std::move(grid);
  F.fd_step = fd_step;
  // A nilpotent H makes the family polynomial in t; a wide stencil then differentiates exactly.
  F.stencil = Scalar<T>::exact ? m.basis.dim() : 1;
  return F;
}

template <class T> ExtendedFamily<T> extended_family(const FreeModel<T>& m, const T& t) {
  Endomorphism<T> e = free_deformer(m, t);
  Endomorphism<T> eH = matrix_exp(m.s.H, t);
  ExtendedElement<T> S{free_action(m, t), quad_form(m.basis, qbar_q_bracket(m.s) * eH).scaled(Scalar<T>::frac(-1, 4))};
  return {DeformedLaplacian<T>(m.basis, e), DeformedLaplacian<T>(m.basis, m.s.Qbar * e), S};
}

template <class T> Poly<T> soul_derivation(const FreeModel<T>& m, const Poly<T>& u) {
  return ad_form(m.basis, m.s.Qbar, u).scaled(Scalar<T>::frac(1, 2));
}

template <class T> ExtendedMe<T> extended_me_residual(const FreeModel<T>& m, const T& t) {
  const auto& b = m.basis;
  auto X = extended_family(m, t);
  const Poly<T>&S = X.action.body, &Ss = X.action.soul;
  const T half = Scalar<T>::frac(1, 2);
  Poly<T> body = laplacian(b, S, X.body.A) + bracket(b, S, S, X.body.A).scaled(half);
  Poly<T> soul = laplacian(b, S, X.soul.A) - laplacian(b, Ss, X.body.A) + bracket(b, S, S, X.soul.A).scaled(half) -
                 bracket(b, S, Ss, X.body.A);
  return {body.max_abs(), soul.max_abs()};
}

template <class T>
std::vector<CheckRecord> extended_suite(const FreeModel<T>& m, const std::vector<T>& grid, int probe_degree, double tol) {
  const auto& b = m.basis;
  auto probes = monomial_probes(b, probe_degree);
  T me_body(0), me_soul(0), soul_action(0), soul_lap(0), soul_anti(0), soul_can(0), transport(0);
  auto chi_star = [&](const Poly<T>& u) { return soul_derivation(m, u); };
  for (const T& t : grid) {
    auto X = extended_family(m, t);
    auto me = extended_me_residual(m, t);
    me_body = worse(me_body, me.body);
    me_soul = worse(me_soul, me.soul);
    soul_action = worse(soul_action, (chi_star(X.action.body) - X.action.soul).max_abs());
    soul_anti = worse(soul_anti, antisymmetry_defect(b, X.soul.A));
    for (const auto& f : probes) {
      Poly<T> e = chi_star(laplacian(b, f, X.body.A)) + laplacian(b, chi_star(f), X.body.A) - laplacian(b, f, X.soul.A);
      soul_lap = worse(soul_lap, e.max_abs());
    }
  }
  for (const T& t : grid)
    for (const T& s : grid) {
      auto Xt = extended_family(m, t), Xs = extended_family(m, s);
      FlowMap<T> chi = free_flow(m, t, s);
      auto ap = [&](const Poly<T>& u) { return apply_flow(chi, u).value; };
      for (const auto& f : probes) {
        // theta component
        Poly<T> g = ap(f);
        Poly<T> th = laplacian(b, g, Xt.soul.A) - laplacian(b, chi_star(g), Xt.body.A) - chi_star(ap(laplacian(b, f, Xs.body.A)));
        // zeta component
        Poly<T> ze = laplacian(b, ap(chi_star(f)), Xt.body.A) + ap(chi_star(laplacian(b, f, Xs.body.A))) -
                     ap(laplacian(b, f, Xs.soul.A));
        soul_can = worse(soul_can, worse(th.max_abs(), ze.max_abs()));
      }
      // theta component of chi_{t theta, s zeta} S_{s zeta} = S_{t theta}, and its zeta component
      Poly<T> th = chi_star(ap(Xs.action.body)) - Xt.action.soul;
      Poly<T> ze = ap(Xs.action.soul - chi_star(Xs.action.body));
      transport = worse(transport, worse(th.max_abs(), ze.max_abs()));
    }
  std::vector<CheckRecord> out;
  out.push_back(make_check("extended.me_body", me_body, tol));
  out.push_back(make_check("extended.me_soul", me_soul, tol));
  out.push_back(make_check("extended.soul_action", soul_action, tol));
  out.push_back(make_check("extended.soul_antisymmetry", soul_anti, tol));
  out.push_back(make_check("extended.soul_laplacian", soul_lap, tol));
  out.push_back(make_check("extended.soul_canonical", soul_can, tol));
  out.push_back(make_check("extended.transport", transport, tol));
  return out;
}

template <class T> T polchinski_residual(const FreeModel<T>& m, const T& t, const T& h) {
  const auto& b = m.basis;
  Poly<T> rate = Scalar<T>::is_zero(h) ? free_action_rate(m, t)
                                        : derive<T>([&](const T& u) { return free_action(m, u); }, t, h, 1);
  Poly<T> S = free_action(m, t);
  Endomorphism<T> Qe = m.s.Qbar * free_deformer(m, t);
  const T half = Scalar<T>::frac(1, 2);
  Poly<T> r = rate + laplacian(b, S, Qe) + bracket(b, S, S, Qe).scaled(half) +
              Poly<T>::constant(b.grading(), T(half * graded_trace(b, m.s.Qbar * m.s.Q)));
  return r.max_abs();
}

template <class T>
Matrix<T> hamiltonian_matrix(const GradedBasis<T>& b, const Endomorphism<T>& B, const Endomorphism<T>& A) {
  Poly<T> h = quad_form(b, B);
  return coordinate_matrix<T>(b, [&](const Poly<T>& u) { return bracket(b, h, u, A); });
}

namespace {

struct Layout {
  std::vector<int> eps;
  std::vector<std::pair<int, int>> pairs;
};

Layout sampler_layout(int dim) {
  switch (dim) {
    case 2: return {{0, -1}, {{0, 1}}};
    case 4: return {{0, 0, -1, -1}, {{0, 2}, {1, 3}}};
    case 6: return {{1, 0, 0, -1, -1, -2}, {{0, 5}, {1, 3}, {2, 4}}};
    default:
      throw std::invalid_argument("sample_gl11: dimension " + std::to_string(dim) +
                                  " unsupported (degree -1 pairing needs dimension 2, 4 or 6)");
  }
}

// Basis of degree-p endomorphisms with A~ = sign * A.
std::vector<Matrix<mpq_class>> transpose_eigenspace(const GradedBasis<mpq_class>& b, int p, int sign) {
  const int n = b.dim();
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (b.eps(j) == b.eps(i) + p) slots.emplace_back(i, j);
  Matrix<mpq_class> L(n * n, static_cast<int>(slots.size()));
  for (size_t c = 0; c < slots.size(); ++c) {
    Endomorphism<mpq_class> E = Endomorphism<mpq_class>::zero(n, p);
    E.m(slots[c].first, slots[c].second) = 1;
    Matrix<mpq_class> d = transpose(b, E).m - mpq_class(sign) * E.m;
    for (int k = 0; k < n * n; ++k) L(k, static_cast<int>(c)) = d.a[k];
  }
  std::vector<Matrix<mpq_class>> out;
  for (const auto& v : null_space(L)) {
    Matrix<mpq_class> M(n, n);
    for (size_t c = 0; c < slots.size(); ++c) M(slots[c].first, slots[c].second) = v[c];
    out.push_back(M);
  }
  return out;
}

}  // namespace

template <class T> FreeModel<T> sample_gl11(int dim, unsigned long seed, int budget) {
  Layout lay = sampler_layout(dim);
  Matrix<mpq_class> om(dim, dim);
  for (auto [i, j] : lay.pairs) om(i, j) = 1, om(j, i) = -1;
  GradedBasis<mpq_class> b(lay.eps, om);
  auto Qspace = transpose_eigenspace(b, 1, 1);
  auto Qbspace = transpose_eigenspace(b, -1, -1);
  std::mt19937_64 gen(seed);
  auto pick = [&](const std::vector<Matrix<mpq_class>>& space, int p) {
    Endomorphism<mpq_class> A = Endomorphism<mpq_class>::zero(dim, p);
    for (const auto& v : space) {
      long c = static_cast<long>(gen() % 5) - 2;
      if (c != 0) A.m = A.m + mpq_class(c) * v;
    }
    return A;
  };
  for (int attempt = 0; attempt < budget; ++attempt) {
    auto Q = pick(Qspace, 1);
    auto Qb = pick(Qbspace, -1);
    if (Q.m.is_zero()) continue;
    if (!(Q * Q).m.is_zero() || !(Qb * Qb).m.is_zero()) continue;
    auto H = commutator(Q, Qb);
    if (dim >= 4 && H.m.is_zero()) continue;
    if (Scalar<T>::exact && !is_nilpotent(H)) continue;
    Matrix<T> omT(dim, dim);
    auto cv = [&](const Endomorphism<mpq_class>& A) {
      Matrix<T> M(dim, dim);
      for (int k = 0; k < dim * dim; ++k) M.a[k] = convert<T>(A.m.a[k]);
      return Endomorphism<T>{A.degree, M};
    };
    for (int k = 0; k < dim * dim; ++k) omT.a[k] = convert<T>(om.a[k]);
    GradedBasis<T> bt(lay.eps, omT);
    FreeModel<T> m(bt, make_gl11(bt, cv(Q), cv(Qb), cv(H)));
    if (!all_pass(validate_gl11(m.basis, m.s))) continue;
    return m;
  }
  throw std::runtime_error("sample_gl11: search budget exhausted for dimension " + std::to_string(dim));
}

#define BVFLOW_INST(T)                                                                                                  \
  template Endomorphism<T> gl11_F(const GradedBasis<T>&);                                                               \
  template Gl11Structure<T> make_gl11(const GradedBasis<T>&, Endomorphism<T>, Endomorphism<T>, Endomorphism<T>);        \
  template Endomorphism<T> qbar_q_bracket(const Gl11Structure<T>&);                                                     \
  template std::vector<CheckRecord> validate_gl11(const GradedBasis<T>&, const Gl11Structure<T>&, double,               \
                                                  const std::set<std::string>&);                                        \
  template struct FreeModel<T>;                                                                                         \
  template Matrix<T> coordinate_matrix(const GradedBasis<T>&, const std::function<Poly<T>(const Poly<T>&)>&);           \
  template Endomorphism<T> free_deformer(const FreeModel<T>&, const T&);                                                \
  template DeformedLaplacian<T> free_laplacian(const FreeModel<T>&, const T&);                                          \
  template Matrix<T> free_generator_matrix(const FreeModel<T>&);                                                        \
  template FlowMap<T> free_flow(const FreeModel<T>&, const T&, const T&, int);                                          \
  template Poly<T> free_action(const FreeModel<T>&, const T&);                                                          \
  template Poly<T> free_action_rate(const FreeModel<T>&, const T&);                                                     \
  template FlowFamily<T> free_family(const FreeModel<T>&, std::vector<T>, const T&, int);                               \
  template ExtendedFamily<T> extended_family(const FreeModel<T>&, const T&);                                            \
  template Poly<T> soul_derivation(const FreeModel<T>&, const Poly<T>&);                                                \
  template ExtendedMe<T> extended_me_residual(const FreeModel<T>&, const T&);                                           \
  template std::vector<CheckRecord> extended_suite(const FreeModel<T>&, const std::vector<T>&, int, double);            \
  template T polchinski_residual(const FreeModel<T>&, const T&, const T&);                                              \
  template Matrix<T> hamiltonian_matrix(const GradedBasis<T>&, const Endomorphism<T>&, const Endomorphism<T>&);         \
  template FreeModel<T> sample_gl11(int, unsigned long, int);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
