#include "bvflow/flow_map.hpp"

#include <stdexcept>

namespace bvflow {

template <class T> FlowMap<T> FlowMap<T>::identity(std::shared_ptr<const Grading> g, int max_degree) {
  FlowMap f;
  for (int i = 0; i < g->dim(); ++i) f.images.push_back(Poly<T>::coordinate(g, i));
  f.max_degree = max_degree;
  f.log_jacobian = Poly<T>(g);
  return f;
}

template <class T>
FlowMap<T> FlowMap<T>::linear(std::shared_ptr<const Grading> g, const Matrix<T>& M, int max_degree) {
  FlowMap f;
  const int n = g->dim();
  if (M.rows != n || M.cols != n) throw std::invalid_argument("linear flow map: dimension mismatch");
  for (int k = 0; k < n; ++k) {
    Poly<T> p(g);
    for (int m = 0; m < n; ++m) {
      if (Scalar<T>::is_zero(M(k, m))) continue;
      if (g->eps[k] != g->eps[m]) throw std::invalid_argument("linear flow map: matrix mixes degrees");
      Monomial mono;
      mono.e[m] = 1;
      p.add_term(mono, M(k, m));
    }
    f.images.push_back(p);
  }
  f.max_degree = max_degree;
  f.log_jacobian = Poly<T>(g);
  return f;
}

template <class T> Matrix<T> FlowMap<T>::linear_part() const {
  const int n = static_cast<int>(images.size());
  Matrix<T> M(n, n);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) {
      Monomial mono;
      mono.e[m] = 1;
      M(k, m) = images[k].coeff(mono);
    }
  return M;
}

template <class T> void check_flow_map(const FlowMap<T>& phi) {
  const auto& g = phi.grading();
  if (!g || static_cast<int>(phi.images.size()) != g->dim()) throw std::invalid_argument("flow map: image count mismatch");
  for (int i = 0; i < g->dim(); ++i)
    for (int d : phi.images[i].degrees())
      if (d != g->eps[i]) throw std::invalid_argument("flow map: image of x^" + std::to_string(i) + " has wrong degree");
  for (int d : phi.log_jacobian.degrees())
    if (d != 0) throw std::invalid_argument("flow map: logarithmic Jacobian not of degree 0");
}

template <class T> Flagged<Poly<T>> apply_flow(const FlowMap<T>& phi, const Poly<T>& u) {
  const auto& g = phi.grading();
  if (u.grading() && !(*u.grading() == *g)) throw std::invalid_argument("apply_flow: basis mismatch");
  const int n = g->dim();
  const int D = phi.max_degree;
  bool dropped = false;
  // powers[i][k] = image_i^k, truncated.
  std::vector<std::vector<Poly<T>>> powers(n);
  Flagged<Poly<T>> out{Poly<T>(g), false};
  for (const auto& [m, c] : u.terms()) {
    Poly<T> term = Poly<T>::constant(g, c);
    for (int i = 0; i < n && !term.is_zero(); ++i) {
      if (m.e[i] == 0) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(Poly<T>::constant(g, T(1)));
      while (static_cast<int>(pw.size()) <= m.e[i]) pw.push_back(multiply(pw.back(), phi.images[i], D, &dropped));
      term = multiply(term, pw[m.e[i]], D, &dropped);
    }
    out.value += term;
  }
  out.truncated = dropped;
  return out;
}

template <class T> Flagged<HbarSeries<T>> apply_flow(const FlowMap<T>& phi, const HbarSeries<T>& u) {
  Flagged<HbarSeries<T>> out{HbarSeries<T>(phi.grading(), u.order()), false};
  for (int k = 0; k <= u.order(); ++k) {
    auto r = apply_flow(phi, u[k]);
    out.value[k] = r.value;
    out.truncated = out.truncated || r.truncated;
  }
  return out;
}

template <class T> FlowMap<T> compose_flows(const FlowMap<T>& phi, const FlowMap<T>& psi) {
  if (!(*phi.grading() == *psi.grading())) throw std::invalid_argument("compose_flows: basis mismatch");
  FlowMap<T> r;
  r.max_degree = std::min(phi.max_degree, psi.max_degree);
  r.truncated = phi.truncated || psi.truncated;
  for (const auto& img : psi.images) {
    auto a = apply_flow(phi, img);
    r.images.push_back(a.value);
    r.truncated = r.truncated || a.truncated;
  }
  auto j = apply_flow(phi, psi.log_jacobian);
  r.log_jacobian = phi.log_jacobian + j.value;
  r.truncated = r.truncated || j.truncated;
  return r;
}

template <class T> FlowMap<T> invert_linear(const FlowMap<T>& phi) {
  for (const auto& img : phi.images)
    for (const auto& kv : img.terms())
      if (kv.first.total() != 1) throw std::invalid_argument("invert_linear: map is not linear");
  auto inv = inverse(phi.linear_part());
  if (!inv) throw std::invalid_argument("invert_linear: singular substitution");
  FlowMap<T> r = FlowMap<T>::linear(phi.grading(), *inv, phi.max_degree);
  r.log_jacobian = -apply_flow(r, phi.log_jacobian).value;
  return r;
}

#define BVFLOW_INST(T)                                                              \
  template struct FlowMap<T>;                                                       \
  template void check_flow_map(const FlowMap<T>&);                                  \
  template Flagged<Poly<T>> apply_flow(const FlowMap<T>&, const Poly<T>&);          \
  template Flagged<HbarSeries<T>> apply_flow(const FlowMap<T>&, const HbarSeries<T>&); \
  template FlowMap<T> compose_flows(const FlowMap<T>&, const FlowMap<T>&);          \
  template FlowMap<T> invert_linear(const FlowMap<T>&);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
