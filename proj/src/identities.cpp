#include "bvflow/identities.hpp"

#include <functional>

namespace bvflow {

SeededRandom::SeededRandom(unsigned long seed) : gen_(seed) {}

long SeededRandom::range(long lo, long hi) {
  const unsigned long span = static_cast<unsigned long>(hi - lo) + 1;
  return lo + static_cast<long>(gen_() % span);
}

template <class T> T SeededRandom::small_fraction() {
  long n = range(-4, 4), d = range(1, 3);
  if constexpr (Scalar<T>::exact) return Scalar<T>::frac(n, d);
  else return static_cast<double>(n) / static_cast<double>(d);
}

template <class T> Endomorphism<T> SeededRandom::endomorphism(const GradedBasis<T>& b, int p) {
  const int n = b.dim();
  Endomorphism<T> A = Endomorphism<T>::zero(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (b.eps(j) == b.eps(i) + p) A.m(i, j) = Scalar<T>::from_int(range(-3, 3));
  return A;
}

template <class T> Poly<T> SeededRandom::homogeneous(const GradedBasis<T>& b, int degree, int max_total, int max_terms) {
  if (pool_owner_ != b.grading().get()) {
    pools_.clear();
    pool_owner_ = b.grading().get();
  }
  auto key = std::make_pair(degree, max_total);
  auto it = pools_.find(key);
  if (it == pools_.end()) it = pools_.emplace(key, monomials_of_degree(*b.grading(), degree, max_total)).first;
  Poly<T> p(b.grading());
  if (it->second.empty()) return p;
  const int terms = static_cast<int>(range(1, max_terms));
  for (int k = 0; k < terms; ++k)
    p.add_term(it->second[range(0, static_cast<long>(it->second.size()) - 1)], small_fraction<T>());
  return p;
}

namespace {

template <class T> T worst(const T& a, const T& b) { return a < b ? b : a; }

std::vector<int> populated(const Grading& g, int max_total) {
  std::set<int> s;
  for (const auto& m : monomials_up_to(g, max_total)) {
    int d = 0;
    for (int i = 0; i < g.dim(); ++i) d += m.e[i] * g.eps[i];
    s.insert(d);
  }
  return {s.begin(), s.end()};
}

// Endomorphism degrees that admit nonzero entries.
template <class T> std::vector<int> endo_degrees(const GradedBasis<T>& b, bool even) {
  std::set<int> s;
  for (int i = 0; i < b.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j) {
      int p = b.eps(j) - b.eps(i);
      if (odd(p) != even) s.insert(p);
    }
  return {s.begin(), s.end()};
}

}  // namespace

template <class T>
std::vector<CheckRecord> identity_suite(const GradedBasis<T>& b, const IdentityOptions& opt, double tolerance) {
  SeededRandom r(opt.seed);
  const auto degs = populated(*b.grading(), opt.max_total);
  const auto even_p = endo_degrees(b, true), odd_p = endo_degrees(b, false);
  std::vector<int> all_p = even_p;
  all_p.insert(all_p.end(), odd_p.begin(), odd_p.end());
  const T half = Scalar<T>::frac(1, 2);

  auto pick = [&](const std::vector<int>& v) { return v[r.range(0, static_cast<long>(v.size()) - 1)]; };
  auto anti = [&](int p) {
    auto R = r.endomorphism(b, p);
    return half * (R - transpose(b, R));
  };
  auto sym = [&](int p) {
    auto R = r.endomorphism(b, p);
    return half * (R + transpose(b, R));
  };
  struct Arg {
    Poly<T> p;
    int d;
  };
  auto poly = [&] {
    int d = pick(degs);
    return Arg{r.homogeneous(b, d, opt.max_total, opt.max_terms), d};
  };
  auto L = [&](const Poly<T>& u, const Endomorphism<T>& A) { return laplacian(b, u, A); };
  auto Br = [&](const Poly<T>& u, const Poly<T>& v, const Endomorphism<T>& A) { return bracket(b, u, v, A); };
  auto sc = [](long k, const Poly<T>& p) { return sgn_pow(k) > 0 ? p : -p; };

  std::vector<std::pair<std::string, std::function<T()>>> ids;

  ids.emplace_back("seven_term", [&] {
    const int p = pick(all_p);
    auto A = anti(p);
    auto [u, du] = poly();
    auto [v, dv] = poly();
    auto [w, dw] = poly();
    const long a1 = p + 1;
    Poly<T> e = L(u * v * w, A) + L(u, A) * v * w + sc(a1 * du, u * L(v, A) * w) + sc(a1 * (du + dv), u * v * L(w, A)) -
                L(u * v, A) * w - sc((du + p + 1) * dv, v * L(u * w, A)) - sc(a1 * du, u * L(v * w, A));
    return e.max_abs();
  });
  ids.emplace_back("laplacian_square", [&] {
    auto A = anti(pick(even_p));
    auto [u, du] = poly();
    return L(L(u, A), A).max_abs();
  });
  ids.emplace_back("laplacian_commute", [&] {
    const int p = pick(all_p), q = pick(all_p);
    auto A = anti(p), B = anti(q);
    auto [u, du] = poly();
    return (L(L(u, B), A) - sc((p + 1) * (q + 1), L(L(u, A), B))).max_abs();
  });
  ids.emplace_back("antisymmetry", [&] {
    const int p = pick(all_p);
    auto A = anti(p);
    auto [u, du] = poly();
    auto [v, dv] = poly();
    return (Br(u, v, A) + sc(p * (du + dv) + (du + 1) * (dv + 1), Br(v, u, A))).max_abs();
  });
  ids.emplace_back("jacobi", [&] {
    auto A = anti(pick(even_p));
    auto [u, du] = poly();
    auto [v, dv] = poly();
    auto [w, dw] = poly();
    Poly<T> e = sc((dw + 1) * (du + 1), Br(u, Br(v, w, A), A)) + sc((du + 1) * (dv + 1), Br(v, Br(w, u, A), A)) +
                sc((dv + 1) * (dw + 1), Br(w, Br(u, v, A), A));
    return e.max_abs();
  });
  ids.emplace_back("leibniz", [&] {
    const int p = pick(all_p);
    auto A = anti(p);
    auto [u, du] = poly();
    auto [v, dv] = poly();
    auto [w, dw] = poly();
    return (Br(u, v * w, A) - Br(u, v, A) * w - sc((du + p + 1) * dv, v * Br(u, w, A))).max_abs();
  });
  ids.emplace_back("bracket_from_laplacian", [&] {
    const int p = pick(all_p);
    auto A = anti(p);
    auto [u, du] = poly();
    auto [v, dv] = poly();
    const long s = (p + 1) * du;
    return (Br(u, v, A) - sc(s, L(u * v, A) - L(u, A) * v - sc(s, u * L(v, A)))).max_abs();
  });
  ids.emplace_back("quad_trace", [&] {
    auto A = anti(pick(all_p));
    auto B = sym(pick(all_p));
    Poly<T> e = L(quad_form(b, B), A) - Poly<T>::constant(b.grading(), graded_trace(b, A * B));
    return e.max_abs();
  });
  ids.emplace_back("quad_bracket", [&] {
    auto A = anti(pick(all_p));
    auto B = sym(pick(all_p)), C = sym(pick(all_p));
    return (Br(quad_form(b, B), quad_form(b, C), A) - quad_form(b, B * A * C).scaled(T(4))).max_abs();
  });
  ids.emplace_back("ad_quad", [&] {
    const int p = pick(all_p), q = pick(all_p);
    auto A = anti(p);
    auto B = sym(q);
    return (ad_form(b, A, quad_form(b, B)) - quad_form(b, A * B + T(sgn_pow(p * q)) * (B * A))).max_abs();
  });
  ids.emplace_back("ad_commutator", [&] {
    auto A = anti(pick(even_p));
    const int q = pick(all_p);
    auto B = anti(q);
    auto [u, du] = poly();
    const long a1 = A.degree + 1;
    Poly<T> lhs = ad_form(b, B, L(u, A)) - sc(q * a1, L(ad_form(b, B, u), A));
    return (lhs - sc(1 + q, L(u, A * B + B * A))).max_abs();
  });
  ids.emplace_back("ad_derivation", [&] {
    auto A = anti(pick(even_p));
    const int q = pick(all_p);
    auto B = anti(q);
    auto [u, du] = poly();
    auto [v, dv] = poly();
    const long s = q * (du + 1);
    Poly<T> e = ad_form(b, B, Br(u, v, A)) + sc(s, Br(u, v, A * B + B * A)) - Br(ad_form(b, B, u), v, A) -
                sc(s, Br(u, ad_form(b, B, v), A));
    return e.max_abs();
  });
  ids.emplace_back("mixed_bracket", [&] {
    const int p = pick(all_p), q = pick(all_p);
    auto A = anti(p), B = anti(q);
    auto [u, du] = poly();
    auto [v, dv] = poly();
    Poly<T> e = L(Br(u, v, B), A) - Br(L(u, A), v, B) - sc((p + 1) * (q + du + 1), Br(u, L(v, A), B)) -
                mixed_bracket(b, u, v, A, B);
    return e.max_abs();
  });
  ids.emplace_back("ad_canonical", [&] {
    auto A = anti(pick(even_p));
    Poly<T> x = r.homogeneous(b, -1, opt.max_total, opt.max_terms);
    auto [f, df] = poly();
    Poly<T> e = L(Br(x, f, A), A) - Br(x, L(f, A), A) + Br(-L(x, A), f, A);
    return e.max_abs();
  });

  const double tol = tolerance > 0 ? tolerance : (Scalar<T>::exact ? 0.0 : 1e-9);
  std::vector<CheckRecord> out;
  for (auto& [name, f] : ids) {
    T w(0);
    for (int k = 0; k < opt.samples; ++k) w = worst(w, f());
    out.push_back(make_check("identities." + name, w, tol));
  }
  return out;
}

#define BVFLOW_INST(T)                                                                                         \
  template T SeededRandom::small_fraction<T>();                                                                \
  template Endomorphism<T> SeededRandom::endomorphism<T>(const GradedBasis<T>&, int);                          \
  template Poly<T> SeededRandom::homogeneous<T>(const GradedBasis<T>&, int, int, int);                         \
  template std::vector<CheckRecord> identity_suite(const GradedBasis<T>&, const IdentityOptions&, double);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow
