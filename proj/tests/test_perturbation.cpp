#include "doctest.h"
#include "support.hpp"

#include "bvflow/io.hpp"

using namespace bvtest;

namespace {

template <class T = Q> FreeModel<T> load(const std::string& name) {
  return io::fixture_from_json<T>(io::read_json_file(std::string(BVFLOW_SOURCE_DIR) + "/fixtures/" + name));
}

HbarSeries<Q> random_interaction(const GradedBasis<Q>& b, Rng& r, int K, int D) {
  HbarSeries<Q> I(b.grading(), K);
  I[0] = random_poly(b, 0, D, 4, r);
  for (int g = 1; g <= K; ++g) I[g] = random_poly(b, 0, D - 2 * g, 3, r);
  return window(I, D);
}

HbarSeries<Q> random_partner(const GradedBasis<Q>& b, Rng& r, int K, int D) {
  HbarSeries<Q> X(b.grading(), K);
  for (int g = 0; g <= K; ++g) X[g] = random_poly(b, -1, D - 2 * g, 3, r);
  return window(X, D);
}

// 0.3 x1 x2 x3 on the ghost model, completed in hbar.
HbarSeries<double> ghost_interaction(const FreeModel<double>& g) {
  auto C = complete_interaction(g, Poly<double>::from_factors(g.basis.grading(), {1, 2, 3}, 0.3), 0.0, 6, 4);
  REQUIRE(C.consistent);
  return C.series;
}

}  // namespace

TEST_CASE("window keeps n + 2g <= D") {
  auto b = paired_basis<Q>({0, 0});
  Rng r(301);
  HbarSeries<Q> I(b.grading(), 3);
  for (int g = 0; g <= 3; ++g) I[g] = random_poly(b, 0, 6, 5, r);
  bool dropped = false;
  auto W = window(I, 5, &dropped);
  CHECK(dropped);
  for (int g = 0; g <= 3; ++g)
    for (const auto& [mo, c] : W[g].terms()) CHECK(mo.total() + 2 * g <= 5);
  dropped = false;
  window(W, 5, &dropped);
  CHECK(!dropped);
}

TEST_CASE("Q and H operators on the free model") {
  auto m = load("gl11_dim4.json");
  const auto& b = m.basis;
  Rng r(302);
  CHECK(q_op(m, Poly<Q>::constant(b.grading(), Q(1))).is_zero());
  CHECK(h_op(m, Poly<Q>::constant(b.grading(), Q(1))).is_zero());
  for (int trial = 0; trial < 10; ++trial) {
    auto u = random_poly(b, 0, 4, 4, r), v = random_poly(b, static_cast<int>(r.range(-2, 0)), 3, 3, r);
    CHECK(q_op(m, q_op(m, u)).is_zero());
    CHECK(q_op(m, h_op(m, u)) == h_op(m, q_op(m, u)));
    CHECK(h_op(m, u * v) == h_op(m, u) * v + u * h_op(m, v));
    for (const auto& t : {Q(0), Q(1, 3), Q(1)}) CHECK(bracket(b, free_action(m, t), u, free_deformer(m, t)) == -q_op(m, u));
  }
}

TEST_CASE("full and interaction master equations have identical residuals") {
  Rng r(303);
  for (const char* name : {"gl11_dim2.json", "gl11_dim4.json"}) {
    auto m = load(name);
    for (int trial = 0; trial < 5; ++trial) {
      auto I = random_interaction(m.basis, r, 2, 5);
      for (const auto& t : {Q(0), Q(1, 2), Q(1)}) {
        auto full = full_me_residual(m, I, t, 5), inter = interaction_me_residual(m, I, t, 5);
        CHECK((full - inter).is_zero());
      }
    }
  }
  auto g = load<double>("gl11_ghost.json");
  auto I = ghost_interaction(g);
  CHECK((full_me_residual(g, I, 0.5, 6) - interaction_me_residual(g, I, 0.5, 6)).max_abs() <= 1e-12);
}

TEST_CASE("completing a cubic seed in hbar solves the master equation") {
  auto g = load<double>("gl11_ghost.json");
  auto I = ghost_interaction(g);
  CHECK(interaction_me_residual(g, I, 0.0, 6).max_abs() <= 1e-9);
  // The bare seed is not a solution.
  HbarSeries<double> seed(g.basis.grading(), 4);
  seed[0] = I[0];
  CHECK(interaction_me_residual(g, seed, 0.0, 6).max_abs() > 0.1);
  CHECK_THROWS_AS(complete_interaction(g, Poly<double>::from_factors(g.basis.grading(), {0, 0, 3}, 1.0), 0.0, 6, 4),
                  std::invalid_argument);
}

TEST_CASE("RGE evolution preserves the master equation") {
  auto g = load<double>("gl11_ghost.json");
  auto I = ghost_interaction(g);
  for (double t : {0.25, 0.5, 1.0}) {
    auto ev = rge_evolve(g, I, 0.0, t, 200, 6);
    CAPTURE(t);
    CHECK(interaction_me_residual(g, ev.value, t, 6).max_abs() <= 1e-6);
  }
  auto back = rge_evolve(g, rge_evolve(g, I, 0.0, 1.0, 200, 6).value, 1.0, 0.0, 200, 6).value;
  CHECK((back - I).max_abs() <= 1e-8);
  // Zero is a fixed point.
  CHECK(rge_evolve(g, HbarSeries<double>(g.basis.grading(), 4), 0.0, 1.0, 10, 6).value.max_abs() == 0);
  CHECK_THROWS_AS(rge_evolve(g, I, 0.0, 1.0, 1, 6), std::invalid_argument);
}

TEST_CASE("RGE integrator converges at fourth order") {
  auto g = load<double>("gl11_ghost.json");
  auto I = ghost_interaction(g);
  auto ref = rge_evolve(g, I, 0.0, 1.0, 400, 6).value;
  const double e1 = (rge_evolve(g, I, 0.0, 1.0, 10, 6).value - ref).max_abs();
  const double e2 = (rge_evolve(g, I, 0.0, 1.0, 20, 6).value - ref).max_abs();
  CHECK(e1 / e2 == doctest::Approx(16).epsilon(3.0 / 16));
}

TEST_CASE("Polchinski split holds for the RGE right-hand side") {
  auto m = load("gl11_dim4.json");
  Rng r(304);
  for (int trial = 0; trial < 5; ++trial) {
    auto I = random_interaction(m.basis, r, 2, 5);
    for (const auto& t : {Q(0), Q(1, 2)}) CHECK(polchinski_split_residual(m, I, rge_rhs(m, I, t, 5), t, 5).is_zero());
  }
}

TEST_CASE("full partner equation reduces to the interaction partner equation") {
  auto m = load("gl11_dim4.json");
  Rng r(305);
  for (int trial = 0; trial < 5; ++trial) {
    auto I = random_interaction(m.basis, r, 2, 5);
    auto X = random_partner(m.basis, r, 2, 5);
    CHECK((full_partner_residual(m, I, X, Q(1, 3), 5) - partner_residual(m, I, X, Q(1, 3), 5)).is_zero());
  }
}

TEST_CASE("partner_solve: solutions, transport, and unsolvable systems") {
  auto g = load<double>("gl11_ghost.json");
  auto I = ghost_interaction(g);
  auto P = partner_solve(g, I, 0.0, 6, 3);
  REQUIRE(P.consistent);
  CHECK(P.residual <= 1e-8);
  CHECK(partner_residual(g, I, P.series, 0.0, 6).max_abs() <= 1e-8);
  CHECK(full_partner_residual(g, I, P.series, 0.0, 6).max_abs() <= 1e-8);
  CHECK(transport_residual(g, I, P.series, 0.0, 6).max_abs() <= 1e-8);

  // Without the hbar corrections the seed has no partner.
  HbarSeries<double> seed(g.basis.grading(), 4);
  seed[0] = I[0];
  auto bad = partner_solve(g, seed, 0.0, 6, 3);
  CHECK(!bad.consistent);
  CHECK(bad.residual > 1e-3);

  // Rational mode: the zero interaction has the zero partner, and a solution is exact when found.
  auto m = load("gl11_dim4.json");
  auto Z = partner_solve(m, HbarSeries<Q>(m.basis.grading(), 2), Q(0), 4, 2);
  CHECK(Z.consistent);
  CHECK(Z.series.is_zero());
  Rng r(9);
  int solved = 0, unsolved = 0;
  for (int k = 0; k < 6; ++k) {
    HbarSeries<Q> J(m.basis.grading(), 2);
    J[0] = random_poly(m.basis, 0, 3, 4, r);
    J[1] = random_poly(m.basis, 0, 1, 2, r);
    J = window(J, 4);
    auto S = partner_solve(m, J, Q(0), 4, 2);
    if (S.consistent) {
      ++solved;
      CHECK(S.residual == 0);
      CHECK(partner_residual(m, J, S.series, Q(0), 4).is_zero());
    } else {
      ++unsolved;
      CHECK(S.residual > 0);
    }
  }
  CHECK(solved > 0);
  CHECK(unsolved > 0);
}

TEST_CASE("generator of the full flow") {
  auto g = load<double>("gl11_ghost.json");
  auto I = ghost_interaction(g);
  auto P = partner_solve(g, I, 0.0, 6, 3);
  REQUIRE(P.consistent);
  auto G = full_generator(g, P.series, 0.0);
  CHECK(G.linear == free_generator_matrix(g));
  CHECK((G.hamiltonian + P.series).max_abs() == 0);
  std::function<Generator<double>(const double&)> gen = [&](const double& u) { return generator_component(g, P.series, u, 0); };
  std::function<Endomorphism<double>(const double&)> def = [&](const double& u) { return free_deformer(g, u); };
  auto hyp = check_generator(g.basis, gen, def, 0.0, 1e-4, 1, monomial_probes(g.basis, 2));
  CHECK(hyp.bracket_law <= 1e-7);
  CHECK(hyp.evolution <= 1e-7);
}

TEST_CASE("check_series rejects wrong degrees and low orders") {
  auto b = paired_basis<Q>({0, 0});
  HbarSeries<Q> I(b.grading(), 1);
  I[0] = Poly<Q>::from_factors(b.grading(), {0, 2}, Q(1));
  CHECK_NOTHROW(check_series(I, 0, 2, "I"));
  CHECK_THROWS_AS(check_series(I, 0, 3, "I"), std::invalid_argument);
  I[1] = Poly<Q>::from_factors(b.grading(), {1, 2}, Q(1));
  CHECK_THROWS_AS(check_series(I, 0, 2, "I"), std::invalid_argument);
}

TEST_CASE("partner of a free shift is the soul image up to the kernel") {
  auto m = load("gl11_dim4.json");
  for (const Q& c : {Q(1, 2), Q(-1, 3), Q(2)})
    for (const Q& t : {Q(0), Q(1, 2)}) {
      HbarSeries<Q> I(m.basis.grading(), 2), X(m.basis.grading(), 2);
      I[0] = free_action(m, t).scaled(c);
      X[0] = soul_derivation(m, I[0]);
      CHECK(interaction_me_residual(m, I, t, 4).is_zero());
      CHECK(partner_residual(m, I, X, t, 4).is_zero());
      auto P = partner_solve(m, I, t, 4, 2);
      REQUIRE(P.consistent);
      CHECK(partner_operator(m, I, P.series - X, t, 4).is_zero());
    }
  auto g = load<double>("gl11_ghost.json");
  HbarSeries<double> I(g.basis.grading(), 2), X(g.basis.grading(), 2);
  I[0] = free_action(g, 0.3).scaled(0.5);
  X[0] = soul_derivation(g, I[0]);
  CHECK(partner_residual(g, I, X, 0.3, 4).max_abs() <= 1e-12);
}

TEST_CASE("RGE leaves an interaction outside the soul contractions unchanged") {
  // On the ghost model Qbar only pairs x^1 with x^0 and x^3 with x^2, so a function of x^2 alone
  // has vanishing Qbar-bracket and Qbar-Laplacian.
  auto g = load<double>("gl11_ghost.json");
  HbarSeries<double> I(g.basis.grading(), 2);
  I[0] = Poly<double>::from_factors(g.basis.grading(), {2, 2, 2}, 0.7);
  CHECK(rge_rhs(g, I, 0.4, 6).max_abs() == 0);
  CHECK((rge_evolve(g, I, 0.0, 1.0, 10, 6).value - I).max_abs() == 0);
}

TEST_CASE("zero partner gives the free generator") {
  auto m = load("gl11_dim4.json");
  auto G = full_generator(m, HbarSeries<Q>(m.basis.grading(), 2), Q(1, 3));
  CHECK(G.linear == free_generator_matrix(m));
  CHECK(G.hamiltonian.is_zero());
  CHECK(G.r_dot.is_zero());
}
