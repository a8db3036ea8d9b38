#include "doctest.h"
#include "support.hpp"

using namespace bvtest;

namespace {

Endomorphism<Q> diag(std::vector<long> d) {
  Matrix<Q> m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return {0, m};
}

}  // namespace

TEST_CASE("graded trace examples") {
  auto b = paired_basis<Q>({0});
  CHECK(graded_trace(b, Endomorphism<Q>::identity(2)) == 0);
  CHECK(graded_trace(b, euler(b)) == 1);
}

TEST_CASE("euler endomorphism") {
  auto b = paired_basis<Q>({0});
  CHECK(euler(b).m == diag({0, -1}).m);
  CHECK(euler(b).degree == 0);
  auto b4 = paired_basis<Q>({0, 0});
  CHECK(euler(b4).m == diag({0, -1, 0, -1}).m);
  // (-1)^{2F} is the identity.
  Matrix<Q> sq(4, 4);
  for (int i = 0; i < 4; ++i) sq(i, i) = sgn_pow(2L * b4.eps(i));
  CHECK(sq == Matrix<Q>::identity(4));
}

TEST_CASE("transpose examples") {
  for (const auto& b : basis_zoo()) {
    const int n = b.dim();
    auto one = Endomorphism<Q>::identity(n);
    CHECK(transpose(b, one).m == (Q(-1) * one).m);
    auto F = euler(b);
    CHECK(transpose(b, F).m == (F + one).m);
  }
}

TEST_CASE("transpose satisfies the defining pairing property on all basis pairs") {
  Rng r(11);
  for (const auto& b : basis_zoo()) {
    if (b.dim() > 4) continue;
    for (int p = -3; p <= 3; ++p)
      for (int k = 0; k < 4; ++k) {
        auto A = random_endo(b, p, r);
        CHECK(transpose_pairing_defect(b, A) == 0);
      }
  }
}

TEST_CASE("transpose is an involution and reverses products with sign") {
  Rng r(12);
  for (const auto& b : basis_zoo())
    for (int p = -2; p <= 2; ++p)
      for (int q = -2; q <= 2; ++q) {
        auto A = random_endo(b, p, r), B = random_endo(b, q, r);
        CHECK(transpose(b, transpose(b, A)).m == A.m);
        auto lhs = transpose(b, A * B);
        auto rhs = transpose(b, B) * transpose(b, A);
        if (!odd(1L + p * q)) CHECK(lhs.m == rhs.m);
        else CHECK(lhs.m == (Q(-1) * rhs).m);
      }
}

TEST_CASE("commutator and trace properties on random pairs") {
  Rng r(13);
  auto zoo = basis_zoo();
  int pairs = 0;
  for (int round = 0; round < 25; ++round)
    for (const auto& b : zoo) {
      int p = static_cast<int>(r.range(-2, 2)), q = static_cast<int>(r.range(-2, 2));
      auto A = random_endo(b, p, r), B = random_endo(b, q, r);
      auto C = commutator(A, B);
      CHECK(C.degree == p + q);
      CHECK(respects_degree(b, C));
      CHECK(graded_trace(b, C) == 0);
      CHECK(transpose(b, C).m == commutator(transpose(b, A), transpose(b, B)).m);
      CHECK(graded_trace(b, transpose(b, A)) == graded_trace(b, A));
      auto An = anti_part(b, A);
      CHECK(antisymmetry_defect(b, An) == 0);
      CHECK(graded_trace(b, An) == 0);
      CHECK(respects_degree(b, transpose(b, A)));
      ++pairs;
    }
  CHECK(pairs >= 100);
}

TEST_CASE("even self-commutator vanishes") {
  Rng r(14);
  for (const auto& b : basis_zoo()) {
    auto A = random_endo(b, 0, r);
    CHECK(commutator(A, A).m.is_zero());
    auto B = random_endo(b, 2, r);
    CHECK(commutator(B, B).m.is_zero());
  }
}

TEST_CASE("matrix exponential, rational mode") {
  auto b = paired_basis<Q>({0, 0});
  auto H = Endomorphism<Q>::zero(4);
  CHECK(matrix_exp(H, Q(5)).m == Matrix<Q>::identity(4));
  H.m(0, 2) = 3;
  auto e = matrix_exp(H, Q(2, 7));
  CHECK(e.m == (Endomorphism<Q>::identity(4) + Q(2, 7) * H).m);
  CHECK(matrix_exp(H, Q(0)).m == Matrix<Q>::identity(4));
  // order-3 nilpotent
  Matrix<Q> m(3, 3);
  m(0, 1) = 1, m(1, 2) = 2;
  Endomorphism<Q> N{0, m};
  auto en = matrix_exp(N, Q(1));
  CHECK(en.m(0, 2) == 1);  // tau^2/2 * (N^2)_02 = 1/2 * 2
  CHECK_THROWS(matrix_exp(Endomorphism<Q>::identity(2), Q(1)));
  CHECK_THROWS(matrix_exp(Endomorphism<Q>::zero(2, 1), Q(1)));
}

TEST_CASE("matrix exponential, float mode") {
  Matrix<double> m(4, 4);
  m(0, 0) = 0.7, m(0, 2) = -1.1, m(2, 0) = 0.4, m(2, 2) = -0.3, m(1, 1) = 2.0, m(1, 3) = 0.5, m(3, 3) = -1.5;
  Endomorphism<double> H{0, m};
  auto a = matrix_exp(H, 0.9), b = matrix_exp(H, -0.9);
  auto prod = a.m * b.m;
  CHECK((prod - Matrix<double>::identity(4)).max_abs() <= 1e-13);
  // Oracle: plain Taylor series of tau H / 64 raised to the 64th power.
  Matrix<double> small = (0.9 / 64.0) * m, term = Matrix<double>::identity(4), sum = term;
  for (int k = 1; k < 30; ++k) {
    term = (1.0 / k) * (term * small);
    sum = sum + term;
  }
  for (int k = 0; k < 6; ++k) sum = sum * sum;
  CHECK((sum - a.m).max_abs() <= 1e-13);
  // Entries forbidden by the pattern of H are exactly zero.
  CHECK(a.m(0, 1) == 0.0);
  CHECK(a.m(3, 1) == 0.0);
}

TEST_CASE("basis validation names the violated invariant") {
  Matrix<Q> om(2, 2);
  om(0, 1) = 1, om(1, 0) = -1;
  CHECK_NOTHROW(GradedBasis<Q>({0, -1}, om));
  CHECK_THROWS_WITH(GradedBasis<Q>({0, 0}, om), doctest::Contains("degree -1 pairing"));
  Matrix<Q> sym(2, 2);
  sym(0, 1) = 1, sym(1, 0) = 1;
  CHECK_THROWS_WITH(GradedBasis<Q>({0, -1}, sym), doctest::Contains("antisymmetric"));
  CHECK_THROWS_WITH(GradedBasis<Q>({0, -1}, Matrix<Q>(2, 2)), doctest::Contains("singular"));
  GradedBasis<Q> b({0, -1}, om);
  CHECK(b.omega() * b.omega_inv() == Matrix<Q>::identity(2));
  Endomorphism<Q> bad{1, Matrix<Q>::identity(2)};
  CHECK_THROWS(check_endomorphism(b, bad));
  CHECK_THROWS(graded_trace(b, Endomorphism<Q>::identity(3)));
}
