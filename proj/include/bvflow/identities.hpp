#pragma once

#include "bvflow/report.hpp"
#include "bvflow/bv.hpp"

#include <random>

namespace bvflow {

struct IdentityOptions {
  unsigned long seed = 1;
  int samples = 20;    // random tuples per identity
  int max_total = 3;   // polynomial degree of the random arguments
  int max_terms = 3;
};

// Randomized replay of the BV algebra identities for deformed Laplacians on one basis:
// second-order seven-term relation, nilpotency, commuting Laplacians, bracket antisymmetry,
// Jacobi, Leibniz, bracket-from-Laplacian, the quadratic-form identities, the
// <x,B ad x> commutator and derivation identities, the mixed-bracket defect and ad-type canonical maps.
// One record per identity, named "identities.<name>", residual = worst case over samples.
template <class T>
std::vector<CheckRecord> identity_suite(const GradedBasis<T>& b, const IdentityOptions& opt, double tolerance = 0);

// Deterministic small random data shared by the suite, the sampler and tests.
class SeededRandom {
 public:
  explicit SeededRandom(unsigned long seed);
  // Uniform in [lo, hi] by modulo reduction of the raw 64-bit stream (platform independent).
  long range(long lo, long hi);
  template <class T> T small_fraction();
  template <class T> Endomorphism<T> endomorphism(const GradedBasis<T>& b, int p);
  template <class T> Poly<T> homogeneous(const GradedBasis<T>& b, int degree, int max_total, int max_terms);

 private:
  std::mt19937_64 gen_;
  std::map<std::pair<int, int>, std::vector<Monomial>> pools_;
  const Grading* pool_owner_ = nullptr;
};

}  // namespace bvflow
